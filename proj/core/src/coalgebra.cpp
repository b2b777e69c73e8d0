#include "coalcert/coalgebra.hpp"

#include "coalcert/error.hpp"

#include <algorithm>
#include <map>

namespace coalcert {

std::optional<state_id> coalgebra::find(std::string_view name) const
{
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

state_id coalgebra::lookup(std::string_view name) const
{
    auto id = find(name);
    if (!id)
        throw unknown_state_error("unknown state '" + std::string(name) + "'");
    return *id;
}

coalgebra_builder::coalgebra_builder(functor_kind kind) : kind_(std::move(kind)) {}

state_id coalgebra_builder::add_state(std::string name)
{
    auto id = static_cast<state_id>(names_.size());
    if (!index_.emplace(name, id).second)
        throw model_error("duplicate state '" + name + "'");
    names_.push_back(std::move(name));
    out_.emplace_back();
    heads_.emplace_back();
    letters_.emplace_back(kind_.is<dfa_functor>() ? kind_.alphabet().size() : 0);
    args_.emplace_back();
    defined_.resize(defined_.size() + kind_.alphabet().size(), 0);
    return id;
}

void coalgebra_builder::check_state(state_id x) const
{
    if (x >= names_.size())
        throw model_error("state id out of range");
}

void coalgebra_builder::add_successor(state_id x, state_id y)
{
    if (!kind_.is<powerset_functor>())
        throw kind_mismatch_error("add_successor on " + kind_.name());
    check_state(x);
    check_state(y);
    out_[x].push_back({0, y, {}});
}

void coalgebra_builder::add_weight(state_id x, state_id y, weight w)
{
    if (!kind_.is<monoid_functor>() && !kind_.is<dist_functor>())
        throw kind_mismatch_error("add_weight on " + kind_.name());
    check_state(x);
    check_state(y);
    if (w.monoid() != *kind_.weight_monoid())
        throw model_error("weight of the wrong monoid at state '" + names_[x] + "'");
    out_[x].push_back({0, y, std::move(w)});
}

void coalgebra_builder::define_label(state_id x, std::size_t label)
{
    if (!kind_.is<lmc_functor>())
        throw kind_mismatch_error("define_label on " + kind_.name());
    check_state(x);
    if (label >= kind_.alphabet().size())
        throw model_error("label out of range");
    defined_[x * kind_.alphabet().size() + label] = 1;
}

void coalgebra_builder::add_probability(state_id x, std::size_t label, state_id y, rational p)
{
    define_label(x, label);
    check_state(y);
    out_[x].push_back({static_cast<std::uint32_t>(label), y, weight(std::move(p))});
}

void coalgebra_builder::set_accepting(state_id x, bool accepting)
{
    if (!kind_.is<dfa_functor>())
        throw kind_mismatch_error("set_accepting on " + kind_.name());
    check_state(x);
    heads_[x] = accepting ? 1 : 0;
}

void coalgebra_builder::set_transition(state_id x, std::size_t letter, state_id y)
{
    if (!kind_.is<dfa_functor>())
        throw kind_mismatch_error("set_transition on " + kind_.name());
    check_state(x);
    check_state(y);
    if (letter >= kind_.alphabet().size())
        throw model_error("letter out of range");
    letters_[x][letter] = y;
}

void coalgebra_builder::set_term(state_id x, std::size_t symbol, std::vector<state_id> args)
{
    if (!kind_.is<signature_functor>())
        throw kind_mismatch_error("set_term on " + kind_.name());
    check_state(x);
    if (symbol >= kind_.symbol_count())
        throw model_error("symbol out of range");
    for (auto y : args)
        check_state(y);
    heads_[x] = static_cast<std::uint32_t>(symbol);
    args_[x] = std::move(args);
}

coalgebra coalgebra_builder::build() &&
{
    coalgebra c;
    c.kind_ = kind_;
    const std::size_t n = names_.size();
    const std::size_t labels = kind_.alphabet().size();
    c.heads_.assign(n, 0);

    auto fail = [&](state_id x, const std::string& why) {
        throw model_error("state '" + names_[x] + "': " + why);
    };

    for (state_id x = 0; x < n; ++x) {
        if (kind_.is<powerset_functor>()) {
            std::vector<state_id> ys;
            for (const auto& p : out_[x])
                ys.push_back(p.target);
            std::sort(ys.begin(), ys.end());
            ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
            for (auto y : ys) {
                c.targets_.push_back(y);
                c.slots_.push_back(0);
            }
        } else if (kind_.weight_monoid()) {
            std::map<std::pair<std::uint32_t, state_id>, weight> sums;
            for (const auto& p : out_[x]) {
                auto [it, fresh] = sums.try_emplace({p.slot, p.target}, p.w);
                if (!fresh)
                    it->second += p.w;
            }
            std::vector<rational> mass(labels == 0 ? 1 : labels, rational(0));
            for (const auto& [at, w] : sums) {
                if (w.is_zero())
                    continue;
                if (kind_.is<dist_functor>() || kind_.is<lmc_functor>()) {
                    if (w.as_rational() < 0)
                        fail(x, "negative probability");
                    mass[at.first] += w.as_rational();
                }
                c.targets_.push_back(at.second);
                c.slots_.push_back(at.first);
                c.weights_.push_back(w);
            }
            if (kind_.is<dist_functor>() && mass[0] != 1)
                fail(x, "distribution sums to " + format_rational(mass[0]) + ", not 1");
            if (kind_.is<lmc_functor>())
                for (std::size_t a = 0; a < labels; ++a)
                    if (defined_[x * labels + a] && mass[a] != 1)
                        fail(x, "distribution for label '" + kind_.alphabet()[a] + "' sums to " +
                                    format_rational(mass[a]) + ", not 1");
        } else if (kind_.is<dfa_functor>()) {
            for (std::size_t a = 0; a < labels; ++a) {
                if (!letters_[x][a])
                    fail(x, "missing transition for letter '" + kind_.alphabet()[a] + "'");
                c.targets_.push_back(*letters_[x][a]);
                c.slots_.push_back(static_cast<std::uint32_t>(a));
            }
            c.heads_[x] = heads_[x].value_or(0);
        } else {
            if (!heads_[x])
                fail(x, "no term given");
            if (args_[x].size() != kind_.symbol_arity(*heads_[x]))
                fail(x, "symbol '" + kind_.symbol_name(*heads_[x]) + "' expects " +
                            std::to_string(kind_.symbol_arity(*heads_[x])) + " arguments, got " +
                            std::to_string(args_[x].size()));
            for (std::size_t i = 0; i < args_[x].size(); ++i) {
                c.targets_.push_back(args_[x][i]);
                c.slots_.push_back(static_cast<std::uint32_t>(i));
            }
            c.heads_[x] = *heads_[x];
        }
        c.offsets_.push_back(static_cast<std::uint32_t>(c.targets_.size()));
    }
    c.defined_ = std::move(defined_);
    c.names_ = std::move(names_);
    c.index_ = std::move(index_);
    return c;
}

std::size_t count_transitions(const coalgebra& c) { return c.edge_count(); }

reverse_edges build_reverse_edges(const coalgebra& c)
{
    const std::size_t n = c.size();
    reverse_edges r;
    r.offsets.assign(n + 1, 0);
    for (std::size_t e = 0; e < c.edge_count(); ++e)
        ++r.offsets[c.target(e) + 1];
    for (std::size_t y = 0; y < n; ++y)
        r.offsets[y + 1] += r.offsets[y];
    r.edges.resize(c.edge_count());
    r.sources.resize(c.edge_count());
    std::vector<std::uint32_t> fill(r.offsets.begin(), r.offsets.end() - 1);
    for (state_id x = 0; x < n; ++x)
        for (std::size_t e = c.edge_begin(x); e < c.edge_end(x); ++e) {
            auto pos = fill[c.target(e)]++;
            r.edges[pos] = static_cast<std::uint32_t>(e);
            r.sources[pos] = x;
        }
    return r;
}

std::vector<std::vector<state_id>> predecessors(const coalgebra& c)
{
    std::vector<std::vector<state_id>> pred(c.size());
    for (state_id x = 0; x < c.size(); ++x)
        for (auto y : c.successors(x))
            pred[y].push_back(x);
    for (auto& p : pred) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    return pred;
}

namespace {

template <typename ColorOf>
key evaluate(const coalgebra& c, state_id x, unsigned level, ColorOf colors)
{
    const auto& kind = c.kind();
    if (kind.is<powerset_functor>()) {
        color_set p;
        for (auto y : c.successors(x))
            p.mask |= static_cast<std::uint8_t>(1u << colors(y));
        return key(level, p);
    }
    if (kind.is<monoid_functor>() || kind.is<dist_functor>()) {
        std::vector<weight> parts(level, weight::zero(*kind.weight_monoid()));
        for (std::size_t e = c.edge_begin(x); e < c.edge_end(x); ++e)
            parts[colors(c.target(e))] += c.edge_weight(e);
        return key(level, weight_vector{std::move(parts)});
    }
    if (kind.is<lmc_functor>()) {
        const std::size_t labels = kind.alphabet().size();
        label_rows p;
        p.rows.resize(labels);
        for (std::size_t a = 0; a < labels; ++a)
            if (c.defined(x, a))
                p.rows[a].emplace(level, weight::zero(monoid_kind::rational_add));
        for (std::size_t e = c.edge_begin(x); e < c.edge_end(x); ++e)
            (*p.rows[c.slot(e)])[colors(c.target(e))] += c.edge_weight(e);
        return key(level, std::move(p));
    }
    term_shape p{c.head(x), {}};
    for (auto y : c.successors(x))
        p.colors.push_back(colors(y));
    return key(level, std::move(p));
}

} // namespace

key eval_colored(const coalgebra& c, state_id x, std::span<const std::uint8_t> colors, unsigned level)
{
    return evaluate(c, x, level, [&](state_id y) { return colors[y]; });
}

key eval1(const coalgebra& c, state_id x)
{
    return evaluate(c, x, 1, [](state_id) { return std::uint8_t{0}; });
}

key eval2(const coalgebra& c, state_id x, std::span<const std::uint8_t> member)
{
    if (!c.kind().cancellative())
        throw mode_error("functor kind " + c.kind().name() + " is not cancellative");
    return eval_colored(c, x, member, 2);
}

key eval3(const coalgebra& c, state_id x, std::span<const std::uint8_t> colors)
{
    return eval_colored(c, x, colors, 3);
}

} // namespace coalcert
