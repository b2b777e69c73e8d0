#include "coalcert/domain.hpp"

#include "coalcert/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace coalcert {

domain_formula::domain_formula() : domain_formula(truth()) {}

domain_formula domain_formula::make(node n) { return domain_formula(std::make_shared<const node>(std::move(n))); }

domain_formula domain_formula::truth()
{
    static const auto shared = std::make_shared<const node>();
    return domain_formula(shared);
}

domain_formula domain_formula::negation(domain_formula f)
{
    if (f.kind() == op::negation)
        return f.args().front();
    node n;
    n.kind = op::negation;
    n.args.push_back(std::move(f));
    return make(std::move(n));
}

domain_formula domain_formula::conjunction(std::vector<domain_formula> parts)
{
    std::erase_if(parts, [](const domain_formula& f) { return f.kind() == op::truth; });
    if (parts.empty())
        return truth();
    if (parts.size() == 1)
        return parts.front();
    node n;
    n.kind = op::conjunction;
    n.args = std::move(parts);
    return make(std::move(n));
}

domain_formula domain_formula::disjunction(std::vector<domain_formula> parts)
{
    if (parts.empty())
        return negation(truth());
    if (parts.size() == 1)
        return parts.front();
    node n;
    n.kind = op::disjunction;
    n.args = std::move(parts);
    return make(std::move(n));
}

domain_formula domain_formula::diamond(domain_formula f)
{
    node n;
    n.kind = op::diamond;
    n.args.push_back(std::move(f));
    return make(std::move(n));
}

domain_formula domain_formula::grade(weight m, domain_formula f)
{
    node n;
    n.kind = op::grade;
    n.grade = std::move(m);
    n.args.push_back(std::move(f));
    return make(std::move(n));
}

domain_formula domain_formula::symbol(std::string name)
{
    node n;
    n.kind = op::symbol;
    n.name = std::move(name);
    return make(std::move(n));
}

domain_formula domain_formula::positions(std::vector<unsigned> indices, domain_formula f)
{
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    node n;
    n.kind = op::positions;
    n.indices = std::move(indices);
    n.args.push_back(std::move(f));
    return make(std::move(n));
}

domain_formula domain_formula::prob_at_least(std::string label, rational p, domain_formula f)
{
    if (p < 0 || p > 1)
        throw error("probability " + format_rational(p) + " outside [0,1]");
    node n;
    n.kind = op::prob_at_least;
    n.name = std::move(label);
    n.probability = std::move(p);
    n.args.push_back(std::move(f));
    return make(std::move(n));
}

bool operator==(const domain_formula& a, const domain_formula& b)
{
    if (a.node_ == b.node_)
        return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    return x.kind == y.kind && x.grade == y.grade && x.name == y.name && x.indices == y.indices &&
           x.probability == y.probability && x.args == y.args;
}

namespace {

using df = domain_formula;

std::vector<unsigned> positions_with(const term_shape& t, std::uint8_t color)
{
    std::vector<unsigned> out;
    for (std::size_t i = 0; i < t.colors.size(); ++i)
        if (t.colors[i] == color)
            out.push_back(static_cast<unsigned>(i + 1));
    return out;
}

bool is_bool_monoid(const functor_kind& kind)
{
    return kind.is<monoid_functor>() && kind.as<monoid_functor>().monoid == monoid_kind::bool_or;
}

} // namespace

domain_formula domain_tau(const functor_kind& kind, const key& o)
{
    if (kind.is<powerset_functor>()) {
        auto some = df::diamond(df::truth());
        return (o.as<color_set>().mask & 1u) ? some : df::negation(some);
    }
    if (kind.is<monoid_functor>() || kind.is<dist_functor>())
        return df::grade(o.as<weight_vector>().by_color.at(0), df::truth());
    if (kind.is<lmc_functor>()) {
        std::vector<df> parts;
        const auto& rows = o.as<label_rows>().rows;
        for (std::size_t a = 0; a < rows.size(); ++a) {
            auto defined = df::prob_at_least(kind.alphabet()[a], rational(1), df::truth());
            parts.push_back(rows[a] ? defined : df::negation(defined));
        }
        return df::conjunction(std::move(parts));
    }
    return df::symbol(kind.symbol_name(o.as<term_shape>().symbol));
}

domain_formula domain_lambda(const functor_kind& kind, const key& t, const domain_formula& delta,
                             const domain_formula& rho)
{
    if (kind.is<powerset_functor>()) {
        const auto mask = t.as<color_set>().mask;
        const bool inner = mask & 4u;
        const bool outer = mask & 2u;
        if (inner && !outer)
            return df::negation(df::diamond(rho));
        if (inner && outer)
            return df::conjunction({df::diamond(delta), df::diamond(rho)});
        if (!inner && outer)
            return df::negation(df::diamond(delta));
        return df::truth();
    }
    if (is_bool_monoid(kind)) {
        const auto& w = t.as<weight_vector>().by_color;
        return df::conjunction({df::grade(w.at(2), delta), df::grade(w.at(1), rho)});
    }
    if (kind.is<lmc_functor>()) {
        std::vector<df> parts;
        const auto& rows = t.as<label_rows>().rows;
        for (std::size_t a = 0; a < rows.size(); ++a) {
            if (!rows[a])
                continue;
            const auto& label = kind.alphabet()[a];
            parts.push_back(df::prob_at_least(label, (*rows[a])[2].as_rational(), delta));
            parts.push_back(df::prob_at_least(label, (*rows[a])[1].as_rational(), rho));
        }
        return df::conjunction(std::move(parts));
    }
    // Cancellative monoids, Dist, Signature, Dfa: kappa of F chi_{2}(t).
    return domain_kappa(kind, restrict_to_inner(t), delta);
}

domain_formula domain_kappa(const functor_kind& kind, const key& s, const domain_formula& delta)
{
    if (!kind.cancellative())
        throw kind_mismatch_error("functor kind " + kind.name() + " has no binary modalities");
    if (kind.is<monoid_functor>() || kind.is<dist_functor>())
        return df::grade(s.as<weight_vector>().by_color.at(1), delta);
    if (kind.is<lmc_functor>()) {
        // Lower bounds on both delta and its complement pin the mass exactly.
        std::vector<df> parts;
        const auto& rows = s.as<label_rows>().rows;
        for (std::size_t a = 0; a < rows.size(); ++a) {
            if (!rows[a])
                continue;
            const auto& label = kind.alphabet()[a];
            parts.push_back(df::prob_at_least(label, (*rows[a])[1].as_rational(), delta));
            parts.push_back(df::prob_at_least(label, (*rows[a])[0].as_rational(), df::negation(delta)));
        }
        return df::conjunction(std::move(parts));
    }
    return df::positions(positions_with(s.as<term_shape>(), 1), delta);
}

domain_formula translate(const functor_kind& kind, const formula_dag& dag, node_ref root)
{
    std::vector<std::optional<df>> memo(root.node + 1);
    auto get = [&](node_ref r) {
        const auto& f = *memo[r.node];
        return r.negated ? df::negation(f) : f;
    };
    for (node_id id = 0; id <= root.node; ++id) {
        const auto& n = dag.node(id);
        switch (n.kind) {
        case node_kind::top: memo[id] = df::truth(); break;
        case node_kind::conj: memo[id] = df::conjunction({get(n.children[0]), get(n.children[1])}); break;
        case node_kind::mod0: memo[id] = domain_tau(kind, *n.k); break;
        case node_kind::mod2: memo[id] = domain_kappa(kind, *n.k, get(n.children[0])); break;
        case node_kind::mod3: {
            auto d = get(n.children[0]);
            auto rho = df::conjunction({get(n.children[1]), df::negation(d)});
            memo[id] = domain_lambda(kind, *n.k, d, rho);
            break;
        }
        }
    }
    return get(root);
}

namespace {

class domain_evaluator
{
public:
    explicit domain_evaluator(const coalgebra& c) : c_(c) {}

    const state_set& eval(const df& f)
    {
        auto it = memo_.find(f.identity());
        if (it != memo_.end())
            return it->second;
        auto value = compute(f);
        return memo_.emplace(f.identity(), std::move(value)).first->second;
    }

private:
    [[noreturn]] void mismatch(const std::string& what) const
    {
        throw kind_mismatch_error(what + " is not available for functor kind " + c_.kind().name());
    }

    state_set compute(const df& f)
    {
        const auto& kind = c_.kind();
        const std::size_t n = c_.size();
        state_set out(n);
        switch (f.kind()) {
        case df::op::truth:
            out.set();
            return out;
        case df::op::negation:
            out = eval(f.args()[0]);
            out.flip();
            return out;
        case df::op::conjunction:
            out.set();
            for (const auto& a : f.args())
                out &= eval(a);
            return out;
        case df::op::disjunction:
            for (const auto& a : f.args())
                out |= eval(a);
            return out;
        case df::op::diamond: {
            if (!kind.is<powerset_functor>())
                mismatch("<>");
            const auto& s = eval(f.args()[0]);
            for (state_id x = 0; x < n; ++x)
                for (auto y : c_.successors(x))
                    if (s[y]) {
                        out[x] = true;
                        break;
                    }
            return out;
        }
        case df::op::grade: {
            if (!kind.is<monoid_functor>() && !kind.is<dist_functor>())
                mismatch("graded modality");
            if (f.grade_value().monoid() != *kind.weight_monoid())
                mismatch("grade " + f.grade_value().to_string());
            const auto& s = eval(f.args()[0]);
            for (state_id x = 0; x < n; ++x) {
                weight sum = weight::zero(*kind.weight_monoid());
                for (auto e = c_.edge_begin(x); e < c_.edge_end(x); ++e)
                    if (s[c_.target(e)])
                        sum += c_.edge_weight(e);
                out[x] = sum == f.grade_value();
            }
            return out;
        }
        case df::op::symbol: {
            if (!kind.is<signature_functor>() && !kind.is<dfa_functor>())
                mismatch("sym(...)");
            auto sym = kind.symbol_index(f.name());
            if (!sym)
                throw kind_mismatch_error("unknown symbol '" + f.name() + "'");
            for (state_id x = 0; x < n; ++x)
                out[x] = c_.head(x) == *sym;
            return out;
        }
        case df::op::positions: {
            if (!kind.is<signature_functor>() && !kind.is<dfa_functor>())
                mismatch("pos{...}");
            const auto& s = eval(f.args()[0]);
            const auto& wanted = f.indices();
            for (state_id x = 0; x < n; ++x) {
                std::vector<unsigned> hits;
                auto succ = c_.successors(x);
                for (std::size_t i = 0; i < succ.size(); ++i)
                    if (s[succ[i]])
                        hits.push_back(static_cast<unsigned>(i + 1));
                out[x] = hits == wanted;
            }
            return out;
        }
        case df::op::prob_at_least: {
            if (!kind.is<lmc_functor>())
                mismatch("<a>=p");
            auto label = kind.label_index(f.name());
            if (!label)
                throw kind_mismatch_error("unknown label '" + f.name() + "'");
            const auto& s = eval(f.args()[0]);
            for (state_id x = 0; x < n; ++x) {
                rational mass = 0;
                for (auto e = c_.edge_begin(x); e < c_.edge_end(x); ++e)
                    if (c_.slot(e) == *label && s[c_.target(e)])
                        mass += c_.edge_weight(e).as_rational();
                out[x] = mass >= f.probability();
            }
            return out;
        }
        }
        return out;
    }

    const coalgebra& c_;
    std::unordered_map<const void*, state_set> memo_;
};

} // namespace

state_set eval_domain(const coalgebra& c, const domain_formula& f)
{
    domain_evaluator ev(c);
    return ev.eval(f);
}

big_int domain_tree_size(const domain_formula& f)
{
    std::unordered_map<const void*, big_int> memo;
    auto go = [&](auto& self, const df& g) -> big_int {
        auto it = memo.find(g.identity());
        if (it != memo.end())
            return it->second;
        big_int total = 1;
        for (const auto& a : g.args())
            total += self(self, a);
        memo.emplace(g.identity(), total);
        return total;
    };
    return go(go, f);
}

std::size_t domain_node_count(const domain_formula& f)
{
    std::unordered_set<const void*> seen{f.identity()};
    std::vector<const df*> stack{&f};
    while (!stack.empty()) {
        const df* g = stack.back();
        stack.pop_back();
        for (const auto& a : g->args())
            if (seen.insert(a.identity()).second)
                stack.push_back(&a);
    }
    return seen.size();
}

namespace {

bool is_binary(const df& f)
{
    return f.kind() == df::op::conjunction || f.kind() == df::op::disjunction;
}

void render(const df& f, std::string& out)
{
    auto operand = [&](const df& g) {
        if (is_binary(g)) {
            out += "(";
            render(g, out);
            out += ")";
        } else {
            render(g, out);
        }
    };
    switch (f.kind()) {
    case df::op::truth: out += "T"; return;
    case df::op::negation: out += "~"; operand(f.args()[0]); return;
    case df::op::conjunction:
    case df::op::disjunction: {
        const char* sep = f.kind() == df::op::conjunction ? " /\\ " : " \\/ ";
        for (std::size_t i = 0; i < f.args().size(); ++i) {
            if (i)
                out += sep;
            operand(f.args()[i]);
        }
        return;
    }
    case df::op::diamond: out += "<> "; operand(f.args()[0]); return;
    case df::op::grade: out += "<" + f.grade_value().to_string() + "> "; operand(f.args()[0]); return;
    case df::op::symbol: out += "sym(" + f.name() + ")"; return;
    case df::op::positions: {
        out += "pos{";
        for (std::size_t i = 0; i < f.indices().size(); ++i)
            out += (i ? "," : "") + std::to_string(f.indices()[i]);
        out += "} ";
        operand(f.args()[0]);
        return;
    }
    case df::op::prob_at_least:
        out += "<" + f.name() + ">=" + format_rational(f.probability()) + " ";
        operand(f.args()[0]);
        return;
    }
}

} // namespace

std::string render_domain(const domain_formula& f)
{
    std::string out;
    render(f, out);
    return out;
}

nlohmann::json domain_to_json(const domain_formula& f)
{
    using nlohmann::json;
    auto arg = [&](std::size_t i) { return domain_to_json(f.args()[i]); };
    switch (f.kind()) {
    case df::op::truth: return {{"op", "true"}};
    case df::op::negation: return {{"op", "not"}, {"arg", arg(0)}};
    case df::op::conjunction:
    case df::op::disjunction: {
        json args = json::array();
        for (std::size_t i = 0; i < f.args().size(); ++i)
            args.push_back(arg(i));
        return {{"op", f.kind() == df::op::conjunction ? "and" : "or"}, {"args", args}};
    }
    case df::op::diamond: return {{"op", "diamond"}, {"arg", arg(0)}};
    case df::op::grade: return {{"op", "grade"}, {"weight", f.grade_value().to_string()}, {"arg", arg(0)}};
    case df::op::symbol: return {{"op", "sym"}, {"symbol", f.name()}};
    case df::op::positions: return {{"op", "pos"}, {"positions", f.indices()}, {"arg", arg(0)}};
    case df::op::prob_at_least:
        return {{"op", "prob"}, {"label", f.name()}, {"p", format_rational(f.probability())}, {"arg", arg(0)}};
    }
    return {};
}

namespace {

class domain_parser
{
public:
    domain_parser(const functor_kind& kind, std::string_view text) : kind_(kind), text_(text) {}

    df parse()
    {
        auto f = disjunction();
        skip();
        if (pos_ != text_.size())
            fail("unexpected input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw parse_error("formula, column " + std::to_string(pos_ + 1) + ": " + why);
    }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(std::string_view token)
    {
        skip();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view token)
    {
        if (!accept(token))
            fail("expected '" + std::string(token) + "'");
    }

    std::string until(char stop)
    {
        auto end = text_.find(stop, pos_);
        if (end == std::string_view::npos)
            fail(std::string("missing '") + stop + "'");
        auto s = std::string(text_.substr(pos_, end - pos_));
        pos_ = end + 1;
        return s;
    }

    df disjunction()
    {
        std::vector<df> parts{conjunction()};
        while (accept("\\/"))
            parts.push_back(conjunction());
        return parts.size() == 1 ? parts.front() : df::disjunction(std::move(parts));
    }

    df conjunction()
    {
        std::vector<df> parts{unary()};
        while (accept("/\\"))
            parts.push_back(unary());
        return parts.size() == 1 ? parts.front() : df::conjunction(std::move(parts));
    }

    df unary()
    {
        skip();
        if (accept("~"))
            return df::negation(unary());
        if (accept("<>")) {
            if (!kind_.is<powerset_functor>())
                throw kind_mismatch_error("<> is not available for functor kind " + kind_.name());
            return df::diamond(unary());
        }
        if (accept("<")) {
            auto inside = until('>');
            if (pos_ < text_.size() && text_[pos_] == '=') {
                ++pos_;
                auto start = pos_;
                while (pos_ < text_.size() &&
                       (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/'))
                    ++pos_;
                if (!kind_.is<lmc_functor>())
                    throw kind_mismatch_error("<a>=p is not available for functor kind " + kind_.name());
                if (!kind_.label_index(inside))
                    throw kind_mismatch_error("unknown label '" + inside + "'");
                rational p;
                try {
                    p = parse_rational(text_.substr(start, pos_ - start));
                } catch (const parse_error&) {
                    fail("malformed probability");
                }
                if (p > 1)
                    fail("probability above 1");
                return df::prob_at_least(inside, p, unary());
            }
            if (!kind_.is<monoid_functor>() && !kind_.is<dist_functor>())
                throw kind_mismatch_error("graded modality is not available for functor kind " + kind_.name());
            weight w;
            try {
                w = parse_weight(*kind_.weight_monoid(), trim(inside));
            } catch (const parse_error&) {
                fail("malformed grade '" + inside + "'");
            }
            return df::grade(std::move(w), unary());
        }
        if (accept("pos")) {
            expect("{");
            auto inside = until('}');
            std::vector<unsigned> indices;
            std::size_t at = 0;
            auto body = trim(inside);
            while (!body.empty() && at <= body.size()) {
                auto comma = body.find(',', at);
                auto item = trim(body.substr(at, comma == std::string::npos ? std::string::npos : comma - at));
                if (item.empty() || !std::all_of(item.begin(), item.end(), ::isdigit) || item == "0")
                    fail("positions must be positive integers");
                indices.push_back(static_cast<unsigned>(std::stoul(item)));
                if (comma == std::string::npos)
                    break;
                at = comma + 1;
            }
            if (!kind_.is<signature_functor>() && !kind_.is<dfa_functor>())
                throw kind_mismatch_error("pos{...} is not available for functor kind " + kind_.name());
            return df::positions(std::move(indices), unary());
        }
        return atom();
    }

    df atom()
    {
        skip();
        if (accept("(")) {
            auto f = disjunction();
            expect(")");
            return f;
        }
        if (accept("sym")) {
            expect("(");
            auto name = trim(until(')'));
            if (!kind_.is<signature_functor>() && !kind_.is<dfa_functor>())
                throw kind_mismatch_error("sym(...) is not available for functor kind " + kind_.name());
            if (!kind_.symbol_index(name))
                throw kind_mismatch_error("unknown symbol '" + name + "'");
            return df::symbol(name);
        }
        if (accept("T"))
            return df::truth();
        fail("expected a formula");
    }

    static std::string trim(std::string_view s)
    {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return std::string(s);
    }

    const functor_kind& kind_;
    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

domain_formula parse_domain(const functor_kind& kind, std::string_view text)
{
    return domain_parser(kind, text).parse();
}

} // namespace coalcert
