#include "coalcert/fixtures.hpp"

#include "coalcert/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace coalcert {

coalgebra fixture_fig1()
{
    coalgebra_builder b(powerset_functor{});
    auto x = b.add_state("x");
    auto y = b.add_state("y");
    auto x1 = b.add_state("x1");
    auto z = b.add_state("z");
    b.add_successor(x, x);
    b.add_successor(x, x1);
    b.add_successor(x1, x1);
    b.add_successor(x1, z);
    b.add_successor(y, y);
    b.add_successor(y, z);
    return std::move(b).build();
}

coalgebra fixture_fig2()
{
    coalgebra_builder b(lmc_functor{{"tau"}});
    auto x = b.add_state("x");
    auto y = b.add_state("y");
    auto z1 = b.add_state("z1");
    auto z2 = b.add_state("z2");
    b.add_probability(x, 0, z2, rational(1, 2));
    b.add_probability(x, 0, z1, rational(1, 2));
    b.add_probability(z2, 0, z1, rational(1));
    b.add_probability(y, 0, z1, rational(1));
    return std::move(b).build();
}

coalgebra fixture_threetower(unsigned k)
{
    coalgebra_builder b(powerset_functor{});
    std::vector<state_id> x, y, z;
    for (unsigned i = 0; i <= k; ++i) {
        x.push_back(b.add_state("x" + std::to_string(i)));
        y.push_back(b.add_state("y" + std::to_string(i)));
        z.push_back(b.add_state("z" + std::to_string(i)));
    }
    b.add_successor(x[0], y[0]);
    b.add_successor(z[0], x[0]);
    for (unsigned i = 0; i < k; ++i) {
        b.add_successor(x[i + 1], x[i]);
        b.add_successor(x[i + 1], y[i]);
        b.add_successor(x[i + 1], z[i]);
        b.add_successor(y[i + 1], y[i]);
        b.add_successor(y[i + 1], z[i]);
        b.add_successor(z[i + 1], x[i]);
        b.add_successor(z[i + 1], z[i]);
    }
    return std::move(b).build();
}

coalgebra fixture_layers(unsigned k)
{
    coalgebra_builder b(monoid_functor{monoid_kind::rational_add});
    std::vector<std::array<state_id, 4>> layer;
    const char* names[] = {"w", "x", "y", "z"};
    for (unsigned i = 0; i <= k; ++i) {
        std::array<state_id, 4> l{};
        for (int j = 0; j < 4; ++j)
            l[j] = b.add_state(names[j] + std::to_string(i));
        layer.push_back(l);
    }
    auto w = [](int v) { return weight(rational(v)); };
    for (int j = 0; j < 4; ++j)
        b.add_weight(layer[0][j], layer[0][j], w(j + 1));
    // Rows: weights from w_{i+1}, x_{i+1}, y_{i+1}, z_{i+1} into w_i, x_i, y_i, z_i.
    const int table[4][4] = {{1, 2, 1, 2}, {1, 2, 2, 1}, {2, 1, 1, 2}, {2, 1, 2, 1}};
    for (unsigned i = 0; i < k; ++i)
        for (int from = 0; from < 4; ++from)
            for (int to = 0; to < 4; ++to)
                b.add_weight(layer[i + 1][from], layer[i][to], w(table[from][to]));
    return std::move(b).build();
}

const std::vector<std::string>& random_kinds()
{
    static const std::vector<std::string> kinds{"powerset", "monoid-int", "monoid-rational", "monoid-bool",
                                                "dist",     "lmc",        "dfa",             "signature"};
    return kinds;
}

namespace {

// Portable draws from the raw engine output.
class draws
{
public:
    explicit draws(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return rng_() % n; }
    bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::mt19937_64 rng_;
};

functor_kind kind_named(const std::string& name)
{
    if (name == "powerset")
        return powerset_functor{};
    if (name == "monoid-int")
        return monoid_functor{monoid_kind::int_add};
    if (name == "monoid-rational")
        return monoid_functor{monoid_kind::rational_add};
    if (name == "monoid-bool")
        return monoid_functor{monoid_kind::bool_or};
    if (name == "dist")
        return dist_functor{};
    if (name == "lmc")
        return lmc_functor{{"a", "b"}};
    if (name == "dfa")
        return dfa_functor{{"a", "b"}};
    if (name == "signature")
        return signature_functor{{{"c", 0}, {"f", 1}, {"g", 2}}};
    throw error("unknown random kind '" + name + "'");
}

// Abstract description of a system before it is handed to the builder:
// per state a head and a list of (slot, target, weight) entries.
struct raw_state
{
    std::uint32_t head = 0;
    std::vector<std::uint8_t> defined;
    struct entry
    {
        std::uint32_t slot;
        state_id target;
        rational w;
    };
    std::vector<entry> out;
};

std::vector<raw_state> random_raw(const functor_kind& kind, std::size_t n, double density, draws& d)
{
    std::vector<raw_state> sys(n);
    const bool is_int = kind.is<monoid_functor>() && kind.as<monoid_functor>().monoid == monoid_kind::int_add;
    const bool is_rat =
        kind.is<monoid_functor>() && kind.as<monoid_functor>().monoid == monoid_kind::rational_add;
    auto distribution = [&](raw_state& s, std::uint32_t slot) {
        std::vector<std::pair<state_id, std::int64_t>> picks;
        for (state_id y = 0; y < n; ++y)
            if (d.chance(density))
                picks.emplace_back(y, d.between(1, 3));
        if (picks.empty())
            picks.emplace_back(static_cast<state_id>(d.below(n)), 1);
        std::int64_t total = 0;
        for (const auto& p : picks)
            total += p.second;
        for (const auto& p : picks)
            s.out.push_back({slot, p.first, rational(p.second, total)});
    };
    for (state_id x = 0; x < n; ++x) {
        auto& s = sys[x];
        if (kind.is<powerset_functor>() || kind.is<monoid_functor>()) {
            for (state_id y = 0; y < n; ++y) {
                if (!d.chance(density))
                    continue;
                rational w = 1;
                if (is_int) {
                    w = d.between(-2, 3);
                    if (w == 0)
                        w = 1;
                } else if (is_rat) {
                    w = rational(d.between(-1, 3), d.between(1, 3));
                    if (w == 0)
                        w = rational(1, 2);
                }
                s.out.push_back({0, y, w});
            }
        } else if (kind.is<dist_functor>()) {
            distribution(s, 0);
        } else if (kind.is<lmc_functor>()) {
            s.defined.assign(kind.alphabet().size(), 0);
            for (std::uint32_t a = 0; a < kind.alphabet().size(); ++a)
                if (d.chance(0.7)) {
                    s.defined[a] = 1;
                    distribution(s, a);
                }
        } else if (kind.is<dfa_functor>()) {
            s.head = d.chance(0.5) ? 1 : 0;
            for (std::uint32_t a = 0; a < kind.alphabet().size(); ++a)
                s.out.push_back({a, static_cast<state_id>(d.below(n)), 1});
        } else {
            s.head = static_cast<std::uint32_t>(d.below(kind.symbol_count()));
            for (std::uint32_t i = 0; i < kind.symbol_arity(s.head); ++i)
                s.out.push_back({i, static_cast<state_id>(d.below(n)), 1});
        }
    }
    return sys;
}

// States 0..h-1 and h..2h-1 are two copies; every entry is redirected to
// either copy of its target or, where the functor allows, split between both.
std::vector<raw_state> mirror(const functor_kind& kind, const std::vector<raw_state>& base, draws& d)
{
    const auto h = static_cast<state_id>(base.size());
    std::vector<raw_state> sys(2 * h);
    const bool splittable = !kind.is<dfa_functor>() && !kind.is<signature_functor>();
    const bool is_int = kind.is<monoid_functor>() && kind.as<monoid_functor>().monoid == monoid_kind::int_add;
    // Powerset and boolean weights are idempotent: both halves keep the entry.
    const bool is_set = kind.is<powerset_functor>() ||
                        (kind.is<monoid_functor>() && kind.as<monoid_functor>().monoid == monoid_kind::bool_or);
    for (state_id copy = 0; copy < 2; ++copy)
        for (state_id x = 0; x < h; ++x) {
            auto& s = sys[copy * h + x];
            s.head = base[x].head;
            s.defined = base[x].defined;
            for (const auto& e : base[x].out) {
                auto choice = d.below(splittable ? 3 : 2);
                if (choice < 2) {
                    s.out.push_back({e.slot, static_cast<state_id>(choice * h + e.target), e.w});
                    continue;
                }
                rational part = e.w;
                rational rest = e.w;
                if (is_int) {
                    part = d.between(-2, 2);
                    rest = e.w - part;
                } else if (!is_set) {
                    part = e.w * rational(static_cast<std::int64_t>(d.between(1, 2)), 3);
                    rest = e.w - part;
                }
                s.out.push_back({e.slot, e.target, part});
                s.out.push_back({e.slot, h + e.target, rest});
            }
        }
    return sys;
}

} // namespace

coalgebra random_coalgebra(const random_spec& spec)
{
    auto kind = kind_named(spec.kind);
    draws d(spec.seed);
    const std::size_t n = std::max<std::size_t>(spec.states, 1);
    std::vector<raw_state> sys;
    if (spec.mirrored && n >= 2) {
        auto base = random_raw(kind, n / 2, spec.density, d);
        sys = mirror(kind, base, d);
    } else {
        sys = random_raw(kind, n, spec.density, d);
    }

    // Shuffle so that the two copies are interleaved in state order.
    std::vector<state_id> order(sys.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[d.below(i)]);
    std::vector<state_id> rename(sys.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        rename[order[i]] = static_cast<state_id>(i);

    coalgebra_builder b(kind);
    for (std::size_t i = 0; i < sys.size(); ++i)
        b.add_state("s" + std::to_string(i));
    const auto m = kind.weight_monoid();
    for (std::size_t old = 0; old < sys.size(); ++old) {
        const auto& s = sys[old];
        const state_id x = rename[old];
        if (kind.is<lmc_functor>())
            for (std::size_t a = 0; a < s.defined.size(); ++a)
                if (s.defined[a])
                    b.define_label(x, a);
        if (kind.is<dfa_functor>())
            b.set_accepting(x, s.head == 1);
        std::vector<state_id> args(kind.is<signature_functor>() ? kind.symbol_arity(s.head) : 0);
        for (const auto& e : s.out) {
            const state_id y = rename[e.target];
            if (kind.is<powerset_functor>()) {
                b.add_successor(x, y);
            } else if (kind.is<lmc_functor>()) {
                b.add_probability(x, e.slot, y, e.w);
            } else if (m) {
                if (*m == monoid_kind::int_add)
                    b.add_weight(x, y, weight(static_cast<std::int64_t>(numerator(e.w))));
                else if (*m == monoid_kind::rational_add)
                    b.add_weight(x, y, weight(e.w));
                else
                    b.add_weight(x, y, weight(true));
            } else if (kind.is<dfa_functor>()) {
                b.set_transition(x, e.slot, y);
            } else {
                args[e.slot] = y;
            }
        }
        if (kind.is<signature_functor>())
            b.set_term(x, s.head, std::move(args));
    }
    return std::move(b).build();
}

} // namespace coalcert
