#include <doctest.h>

#include "oracles.hpp"

#include <coalcert/certificates.hpp>
#include <coalcert/domain.hpp>
#include <coalcert/error.hpp>
#include <coalcert/partition.hpp>
#include <coalcert/semantics.hpp>

#include <nlohmann/json.hpp>

#include <random>
#include <set>

using namespace coalcert;
using df = domain_formula;

namespace {

std::vector<refinement_mode> modes_for(const coalgebra& c)
{
    if (c.kind().cancellative())
        return {refinement_mode::general, refinement_mode::cancellative};
    return {refinement_mode::general};
}

// A dag formula for a union of final blocks, via De Morgan.
node_ref union_of(formula_dag& dag, const certified& certs, const std::vector<block_id>& blocks)
{
    node_ref acc{0, true};
    for (auto b : blocks) {
        auto neg = certs.map.delta[b];
        neg.negated = !neg.negated;
        auto both = dag.add_conj(node_ref{acc.node, !acc.negated}, neg);
        acc = node_ref{both.node, true};
    }
    return acc;
}

// Modal nodes translate to formulas that agree with the generic
// modality on every state of the class the modality is used in: the
// F chi_{1,2} class of t for ternary and the F! class of s for unary ones.
void check_modal_nodes(const coalgebra& c, const certified& certs)
{
    formula_evaluator eval(c, certs.dag);
    const auto n = c.size();
    for (node_id id = 1; id < certs.dag.size(); ++id) {
        const auto& node = certs.dag.node(id);
        if (node.kind == node_kind::conj)
            continue;
        const auto generic = eval.extension(id);
        const auto domain = eval_domain(c, translate(c.kind(), certs.dag, {id, false}));
        std::vector<std::uint8_t> col(n, 0);
        if (node.kind == node_kind::mod3) {
            auto d = eval.extension(node.children[0]);
            auto b = eval.extension(node.children[1]);
            for (state_id y = 0; y < n; ++y)
                col[y] = b.test(y) ? (d.test(y) ? 2 : 1) : 0;
        } else if (node.kind == node_kind::mod2) {
            auto d = eval.extension(node.children[0]);
            for (state_id y = 0; y < n; ++y)
                col[y] = d.test(y);
        }
        for (state_id x = 0; x < n; ++x) {
            bool in_class = true;
            if (node.kind == node_kind::mod3)
                in_class = restrict_to_outer(eval3(c, x, col)) == restrict_to_outer(*node.k);
            else if (node.kind == node_kind::mod2)
                in_class = eval1(c, x) == collapse(*node.k);
            if (in_class)
                CHECK(domain.test(x) == generic.test(x));
        }
    }
}

} // namespace

TEST_CASE("translated certificates define the same blocks")
{
    for (const auto& kind : random_kinds()) {
        CAPTURE(kind);
        for (const auto& c : testing::corpus(kind, {.count = 30, .max_states = 30, .seed = 121}))
            for (auto mode : modes_for(c))
                for (bool simplify : {false, true}) {
                    auto r = run(c, mode);
                    auto certs = attach_certificates(c, r.trace, {.mode = mode, .simplify = simplify});
                    const auto blocks = r.blocks();
                    for (const auto& block : blocks) {
                        auto ext = eval_domain(c, translate(c.kind(), certs.dag, certs.certificate_of(block.front())));
                        CHECK(members(ext) == block);
                    }
                    check_modal_nodes(c, certs);
                }
    }
}

TEST_CASE("nullary modalities hold exactly at their F1 value")
{
    for (const auto& kind : random_kinds())
        for (const auto& c : testing::corpus(kind, {.count = 15, .max_states = 20, .seed = 131})) {
            std::vector<key> values;
            for (state_id x = 0; x < c.size(); ++x)
                if (std::find(values.begin(), values.end(), eval1(c, x)) == values.end())
                    values.push_back(eval1(c, x));
            for (const auto& o : values) {
                auto ext = eval_domain(c, domain_tau(c.kind(), o));
                for (state_id x = 0; x < c.size(); ++x)
                    CHECK(ext.test(x) == (eval1(c, x) == o));
            }
        }
}

TEST_CASE("kappa agrees with lambda on the j2 embedding")
{
    std::mt19937_64 rng(3);
    for (const auto& kind : random_kinds())
        for (const auto& c : testing::corpus(kind, {.count = 15, .max_states = 20, .seed = 141})) {
            if (!c.kind().cancellative())
                continue;
            auto r = run(c, refinement_mode::cancellative);
            auto certs = attach_certificates(c, r.trace, {.mode = refinement_mode::cancellative});
            std::vector<block_id> pick;
            for (block_id b = 0; b < r.block_count; ++b)
                if (rng() % 2)
                    pick.push_back(b);
            formula_dag& dag = certs.dag;
            auto d = union_of(dag, certs, pick);
            auto delta = translate(c.kind(), dag, d);
            auto member = eval_formula(c, dag, d);
            std::vector<std::uint8_t> m(c.size());
            for (state_id y = 0; y < c.size(); ++y)
                m[y] = member.test(y);
            for (state_id x = 0; x < c.size(); ++x) {
                auto s = eval2(c, x, m);
                auto kappa = eval_domain(c, domain_kappa(c.kind(), s, delta));
                auto lambda = eval_domain(c, domain_lambda(c.kind(), embed_level2(s), delta, df::negation(delta)));
                CHECK(kappa == lambda);
                CHECK(kappa.test(x));
                // Mod2 node versus its j2-embedded ternary node.
                auto mod2 = dag.add_mod2(s, d);
                auto mod3 = dag.add_mod3(embed_level2(s), d, formula_dag::top());
                CHECK(eval_domain(c, translate(c.kind(), dag, mod2)) ==
                      eval_domain(c, translate(c.kind(), dag, mod3)));
            }
        }
}

TEST_CASE("powerset ternary modalities expand into diamonds")
{
    std::mt19937_64 rng(19);
    const functor_kind pow(powerset_functor{});
    std::size_t compared = 0;
    for (const auto& c : testing::corpus("powerset", {.count = 60, .max_states = 10, .seed = 151})) {
        auto r = run(c, refinement_mode::general);
        auto certs = attach_certificates(c, r.trace, {});
        for (int round = 0; round < 4; ++round) {
            std::vector<block_id> in_beta, in_delta;
            for (block_id b = 0; b < r.block_count; ++b)
                if (rng() % 3 != 0) {
                    in_beta.push_back(b);
                    if (rng() % 2)
                        in_delta.push_back(b);
                }
            auto beta = union_of(certs.dag, certs, in_beta);
            auto delta = union_of(certs.dag, certs, in_delta);
            auto d = translate(pow, certs.dag, delta);
            auto b = translate(pow, certs.dag, beta);
            const df phi[3] = {df::negation(b), df::conjunction({b, df::negation(d)}), df::conjunction({d, b})};
            for (std::uint8_t t = 0; t < 8; ++t) {
                std::vector<df> parts;
                for (int i = 0; i < 3; ++i)
                    parts.push_back(t >> i & 1 ? df::diamond(phi[i]) : df::negation(df::diamond(phi[i])));
                auto node = certs.dag.add_mod3(key(3, color_set{t}), delta, beta);
                formula_evaluator eval(c, certs.dag);
                CHECK(eval.extension(node) == eval_domain(c, df::conjunction(parts)));
                CHECK(eval.contract_violations().empty());
                ++compared;
            }
        }
    }
    CHECK(compared == 60 * 4 * 8);
}

TEST_CASE("example formulas")
{
    auto fig1 = fixture_fig1();
    auto box_diamond = parse_domain(fig1.kind(), "~<> ~<> T");
    CHECK(box_diamond == df::negation(df::diamond(df::negation(df::diamond(df::truth())))));
    auto ext = eval_domain(fig1, box_diamond);
    CHECK(ext.test(fig1.lookup("x")));
    CHECK_FALSE(ext.test(fig1.lookup("y")));
    CHECK(members(eval_domain(fig1, parse_domain(fig1.kind(), "<> T"))).size() == 3);

    auto fig2 = fixture_fig2();
    auto f = parse_domain(fig2.kind(), "<tau>=1/2 <tau>=1 T");
    CHECK(f == df::prob_at_least("tau", rational(1, 2), df::prob_at_least("tau", rational(1), df::truth())));
    auto e2 = eval_domain(fig2, f);
    CHECK(e2.test(fig2.lookup("x")));
    CHECK_FALSE(e2.test(fig2.lookup("y")));
    CHECK(eval_domain(fig2, parse_domain(fig2.kind(), "<tau>=0 ~T")).count() == fig2.size());

    const functor_kind ints(monoid_functor{monoid_kind::int_add});
    CHECK(parse_domain(ints, "<3> T") == df::grade(weight(std::int64_t{3}), df::truth()));

    auto r = run(fig1, refinement_mode::general);
    auto certs = attach_certificates(fig1, r.trace, {.simplify = true});
    for (state_id x = 0; x < fig1.size(); ++x) {
        auto block = eval_domain(fig1, translate(fig1.kind(), certs.dag, certs.certificate_of(x)));
        for (state_id y = 0; y < fig1.size(); ++y)
            CHECK(block.test(y) == (r.block_of[x] == r.block_of[y]));
    }
}

TEST_CASE("signature and dfa position modalities")
{
    const functor_kind sig(signature_functor{{{"c", 0}, {"f", 2}}});
    coalgebra_builder b(sig);
    auto leaf = b.add_state("leaf");
    auto node = b.add_state("node");
    b.set_term(leaf, *sig.symbol_index("c"), {});
    b.set_term(node, *sig.symbol_index("f"), {leaf, node});
    auto c = std::move(b).build();
    auto ext = [&](const char* text) { return members(eval_domain(c, parse_domain(sig, text))); };
    CHECK(ext("sym(c)") == std::vector<state_id>{leaf});
    CHECK(ext("pos{1} sym(c)") == std::vector<state_id>{node});
    CHECK(ext("pos{1,2} sym(f)").empty());
    CHECK(ext("pos{2} sym(f)") == std::vector<state_id>{node});
    // Positions beyond the arity never hold.
    CHECK(ext("pos{3} T").empty());
    CHECK(ext("pos{} T") == std::vector<state_id>{leaf});

    auto dfa = random_coalgebra({.kind = "dfa", .states = 6, .seed = 4});
    auto finals = members(eval_domain(dfa, parse_domain(dfa.kind(), "sym(final)")));
    for (state_id x = 0; x < dfa.size(); ++x)
        CHECK((std::find(finals.begin(), finals.end(), x) != finals.end()) == (dfa.head(x) == 1));
}

TEST_CASE("parse and render round-trip")
{
    const std::vector<std::pair<functor_kind, std::vector<std::string>>> cases{
        {powerset_functor{}, {"T", "~<> ~<> T", "<> T /\\ ~<> (T \\/ ~T)", "((<> T))"}},
        {monoid_functor{monoid_kind::int_add}, {"<3> T", "<-2> (<0> T /\\ T)"}},
        {monoid_functor{monoid_kind::rational_add}, {"<1/2> T", "<3> <-4/6> T"}},
        {monoid_functor{monoid_kind::bool_or}, {"<true> T", "<false> ~T"}},
        {dist_functor{}, {"<1/3> T \\/ <1> ~T"}},
        {lmc_functor{{"a", "b"}}, {"<a>=1/2 <b>=1 T", "~<b>=0 T"}},
        {dfa_functor{{"a", "b"}}, {"sym(final) /\\ pos{1} sym(nonfinal)"}},
        {signature_functor{{{"f", 2}, {"c", 0}}}, {"sym(f) /\\ pos{2} sym(c)", "pos{1,2} T"}},
    };
    for (const auto& [kind, texts] : cases)
        for (const auto& text : texts) {
            CAPTURE(text);
            auto f = parse_domain(kind, text);
            auto again = parse_domain(kind, render_domain(f));
            CHECK(again == f);
            CHECK(render_domain(again) == render_domain(f));
            CHECK(domain_to_json(f) == domain_to_json(again));
        }
}

TEST_CASE("syntax and kind errors")
{
    const functor_kind pow(powerset_functor{});
    const functor_kind dist(dist_functor{});
    const functor_kind lmc(lmc_functor{{"a"}});
    const functor_kind sig(signature_functor{{{"f", 1}}});
    for (const char* bad : {"", "(T", "T /\\", "~", "<> ", "T T", "<>T)"})
        CHECK_THROWS_AS((void)parse_domain(pow, bad), parse_error);
    CHECK_THROWS_AS((void)parse_domain(dist, "<> T"), kind_mismatch_error);
    CHECK_THROWS_AS((void)parse_domain(pow, "sym(f)"), kind_mismatch_error);
    CHECK_THROWS_AS((void)parse_domain(pow, "<3> T"), kind_mismatch_error);
    CHECK_THROWS_AS((void)parse_domain(sig, "sym(g)"), kind_mismatch_error);
    CHECK_THROWS_AS((void)parse_domain(lmc, "<b>=1/2 T"), kind_mismatch_error);
    CHECK_THROWS((void)parse_domain(lmc, "<a>=3/2 T"));
    CHECK_THROWS_AS((void)parse_domain(dist, "<x> T"), parse_error);
    auto c = fixture_fig1();
    CHECK_THROWS_AS((void)eval_domain(c, df::grade(weight(std::int64_t{1}), df::truth())), kind_mismatch_error);
}

TEST_CASE("lmc translation grows the shared size by at most 4|A|")
{
    auto generic_size = [](const formula_dag& dag, node_ref root) {
        std::set<node_id> nodes;
        std::set<node_id> negated;
        std::vector<node_ref> stack{root};
        while (!stack.empty()) {
            auto r = stack.back();
            stack.pop_back();
            if (r.negated)
                negated.insert(r.node);
            if (!nodes.insert(r.node).second)
                continue;
            for (const auto& ch : dag.node(r.node).children)
                stack.push_back(ch);
        }
        return nodes.size() + negated.size();
    };
    for (const auto& c : testing::corpus("lmc", {.count = 40, .max_states = 30, .seed = 161}))
        for (auto mode : modes_for(c)) {
            auto r = run(c, mode);
            auto certs = attach_certificates(c, r.trace, {.mode = mode});
            const auto labels = c.kind().alphabet().size();
            for (const auto& d : certs.map.delta) {
                auto domain = domain_node_count(translate(c.kind(), certs.dag, d));
                CHECK(domain <= 4 * labels * generic_size(certs.dag, d));
            }
        }
}
