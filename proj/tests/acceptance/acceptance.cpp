// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cli.hpp"
#include "oracles.hpp"

#include <coalcert/certificates.hpp>
#include <coalcert/domain.hpp>
#include <coalcert/io.hpp>
#include <coalcert/partition.hpp>
#include <coalcert/semantics.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace coalcert;
using clock_type = std::chrono::steady_clock;

namespace {

struct outcome
{
    bool pass = true;
    std::string detail;
    std::string first_failure;

    void fail(const std::string& why)
    {
        if (pass)
            first_failure = why;
        pass = false;
    }
};

struct instance
{
    std::string kind;
    std::size_t index;
    coalgebra c;
};

std::vector<instance> build_corpus()
{
    std::vector<instance> out;
    for (const auto& kind : random_kinds()) {
        auto cs = testing::corpus(kind, {.count = 500, .max_states = 50, .max_transitions = 300, .seed = 2024});
        for (std::size_t i = 0; i < cs.size(); ++i)
            out.push_back({kind, i, std::move(cs[i])});
    }
    return out;
}

std::vector<refinement_mode> modes_for(const coalgebra& c)
{
    if (c.kind().cancellative())
        return {refinement_mode::general, refinement_mode::cancellative};
    return {refinement_mode::general};
}

std::string where(const instance& in)
{
    return in.kind + " #" + std::to_string(in.index) + " (n=" + std::to_string(in.c.size()) + ")";
}

double seconds_since(clock_type::time_point start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(const char* format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string cli_output(std::vector<std::string> args, const std::string& input, int& code)
{
    std::istringstream in(input);
    std::ostringstream out, err;
    code = cli::run(args, in, out, err);
    return out.str() + err.str();
}

big_int fib(unsigned k)
{
    big_int a = 0, b = 1;
    for (unsigned i = 0; i < k; ++i) {
        big_int next = a + b;
        a = b;
        b = next;
    }
    return a;
}

bool within_bound(const coalgebra& c, const formula_dag& dag)
{
    auto st = dag_stats(dag);
    return static_cast<double>(st.node_count) <= node_count_bound(c.size(), count_transitions(c)) &&
           st.height <= c.size() + 1;
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

coalgebra scaling_system(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    coalgebra_builder b(powerset_functor{});
    for (std::size_t i = 0; i < n; ++i)
        b.add_state("s" + std::to_string(i));
    std::vector<std::uint64_t> edges;
    while (edges.size() < 4 * n) {
        for (std::size_t i = edges.size(); i < 4 * n; ++i)
            edges.push_back((rng() % n) * n + rng() % n);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    for (auto e : edges)
        b.add_successor(static_cast<state_id>(e / n), static_cast<state_id>(e % n));
    return std::move(b).build();
}

} // namespace

int main()
{
    std::vector<std::pair<std::string, outcome>> results;
    auto report = [&](int number, const std::string& title, outcome o) {
        std::printf("[%s] %2d %s: %s%s\n", o.pass ? "PASS" : "FAIL", number, title.c_str(), o.detail.c_str(),
                    o.pass ? "" : ("; first failure: " + o.first_failure).c_str());
        std::fflush(stdout);
        results.emplace_back(title, std::move(o));
    };

    auto t0 = clock_type::now();
    const auto corpus = build_corpus();
    std::size_t max_m = 0, max_n = 0;
    for (const auto& in : corpus) {
        max_m = std::max(max_m, count_transitions(in.c));
        max_n = std::max(max_n, in.c.size());
    }
    std::printf("corpus: %zu instances, %zu kinds, n <= %zu, m <= %zu, built in %.2f s\n", corpus.size(),
                random_kinds().size(), max_n, max_m, seconds_since(t0));

    // Runs shared by several criteria.
    struct runs
    {
        refinement_result general;
        std::optional<refinement_result> cancellative;
    };
    std::vector<runs> partitions;
    partitions.reserve(corpus.size());

    {
        outcome o;
        auto start = clock_type::now();
        std::size_t compared = 0;
        std::map<std::string, std::size_t> nontrivial;
        for (const auto& in : corpus) {
            const auto expected = naive_partition(in.c);
            runs r{run(in.c, refinement_mode::general), std::nullopt};
            ++compared;
            if (r.general.blocks() != expected)
                o.fail("general partition differs from oracle on " + where(in));
            if (in.c.kind().cancellative()) {
                r.cancellative = run(in.c, refinement_mode::cancellative);
                ++compared;
                if (r.cancellative->blocks() != expected)
                    o.fail("cancellative partition differs from oracle on " + where(in));
            }
            if (expected.size() < in.c.size())
                ++nontrivial[in.kind];
            partitions.push_back(std::move(r));
        }
        const double secs = seconds_since(start);
        if (secs >= 60)
            o.fail("took " + fmt("%.1f", secs) + " s");
        std::size_t min_nontrivial = corpus.size();
        for (const auto& kind : random_kinds())
            min_nontrivial = std::min(min_nontrivial, nontrivial[kind]);
        o.detail = std::to_string(corpus.size() / random_kinds().size()) + " instances per kind, " +
                   std::to_string(compared) + " runs agree with the naive oracle, at least " +
                   std::to_string(min_nontrivial) + " per kind with merged states, " + fmt("%.2f s", secs);
        report(1, "oracle equivalence", o);
    }

    {
        outcome o;
        auto start = clock_type::now();
        std::size_t checked = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& in = corpus[i];
            for (bool simplify : {false, true}) {
                auto g = attach_certificates(in.c, partitions[i].general.trace,
                                             {.mode = refinement_mode::general, .simplify = simplify});
                ++checked;
                if (!check_certificates(in.c, g).ok())
                    o.fail("general certificates wrong on " + where(in));
                if (partitions[i].cancellative) {
                    auto k = attach_certificates(in.c, partitions[i].cancellative->trace,
                                                 {.mode = refinement_mode::cancellative, .simplify = simplify});
                    ++checked;
                    if (!check_certificates(in.c, k).ok())
                        o.fail("cancellative certificates wrong on " + where(in));
                }
            }
        }
        o.detail = std::to_string(checked) + " certificate sets with zero violations, " +
                   fmt("%.2f s", seconds_since(start));
        report(2, "certificate soundness", o);
    }

    {
        outcome o;
        int code = 0;
        const auto fig1 = cli_output({"gen", "fig1"}, "", code);
        auto dist = cli_output({"distinguish", "-", "x", "y"}, fig1, code);
        if (code != 0 || dist.find("x: true, y: false") == std::string::npos)
            o.fail("distinguish printed: " + dist);
        // Independent re-check of the emitted formula in the domain logic.
        auto dom = cli_output({"--logic", "domain", "distinguish", "-", "x", "y"}, fig1, code);
        auto c = parse_coalgebra_text(fig1);
        auto formula = dom.substr(0, dom.find('\n'));
        auto ext = eval_domain(c, parse_domain(c.kind(), formula));
        if (code != 0 || !ext.test(c.lookup("x")) || ext.test(c.lookup("y")))
            o.fail("domain formula does not separate x from y: " + formula);
        auto check = cli_output({"check", "-", "~<> ~<> T", "x", "y"}, fig1, code);
        if (code != 0 || check != "x: true\ny: false\n")
            o.fail("check printed: " + check);
        o.detail = "distinguish gives " + formula + "; check \"~<> ~<> T\" x y gives x: true, y: false";
        report(3, "transition system example", o);
    }

    {
        outcome o;
        int code = 0;
        const auto fig2 = cli_output({"gen", "fig2"}, "", code);
        auto check = cli_output({"check", "-", "<tau>=1/2 <tau>=1 T", "x", "y"}, fig2, code);
        if (code != 0 || check != "x: true\ny: false\n")
            o.fail("check printed: " + check);
        o.detail = "check \"<tau>=1/2 <tau>=1 T\" x y gives x: true, y: false";
        report(4, "Markov chain example", o);
    }

    {
        outcome o;
        std::size_t checked = 0;
        double worst_ratio = 0;
        std::size_t worst_height_gap = SIZE_MAX;
        auto check_one = [&](const coalgebra& c, const refinement_result& r, const std::string& what) {
            auto certs = attach_certificates(c, r.trace, {.mode = r.trace.mode, .simplify = false});
            auto st = dag_stats(certs.dag);
            const double bound = node_count_bound(c.size(), count_transitions(c));
            ++checked;
            if (c.size() > 0)
                worst_ratio = std::max(worst_ratio, static_cast<double>(st.node_count) / bound);
            worst_height_gap = std::min(worst_height_gap, c.size() + 1 - std::min(st.height, c.size() + 1));
            if (static_cast<double>(st.node_count) > bound)
                o.fail(what + ": " + std::to_string(st.node_count) + " nodes > " + fmt("%.1f", bound));
            if (st.height > c.size() + 1)
                o.fail(what + ": height " + std::to_string(st.height) + " > n + 1");
        };
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            check_one(corpus[i].c, partitions[i].general, where(corpus[i]) + " general");
            if (partitions[i].cancellative)
                check_one(corpus[i].c, *partitions[i].cancellative, where(corpus[i]) + " cancellative");
        }
        std::vector<std::pair<std::string, coalgebra>> fixtures;
        fixtures.emplace_back("fig1", fixture_fig1());
        fixtures.emplace_back("fig2", fixture_fig2());
        for (unsigned k = 0; k <= 15; ++k) {
            fixtures.emplace_back("threetower " + std::to_string(k), fixture_threetower(k));
            fixtures.emplace_back("layers " + std::to_string(k), fixture_layers(k));
        }
        for (const auto& [name, c] : fixtures)
            for (auto mode : modes_for(c))
                check_one(c, run(c, mode), name + " " + mode_name(mode));
        o.detail = std::to_string(checked) + " dags, largest node count / bound = " + fmt("%.3f", worst_ratio);
        report(5, "dag size bound", o);
    }

    {
        outcome o;
        auto start = clock_type::now();
        std::string sizes;
        for (unsigned k = 5; k <= 15; ++k) {
            auto c = fixture_threetower(k);
            auto r = run(c, refinement_mode::general);
            auto certs = attach_certificates(c, r.trace, {.mode = refinement_mode::general});
            auto size = tree_size(certs.dag, certs.certificate_of(c.lookup("x" + std::to_string(k))));
            if (size < fib(k))
                o.fail("k=" + std::to_string(k) + ": tree size " + size.str() + " < fib " + fib(k).str());
            if (!within_bound(c, certs.dag))
                o.fail("k=" + std::to_string(k) + ": dag outside the size bound");
            if (k == 5 || k == 10 || k == 15)
                sizes += (sizes.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + ": " + size.str() +
                         " >= " + fib(k).str();
        }
        const double secs = seconds_since(start);
        if (secs >= 5)
            o.fail("took " + fmt("%.2f", secs) + " s");
        o.detail = "tree size of x_k certificate vs fib(k): " + sizes + ", " + fmt("%.2f s", secs);
        report(6, "Fibonacci lower bound", o);
    }

    {
        outcome o;
        std::string sizes;
        for (unsigned k = 5; k <= 15; ++k) {
            auto c = fixture_layers(k);
            auto r = run(c, refinement_mode::cancellative);
            auto certs = attach_certificates(c, r.trace, {.mode = refinement_mode::cancellative});
            const big_int bound = big_int(1) << k;
            big_int smallest = -1;
            for (const char* letter : {"w", "x", "y", "z"}) {
                auto size = tree_size(certs.dag, certs.certificate_of(c.lookup(letter + std::to_string(k))));
                if (smallest < 0 || size < smallest)
                    smallest = size;
            }
            if (smallest < bound)
                o.fail("k=" + std::to_string(k) + ": smallest layer certificate " + smallest.str() + " < 2^k");
            if (!within_bound(c, certs.dag))
                o.fail("k=" + std::to_string(k) + ": dag outside the size bound");
            if (k == 5 || k == 10 || k == 15)
                sizes += (sizes.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + ": " + smallest.str() +
                         " >= " + bound.str();
        }
        o.detail = "smallest layer-k certificate tree size vs 2^k: " + sizes;
        report(7, "exponential weighted layers", o);
    }

    {
        outcome o;
        std::size_t dags = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (!partitions[i].cancellative)
                continue;
            for (bool simplify : {false, true}) {
                auto certs = attach_certificates(corpus[i].c, partitions[i].cancellative->trace,
                                                 {.mode = refinement_mode::cancellative, .simplify = simplify});
                ++dags;
                for (const auto& node : certs.dag.nodes()) {
                    if (node.kind == node_kind::mod3)
                        o.fail("ternary modality on " + where(corpus[i]));
                    for (const auto& ch : node.children)
                        if (ch.negated)
                            o.fail("negation on " + where(corpus[i]));
                }
                for (const auto& d : certs.map.delta)
                    if (d.negated)
                        o.fail("negated certificate on " + where(corpus[i]));
            }
        }
        o.detail = std::to_string(dags) + " cancellative dags without negation or ternary modalities";
        report(8, "cancellative syntax", o);
    }

    {
        outcome o;
        auto start = clock_type::now();
        std::vector<double> times;
        std::vector<double> touched;
        std::string table;
        // Sizes are interleaved within each repetition so that drift in
        // machine load spreads over all sizes instead of biasing one.
        constexpr unsigned lo = 10, hi = 14, reps = 5;
        std::vector<coalgebra> systems;
        for (unsigned e = lo; e <= hi; ++e)
            systems.push_back(scaling_system(std::size_t{1} << e, 1000 + e));
        std::vector<std::vector<double>> samples(systems.size());
        std::vector<std::uint64_t> work(systems.size(), 0);
        auto measure = [&](std::size_t i) {
            const auto& c = systems[i];
            auto s = clock_type::now();
            auto r = run(c, refinement_mode::general);
            auto certs = attach_certificates(c, r.trace, {.mode = refinement_mode::general, .simplify = true});
            const double secs = seconds_since(s);
            work[i] = r.stats.touched_states;
            if (certs.map.delta.size() != r.block_count)
                o.fail("certificate count mismatch at n=" + std::to_string(c.size()));
            return secs;
        };
        for (int warm = 0; warm < 2; ++warm)
            for (std::size_t i = 0; i < systems.size(); ++i)
                (void)measure(i);
        for (unsigned rep = 0; rep < reps; ++rep)
            for (std::size_t i = 0; i < systems.size(); ++i)
                samples[i].push_back(measure(i));
        for (std::size_t i = 0; i < systems.size(); ++i) {
            std::sort(samples[i].begin(), samples[i].end());
            times.push_back(samples[i][reps / 2]);
            touched.push_back(static_cast<double>(work[i]));
            table += (table.empty() ? "" : ", ") + std::string("2^") + std::to_string(lo + i) + ": " +
                     fmt("%.1f ms", samples[i][reps / 2] * 1e3) + "/" + std::to_string(work[i]);
        }
        double worst_time = 0, worst_touched = 0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double tr = times[i] / times[i - 1];
            const double wr = touched[i] / touched[i - 1];
            worst_time = std::max(worst_time, tr);
            worst_touched = std::max(worst_touched, wr);
            if (tr > 2.6)
                o.fail("time ratio " + fmt("%.2f", tr) + " at doubling " + std::to_string(i));
            if (wr > 2.3)
                o.fail("touched ratio " + fmt("%.2f", wr) + " at doubling " + std::to_string(i));
        }
        const double secs = seconds_since(start);
        if (secs >= 120)
            o.fail("took " + fmt("%.1f", secs) + " s");
        o.detail = "median time/touched " + table + "; worst ratios " + fmt("%.2f", worst_time) + " (time), " +
                   fmt("%.2f", worst_touched) + " (touched), " + fmt("%.1f s", secs);
        report(9, "quasilinear scaling", o);
    }

    {
        outcome o;
        std::size_t blocks = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& in = corpus[i];
            if (in.c.size() > 30)
                continue;
            std::vector<const refinement_result*> rs{&partitions[i].general};
            if (partitions[i].cancellative)
                rs.push_back(&*partitions[i].cancellative);
            for (const auto* r : rs)
                for (bool simplify : {false, true}) {
                    auto certs = attach_certificates(in.c, r->trace, {.mode = r->trace.mode, .simplify = simplify});
                    for (const auto& block : r->blocks()) {
                        ++blocks;
                        auto f = translate(in.c.kind(), certs.dag, certs.certificate_of(block.front()));
                        if (members(eval_domain(in.c, f)) != block)
                            o.fail("translated certificate wrong on " + where(in));
                    }
                }
        }
        o.detail = std::to_string(blocks) + " translated block certificates define exactly their block";
        report(10, "translation soundness", o);
    }

    {
        outcome o;
        using df = domain_formula;
        std::mt19937_64 rng(77);
        std::size_t compared = 0;
        const functor_kind pow(powerset_functor{});
        for (const auto& c : testing::corpus("powerset", {.count = 200, .max_states = 10, .seed = 404})) {
            auto r = run(c, refinement_mode::general);
            auto certs = attach_certificates(c, r.trace, {});
            for (int round = 0; round < 5; ++round) {
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
                const df phi[3] = {df::negation(b), df::conjunction({b, df::negation(d)}),
                                   df::conjunction({d, b})};
                for (std::uint8_t t = 0; t < 8; ++t) {
                    std::vector<df> parts;
                    for (int i = 0; i < 3; ++i)
                        parts.push_back(t >> i & 1 ? df::diamond(phi[i]) : df::negation(df::diamond(phi[i])));
                    auto node = certs.dag.add_mod3(key(3, color_set{t}), delta, beta);
                    formula_evaluator eval(c, certs.dag);
                    ++compared;
                    if (eval.extension(node) != eval_domain(c, df::conjunction(parts)))
                        o.fail("modality " + render_key(pow, key(3, color_set{t})) + " differs");
                    if (!eval.contract_violations().empty())
                        o.fail("delta not contained in beta");
                }
            }
        }
        o.detail = std::to_string(compared) + " comparisons over all 8 keys, n <= 10";
        report(11, "powerset modality expansion", o);
    }

    {
        outcome o;
        std::uint32_t worst_gap = UINT32_MAX;
        std::size_t runs_checked = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto bound = static_cast<std::uint32_t>(std::bit_width(corpus[i].c.size()));
            std::vector<const refinement_result*> rs{&partitions[i].general};
            if (partitions[i].cancellative)
                rs.push_back(&*partitions[i].cancellative);
            for (const auto* r : rs) {
                ++runs_checked;
                auto occ = r->stats.max_splitter_occurrences();
                if (occ > bound)
                    o.fail(where(corpus[i]) + ": a state was in " + std::to_string(occ) + " splitters");
                worst_gap = std::min(worst_gap, bound - std::min(bound, occ));
            }
        }
        o.detail = std::to_string(runs_checked) + " runs, every state in at most floor(log2 n) + 1 splitters";
        report(12, "half-size discipline", o);
    }

    std::size_t passed = 0;
    for (const auto& [title, o] : results)
        passed += o.pass;
    std::printf("%zu/%zu criteria passed in %.1f s\n", passed, results.size(), seconds_since(t0));
    return passed == results.size() ? 0 : 1;
}
