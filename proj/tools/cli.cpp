#include "cli.hpp"

#include <coalcert/certificates.hpp>
#include <coalcert/domain.hpp>
#include <coalcert/error.hpp>
#include <coalcert/fixtures.hpp>
#include <coalcert/io.hpp>
#include <coalcert/partition.hpp>
#include <coalcert/semantics.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

namespace coalcert::cli {

namespace {

using nlohmann::json;

struct options
{
    std::string mode = "auto";
    std::string logic = "generic";
    std::string format = "text";
    bool simplify = true;
    std::uint64_t seed = 1;
    double tree_limit = 1e6;

    std::string input;
    std::string x;
    std::string y;
    std::string formula;
    std::vector<std::string> states;
    std::string fixture;
    std::vector<std::string> params;
};

class usage_error : public error
{
public:
    using error::error;
};

std::string read_input(const std::string& path, std::istream& in)
{
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream file(path);
    if (!file)
        throw usage_error("cannot open '" + path + "'");
    buf << file.rdbuf();
    return buf.str();
}

mode_request parse_mode(const std::string& m)
{
    if (m == "auto")
        return mode_request::automatic;
    if (m == "general")
        return mode_request::general;
    if (m == "cancellative")
        return mode_request::cancellative;
    throw usage_error("unknown mode '" + m + "'");
}

std::string set_text(const coalgebra& c, const std::vector<state_id>& xs)
{
    std::string s = "{";
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += (i ? ", " : "") + c.name(xs[i]);
    return s + "}";
}

json names_json(const coalgebra& c, const std::vector<state_id>& xs)
{
    json out = json::array();
    for (auto x : xs)
        out.push_back(c.name(x));
    return out;
}

struct session
{
    coalgebra c;
    refinement_result result;
    certified certs;
};

session analyse(const options& opt, std::istream& in)
{
    session s;
    s.c = parse_coalgebra_text(read_input(opt.input, in));
    auto mode = resolve_mode(s.c.kind(), parse_mode(opt.mode));
    s.result = run(s.c, mode);
    s.certs = attach_certificates(s.c, s.result.trace, {mode, opt.simplify, {}});
    return s;
}

// Translation with the size warning; nullopt when the tree would be too
// large to print.
domain_formula translated(const session& s, node_ref root, const options& opt, std::ostream& err,
                          const std::string& what)
{
    auto f = translate(s.c.kind(), s.certs.dag, root);
    auto size = domain_tree_size(f);
    if (size > big_int(static_cast<std::uint64_t>(opt.tree_limit)))
        err << "warning: domain formula for " << what << " has " << size << " nodes\n";
    return f;
}

int cmd_minimize(const options& opt, std::istream& in, std::ostream& out, std::ostream& err)
{
    auto s = analyse(opt, in);
    auto blocks = s.result.blocks();
    if (opt.format == "json") {
        out << json{{"mode", mode_name(s.result.trace.mode)},
                    {"blocks", partition_to_json(s.c, blocks)},
                    {"trace", trace_to_json(s.c, s.result.trace)}}
                   .dump(2)
            << "\n";
    } else if (opt.format == "dot") {
        out << render_dot(s.c, s.certs);
    } else {
        out << blocks.size() << (blocks.size() == 1 ? " block" : " blocks") << "\n";
        for (const auto& b : blocks)
            out << set_text(s.c, b) << "\n";
    }
    (void)err;
    return ok;
}

int self_check(const session& s, std::ostream& err)
{
    auto report = check_certificates(s.c, s.certs);
    if (report.ok())
        return ok;
    err << "certificate self-check failed:\n" << report_to_json(s.c, report).dump(2) << "\n";
    return certificate_failure;
}

int cmd_certificates(const options& opt, std::istream& in, std::ostream& out, std::ostream& err)
{
    auto s = analyse(opt, in);
    if (int rc = self_check(s, err); rc != ok)
        return rc;
    const auto blocks = s.result.blocks();
    const auto& kind = s.c.kind();

    if (opt.format == "dot") {
        out << render_dot(s.c, s.certs);
        return ok;
    }
    if (opt.logic == "generic") {
        if (opt.format == "json") {
            out << certificates_to_json(s.c, s.certs).dump(2) << "\n";
            return ok;
        }
        for (const auto& b : blocks) {
            out << "# " << set_text(s.c, b) << "\n";
            out << render_text(kind, s.certs.dag, s.certs.certificate_of(b.front())) << "\n";
        }
        return ok;
    }

    json formulas = json::object();
    int rc = ok;
    for (const auto& b : blocks) {
        auto f = translated(s, s.certs.certificate_of(b.front()), opt, err, set_text(s.c, b));
        if (members(eval_domain(s.c, f)) != b) {
            err << "translated certificate for " << set_text(s.c, b) << " does not define the block\n";
            rc = certificate_failure;
        }
        if (opt.format == "json")
            formulas[s.c.name(b.front())] = domain_to_json(f);
        else
            out << set_text(s.c, b) << " : " << render_domain(f) << "\n";
    }
    if (opt.format == "json")
        out << json{{"formulas", formulas}}.dump(2) << "\n";
    return rc;
}

int cmd_distinguish(const options& opt, std::istream& in, std::ostream& out, std::ostream& err)
{
    auto s = analyse(opt, in);
    const auto x = s.c.lookup(opt.x);
    const auto y = s.c.lookup(opt.y);
    auto phi = distinguish(s.certs, x, y);
    if (!phi) {
        if (opt.format == "json")
            out << json{{"equivalent", true}}.dump(2) << "\n";
        else
            out << opt.x << " and " << opt.y << " are behaviourally equivalent\n";
        return ok;
    }

    std::string text;
    json ast;
    state_set ext;
    if (opt.logic == "domain") {
        auto f = translated(s, *phi, opt, err, "the distinguishing formula");
        text = render_domain(f);
        ast = domain_to_json(f);
        ext = eval_domain(s.c, f);
    } else {
        text = render_text(s.c.kind(), s.certs.dag, *phi);
        ast = render_text_inline(s.c.kind(), s.certs.dag, *phi);
        ext = eval_formula(s.c, s.certs.dag, *phi);
    }
    const bool at_x = ext[x];
    const bool at_y = ext[y];
    if (opt.format == "json") {
        out << json{{"equivalent", false}, {"formula", ast}, {opt.x, at_x}, {opt.y, at_y}}.dump(2) << "\n";
    } else {
        out << text << "\n";
        out << opt.x << ": " << (at_x ? "true" : "false") << ", " << opt.y << ": " << (at_y ? "true" : "false")
            << "\n";
    }
    if (!at_x || at_y) {
        err << "distinguishing formula failed verification\n";
        return certificate_failure;
    }
    return ok;
}

int cmd_check(const options& opt, std::istream& in, std::ostream& out, std::ostream&)
{
    auto c = parse_coalgebra_text(read_input(opt.input, in));
    auto f = parse_domain(c.kind(), opt.formula);
    auto ext = eval_domain(c, f);
    if (opt.states.empty()) {
        if (opt.format == "json")
            out << json{{"extension", names_json(c, members(ext))}}.dump(2) << "\n";
        else
            out << set_text(c, members(ext)) << "\n";
        return ok;
    }
    json j = json::object();
    for (const auto& name : opt.states) {
        const bool holds = ext[c.lookup(name)];
        if (opt.format == "json")
            j[name] = holds;
        else
            out << name << ": " << (holds ? "true" : "false") << "\n";
    }
    if (opt.format == "json")
        out << j.dump(2) << "\n";
    return ok;
}

std::uint64_t parse_unsigned(const std::string& s, const std::string& what, std::uint64_t limit)
{
    const bool digits = !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
    std::uint64_t v = 0;
    try {
        if (digits)
            v = std::stoull(s);
    } catch (const std::exception&) {
        v = limit + 1;
    }
    if (!digits || v > limit)
        throw usage_error(what + " must be an integer in [0, " + std::to_string(limit) + "], got '" + s + "'");
    return v;
}

int cmd_gen(const options& opt, std::ostream& out)
{
    const auto& p = opt.params;
    auto need = [&](std::size_t count) {
        if (p.size() != count)
            throw usage_error("gen " + opt.fixture + " expects " + std::to_string(count) + " parameter(s)");
    };
    coalgebra c;
    if (opt.fixture == "fig1") {
        need(0);
        c = fixture_fig1();
    } else if (opt.fixture == "fig2") {
        need(0);
        c = fixture_fig2();
    } else if (opt.fixture == "threetower") {
        need(1);
        c = fixture_threetower(static_cast<unsigned>(parse_unsigned(p[0], "k", 1u << 20)));
    } else if (opt.fixture == "layers") {
        need(1);
        c = fixture_layers(static_cast<unsigned>(parse_unsigned(p[0], "k", 1u << 20)));
    } else if (opt.fixture == "random") {
        if (p.size() < 3 || p.size() > 4)
            throw usage_error("gen random expects: kind n density [seed]");
        random_spec spec;
        spec.kind = p[0];
        if (std::find(random_kinds().begin(), random_kinds().end(), spec.kind) == random_kinds().end())
            throw usage_error("unknown random kind '" + spec.kind + "'");
        spec.states = parse_unsigned(p[1], "n", 1u << 24);
        try {
            spec.density = std::stod(p[2]);
        } catch (const std::exception&) {
            throw usage_error("density must be a number, got '" + p[2] + "'");
        }
        if (!(spec.density >= 0.0 && spec.density <= 1.0))
            throw usage_error("density must lie in [0, 1]");
        spec.seed = p.size() == 4 ? parse_unsigned(p[3], "seed", UINT64_MAX) : opt.seed;
        c = random_coalgebra(spec);
    } else {
        throw usage_error("unknown fixture '" + opt.fixture + "'");
    }
    out << coalgebra_to_json(c).dump(2) << "\n";
    return ok;
}

int cmd_stats(const options& opt, std::istream& in, std::ostream& out, std::ostream&)
{
    options unsimplified = opt;
    unsimplified.simplify = false;
    auto s = analyse(unsimplified, in);
    const auto n = s.c.size();
    const auto m = count_transitions(s.c);
    const auto dag = dag_stats(s.certs.dag);
    const auto bound = node_count_bound(n, m);
    json j{{"kind", s.c.kind().name()},
           {"states", n},
           {"transitions", m},
           {"mode", mode_name(s.result.trace.mode)},
           {"blocks", s.result.block_count},
           {"iterations", s.result.stats.iterations},
           {"touchedStates", s.result.stats.touched_states},
           {"maxSplitterOccurrences", s.result.stats.max_splitter_occurrences()},
           {"dagNodes", dag.node_count},
           {"dagHeight", dag.height},
           {"dagLongestPath", dag.longest_path},
           {"nodeBound", bound}};
    if (opt.format == "json") {
        out << j.dump(2) << "\n";
        return ok;
    }
    for (const auto& [k, v] : j.items())
        out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    options opt;
    CLI::App app{"coalcert: coalgebraic minimisation with certificates"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--mode", opt.mode, "auto, general or cancellative")
        ->check(CLI::IsMember({"auto", "general", "cancellative"}));
    app.add_option("--logic", opt.logic, "generic or domain")->check(CLI::IsMember({"generic", "domain"}));
    app.add_option("--format", opt.format, "text, json or dot")->check(CLI::IsMember({"text", "json", "dot"}));
    app.add_flag("--simplify,!--no-simplify", opt.simplify, "shorter beta formulas (default on)");
    app.add_option("--seed", opt.seed, "seed for gen random");
    app.add_option("--tree-limit", opt.tree_limit, "warn when a domain formula exceeds this many nodes");

    auto* minimize = app.add_subcommand("minimize", "print the behavioural equivalence classes");
    minimize->add_option("input", opt.input, "coalgebra JSON file or -")->required();
    auto* certificates = app.add_subcommand("certificates", "print a certificate for every class");
    certificates->add_option("input", opt.input, "coalgebra JSON file or -")->required();
    auto* dist = app.add_subcommand("distinguish", "print a formula true at x and false at y");
    dist->add_option("input", opt.input, "coalgebra JSON file or -")->required();
    dist->add_option("x", opt.x)->required();
    dist->add_option("y", opt.y)->required();
    auto* check = app.add_subcommand("check", "evaluate a domain formula");
    check->add_option("input", opt.input, "coalgebra JSON file or -")->required();
    check->add_option("formula", opt.formula)->required();
    check->add_option("states", opt.states);
    auto* gen = app.add_subcommand("gen", "write a fixture: fig1, fig2, threetower k, layers k, "
                                          "random kind n density [seed]");
    gen->add_option("fixture", opt.fixture)->required();
    gen->add_option("params", opt.params);
    auto* stats = app.add_subcommand("stats", "print size and work statistics");
    stats->add_option("input", opt.input, "coalgebra JSON file or -")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_failure;
    }

    try {
        if (*minimize)
            return cmd_minimize(opt, in, out, err);
        if (*certificates)
            return cmd_certificates(opt, in, out, err);
        if (*dist)
            return cmd_distinguish(opt, in, out, err);
        if (*check)
            return cmd_check(opt, in, out, err);
        if (*gen)
            return cmd_gen(opt, out);
        if (*stats)
            return cmd_stats(opt, in, out, err);
    } catch (const parse_error& e) {
        err << "parse error: " << e.what() << "\n";
        return parse_failure;
    } catch (const model_error& e) {
        err << "parse error: " << e.what() << "\n";
        return parse_failure;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return config_failure;
    }
    return config_failure;
}

} // namespace coalcert::cli
