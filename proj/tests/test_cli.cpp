#include <doctest.h>

#include "cli.hpp"

#include <coalcert/certificates.hpp>
#include <coalcert/domain.hpp>
#include <coalcert/io.hpp>
#include <coalcert/semantics.hpp>

#include <nlohmann/json.hpp>

#include <sstream>

using namespace coalcert;

namespace {

struct result
{
    int code;
    std::string out;
    std::string err;
};

result invoke(std::vector<std::string> args, const std::string& input = "")
{
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string gen(std::vector<std::string> args)
{
    args.insert(args.begin(), "gen");
    auto r = invoke(args);
    REQUIRE(r.code == 0);
    return r.out;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("distinguish and check on the transition system example")
{
    const auto fig1 = gen({"fig1"});
    auto r = invoke({"distinguish", "-", "x", "y"}, fig1);
    CHECK(r.code == 0);
    auto out = lines(r.out);
    REQUIRE(!out.empty());
    CHECK(out.back() == "x: true, y: false");

    r = invoke({"--logic", "domain", "distinguish", "-", "x", "y"}, fig1);
    CHECK(r.code == 0);
    out = lines(r.out);
    REQUIRE(out.size() == 2);
    CHECK(out.back() == "x: true, y: false");
    auto c = parse_coalgebra_text(fig1);
    auto f = eval_domain(c, parse_domain(c.kind(), out.front()));
    CHECK(f.test(c.lookup("x")));
    CHECK_FALSE(f.test(c.lookup("y")));

    r = invoke({"check", "-", "~<> ~<> T", "x", "y"}, fig1);
    CHECK(r.code == 0);
    CHECK(lines(r.out) == std::vector<std::string>{"x: true", "y: false"});

    r = invoke({"distinguish", "-", "x", "x"}, fig1);
    CHECK(r.code == 0);
    CHECK(r.out.find("equivalent") != std::string::npos);

    r = invoke({"check", "-", "T"}, fig1);
    CHECK(r.code == 0);
    CHECK(r.out == "{x, y, x1, z}\n");
}

TEST_CASE("check on the Markov chain example")
{
    const auto fig2 = gen({"fig2"});
    auto r = invoke({"check", "-", "<tau>=1/2 <tau>=1 T", "x", "y"}, fig2);
    CHECK(r.code == 0);
    CHECK(lines(r.out) == std::vector<std::string>{"x: true", "y: false"});

    r = invoke({"--logic", "domain", "distinguish", "-", "x", "y"}, fig2);
    CHECK(r.code == 0);
    CHECK(r.out.find("<tau>=") != std::string::npos);
    CHECK(lines(r.out).back() == "x: true, y: false");
}

TEST_CASE("minimize")
{
    auto r = invoke({"minimize", "-"}, gen({"fig1"}));
    CHECK(r.code == 0);
    CHECK(lines(r.out) == std::vector<std::string>{"3 blocks", "{x}", "{y, x1}", "{z}"});

    r = invoke({"minimize", "-"}, gen({"threetower", "12"}));
    CHECK(r.code == 0);
    CHECK(lines(r.out).front() == "39 blocks");

    r = invoke({"minimize", "-"}, R"({"functor":{"kind":"powerset"},"states":[],"edges":{}})");
    CHECK(r.code == 0);
    CHECK(lines(r.out).front() == "0 blocks");

    r = invoke({"--format", "json", "minimize", "-"}, gen({"fig1"}));
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["blocks"].size() == 3);
    CHECK(j.contains("trace"));

    r = invoke({"--format", "dot", "minimize", "-"}, gen({"fig1"}));
    CHECK(r.code == 0);
    CHECK(r.out.rfind("digraph", 0) == 0);
}

TEST_CASE("certificates")
{
    SUBCASE("domain logic on fig1 gives one formula per block")
    {
        const auto fig1 = gen({"fig1"});
        auto r = invoke({"--logic", "domain", "certificates", "-"}, fig1);
        CHECK(r.code == 0);
        auto c = parse_coalgebra_text(fig1);
        auto out = lines(r.out);
        CHECK(out.size() == 3);
        for (const auto& line : out) {
            auto sep = line.find(" : ");
            REQUIRE(sep != std::string::npos);
            auto ext = eval_domain(c, parse_domain(c.kind(), line.substr(sep + 3)));
            std::string names = "{";
            for (auto x : members(ext))
                names += (names.size() > 1 ? ", " : "") + c.name(x);
            names += "}";
            // Block text lists states in input order; compare as sets.
            auto block = line.substr(0, sep);
            CHECK(block.size() == names.size());
            for (auto x : members(ext))
                CHECK(block.find(c.name(x)) != std::string::npos);
        }
    }
    SUBCASE("one state gives a single nullary modality")
    {
        auto r = invoke({"certificates", "-"}, R"({"functor":{"kind":"powerset"},"states":["s"],"edges":{"s":[]}})");
        CHECK(r.code == 0);
        CHECK(lines(r.out) == std::vector<std::string>{"# {s}", "<{}>"});
    }
    SUBCASE("cancellative layers use only T, conjunction and unary modalities")
    {
        auto r = invoke({"--mode", "cancellative", "--format", "json", "certificates", "-"}, gen({"layers", "8"}));
        CHECK(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["mode"] == "cancellative");
        for (const auto& node : j["nodes"]) {
            CHECK(node["kind"] != "mod3");
            for (const auto& ch : node.value("children", nlohmann::json::array()))
                CHECK_FALSE(ch.value("neg", false));
        }
    }
    SUBCASE("json output reloads")
    {
        const auto text = gen({"random", "lmc", "20", "0.1", "3"});
        auto r = invoke({"--format", "json", "certificates", "-"}, text);
        CHECK(r.code == 0);
        auto c = parse_coalgebra_text(text);
        auto j = nlohmann::json::parse(r.out);
        auto dag = dag_from_json(c.kind(), j);
        for (auto& [name, ref] : j["delta"].items()) {
            node_ref root{ref["node"].get<node_id>(), ref.value("neg", false)};
            CHECK(eval_formula(c, dag, root).test(c.lookup(name)));
        }
    }
}

TEST_CASE("gen is deterministic and follows the definitions")
{
    CHECK(gen({"random", "powerset", "10", "0.3", "42"}) == gen({"random", "powerset", "10", "0.3", "42"}));
    CHECK(gen({"--seed", "5", "random", "dist", "10", "0.3"}) == gen({"random", "dist", "10", "0.3", "5"}));

    auto tower = nlohmann::json::parse(gen({"threetower", "2"}));
    CHECK(tower["states"].size() == 9);
    CHECK(tower["edges"]["x0"] == nlohmann::json::array({"y0"}));
    CHECK(tower["edges"]["y0"] == nlohmann::json::array());
    CHECK(tower["edges"]["z0"] == nlohmann::json::array({"x0"}));

    auto layers = nlohmann::json::parse(gen({"layers", "0"}));
    CHECK(layers["states"] == nlohmann::json::array({"w0", "x0", "y0", "z0"}));
    CHECK(layers["edges"]["w0"]["w0"] == "1");
    CHECK(layers["edges"]["z0"]["z0"] == "4");

    CHECK(invoke({"gen", "threetower"}).code == 2);
    CHECK(invoke({"gen", "layers", "-1"}).code == 2);
    CHECK(invoke({"gen", "nothing"}).code == 2);
    CHECK(invoke({"gen", "random", "bogus", "5", "0.1"}).code == 2);
}

TEST_CASE("exit codes")
{
    const auto fig1 = gen({"fig1"});
    CHECK(invoke({"minimize", "-"}, "{").code == 1);
    CHECK(invoke({"minimize", "-"}, R"({"functor":{"kind":"dist"},"states":["x"],"edges":{"x":{"x":"1/2"}}})").code ==
          1);
    CHECK(invoke({"check", "-", "(T"}, fig1).code == 1);
    CHECK(invoke({"distinguish", "-", "x", "nope"}, fig1).code == 2);
    CHECK(invoke({"--mode", "cancellative", "minimize", "-"}, fig1).code == 2);
    CHECK(invoke({"check", "-", "<3> T"}, fig1).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"--mode", "sideways", "minimize", "-"}, fig1).code == 2);
    CHECK(invoke({"minimize", "/nonexistent/file.json"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("stats")
{
    auto r = invoke({"--format", "json", "stats", "-"}, gen({"threetower", "5"}));
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["states"] == 18);
    CHECK(j["transitions"] == 37);
    CHECK(j["blocks"] == 18);
    CHECK(j["dagNodes"].get<double>() <= j["nodeBound"].get<double>());
}

TEST_CASE("identical runs give identical output")
{
    const auto text = gen({"random", "signature", "30", "0.1", "8"});
    for (const char* cmd : {"minimize", "certificates", "stats"}) {
        auto a = invoke({"--format", "json", cmd, "-"}, text);
        auto b = invoke({"--format", "json", cmd, "-"}, text);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}
