#include "coalcert/io.hpp"

#include "coalcert/error.hpp"

#include <nlohmann/json.hpp>

namespace coalcert {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why)
{
    throw parse_error(path + ": " + why);
}

const json& field(const json& j, const std::string& name, const std::string& path)
{
    if (!j.is_object() || !j.contains(name))
        fail(path, "missing field '" + name + "'");
    return j[name];
}

std::vector<std::string> string_list(const json& j, const std::string& path)
{
    if (!j.is_array())
        fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string())
            fail(path + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

weight weight_literal(monoid_kind m, const json& j, const std::string& path)
{
    try {
        switch (m) {
        case monoid_kind::int_add:
            if (j.is_number_integer())
                return weight(j.get<std::int64_t>());
            if (j.is_number_unsigned())
                throw arithmetic_error("integer weight out of range");
            if (j.is_string())
                return parse_weight(m, j.get<std::string>());
            break;
        case monoid_kind::rational_add:
            if (j.is_number_integer())
                return weight(rational(j.get<std::int64_t>()));
            if (j.is_string())
                return parse_weight(m, j.get<std::string>());
            break;
        case monoid_kind::bool_or:
            if (j.is_boolean())
                return weight(j.get<bool>());
            if (j.is_number_integer() && (j.get<std::int64_t>() == 0 || j.get<std::int64_t>() == 1))
                return weight(j.get<std::int64_t>() == 1);
            break;
        }
    } catch (const error& e) {
        fail(path, e.what());
    }
    if (j.is_number_float())
        fail(path, "floating point weights are not accepted, use \"p/q\"");
    fail(path, "malformed weight " + j.dump());
}

state_id target_state(const coalgebra_builder&, const std::unordered_map<std::string, state_id>& index,
                      const std::string& name, const std::string& path)
{
    auto it = index.find(name);
    if (it == index.end())
        fail(path, "unknown state '" + name + "'");
    return it->second;
}

} // namespace

functor_kind functor_from_json(const json& j)
{
    const std::string path = "functor";
    if (!j.is_object())
        fail(path, "expected an object");
    const auto& kind = field(j, "kind", path);
    if (!kind.is_string())
        fail(path + ".kind", "expected a string");
    const auto name = kind.get<std::string>();
    try {
        if (name == "powerset")
            return powerset_functor{};
        if (name == "dist")
            return dist_functor{};
        if (name == "monoid") {
            const auto& m = field(j, "monoid", path);
            if (m == "int")
                return monoid_functor{monoid_kind::int_add};
            if (m == "rational")
                return monoid_functor{monoid_kind::rational_add};
            if (m == "bool")
                return monoid_functor{monoid_kind::bool_or};
            fail(path + ".monoid", "expected \"int\", \"rational\" or \"bool\"");
        }
        if (name == "lmc")
            return lmc_functor{string_list(field(j, "alphabet", path), path + ".alphabet")};
        if (name == "dfa")
            return dfa_functor{string_list(field(j, "alphabet", path), path + ".alphabet")};
        if (name == "signature") {
            const auto& symbols = field(j, "symbols", path);
            if (!symbols.is_object())
                fail(path + ".symbols", "expected an object of arities");
            signature_functor f;
            for (const auto& [sym, arity] : symbols.items()) {
                if (!arity.is_number_unsigned())
                    fail(path + ".symbols." + sym, "arity must be a non-negative integer");
                f.symbols.emplace_back(sym, arity.get<unsigned>());
            }
            return f;
        }
    } catch (const model_error& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown functor kind '" + name + "'");
}

json functor_to_json(const functor_kind& kind)
{
    json j;
    if (kind.is<powerset_functor>()) {
        j["kind"] = "powerset";
    } else if (kind.is<monoid_functor>()) {
        j["kind"] = "monoid";
        switch (kind.as<monoid_functor>().monoid) {
        case monoid_kind::int_add: j["monoid"] = "int"; break;
        case monoid_kind::rational_add: j["monoid"] = "rational"; break;
        case monoid_kind::bool_or: j["monoid"] = "bool"; break;
        }
    } else if (kind.is<dist_functor>()) {
        j["kind"] = "dist";
    } else if (kind.is<lmc_functor>()) {
        j["kind"] = "lmc";
        j["alphabet"] = kind.alphabet();
    } else if (kind.is<dfa_functor>()) {
        j["kind"] = "dfa";
        j["alphabet"] = kind.alphabet();
    } else {
        j["kind"] = "signature";
        json symbols = json::object();
        for (const auto& [sym, arity] : kind.as<signature_functor>().symbols)
            symbols[sym] = arity;
        j["symbols"] = symbols;
    }
    return j;
}

coalgebra parse_coalgebra(const json& doc)
{
    if (!doc.is_object())
        fail("$", "expected a JSON object");
    auto kind = functor_from_json(field(doc, "functor", "$"));
    auto names = string_list(field(doc, "states", "$"), "states");
    coalgebra_builder builder(kind);
    std::unordered_map<std::string, state_id> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (index.count(names[i]))
            fail("states[" + std::to_string(i) + "]", "duplicate state '" + names[i] + "'");
        index[names[i]] = builder.add_state(names[i]);
    }

    json edges = doc.contains("edges") ? doc["edges"] : json::object();
    if (!edges.is_object())
        fail("edges", "expected an object keyed by state");

    for (const auto& [from, spec] : edges.items()) {
        const std::string path = "edges." + from;
        auto it = index.find(from);
        if (it == index.end())
            fail(path, "unknown state '" + from + "'");
        const state_id x = it->second;

        if (kind.is<powerset_functor>()) {
            if (!spec.is_array())
                fail(path, "expected an array of successors");
            for (std::size_t i = 0; i < spec.size(); ++i) {
                auto p = path + "[" + std::to_string(i) + "]";
                if (!spec[i].is_string())
                    fail(p, "expected a state name");
                builder.add_successor(x, target_state(builder, index, spec[i].get<std::string>(), p));
            }
        } else if (kind.is<monoid_functor>() || kind.is<dist_functor>()) {
            if (!spec.is_object())
                fail(path, "expected an object of weights");
            for (const auto& [to, w] : spec.items()) {
                auto p = path + "." + to;
                builder.add_weight(x, target_state(builder, index, to, p),
                                   weight_literal(*kind.weight_monoid(), w, p));
            }
        } else if (kind.is<lmc_functor>()) {
            if (!spec.is_object())
                fail(path, "expected an object keyed by label");
            for (const auto& [label, row] : spec.items()) {
                auto p = path + "." + label;
                auto a = kind.label_index(label);
                if (!a)
                    fail(p, "unknown label '" + label + "'");
                if (row.is_null())
                    continue;
                if (!row.is_object())
                    fail(p, "expected an object of probabilities or null");
                builder.define_label(x, *a);
                for (const auto& [to, w] : row.items()) {
                    auto q = p + "." + to;
                    builder.add_probability(x, *a, target_state(builder, index, to, q),
                                            weight_literal(monoid_kind::rational_add, w, q).as_rational());
                }
            }
        } else if (kind.is<dfa_functor>()) {
            const auto& fin = field(spec, "final", path);
            if (!fin.is_boolean())
                fail(path + ".final", "expected a boolean");
            builder.set_accepting(x, fin.get<bool>());
            const auto& next = field(spec, "next", path);
            if (!next.is_object())
                fail(path + ".next", "expected an object keyed by letter");
            for (const auto& [letter, to] : next.items()) {
                auto p = path + ".next." + letter;
                auto a = kind.label_index(letter);
                if (!a)
                    fail(p, "unknown letter '" + letter + "'");
                if (!to.is_string())
                    fail(p, "expected a state name");
                builder.set_transition(x, *a, target_state(builder, index, to.get<std::string>(), p));
            }
        } else {
            const auto& sym = field(spec, "symbol", path);
            if (!sym.is_string())
                fail(path + ".symbol", "expected a string");
            auto s = kind.symbol_index(sym.get<std::string>());
            if (!s)
                fail(path + ".symbol", "unknown symbol '" + sym.get<std::string>() + "'");
            std::vector<state_id> args;
            if (spec.contains("args")) {
                const auto& a = spec["args"];
                if (!a.is_array())
                    fail(path + ".args", "expected an array of states");
                for (std::size_t i = 0; i < a.size(); ++i) {
                    auto p = path + ".args[" + std::to_string(i) + "]";
                    if (!a[i].is_string())
                        fail(p, "expected a state name");
                    args.push_back(target_state(builder, index, a[i].get<std::string>(), p));
                }
            }
            builder.set_term(x, *s, std::move(args));
        }
    }

    try {
        return std::move(builder).build();
    } catch (const model_error& e) {
        fail("edges", e.what());
    } catch (const arithmetic_error& e) {
        fail("edges", e.what());
    }
}

coalgebra parse_coalgebra_text(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    return parse_coalgebra(doc);
}

json coalgebra_to_json(const coalgebra& c)
{
    const auto& kind = c.kind();
    json doc;
    doc["functor"] = functor_to_json(kind);
    doc["states"] = c.names();
    json edges = json::object();
    auto weight_json = [](const weight& w) -> json {
        switch (w.value().index()) {
        case 0: return w.as_int();
        case 1: return format_rational(w.as_rational());
        default: return w.as_bool();
        }
    };
    for (state_id x = 0; x < c.size(); ++x) {
        const auto& name = c.name(x);
        if (kind.is<powerset_functor>()) {
            json succ = json::array();
            for (auto y : c.successors(x))
                succ.push_back(c.name(y));
            edges[name] = succ;
        } else if (kind.is<monoid_functor>() || kind.is<dist_functor>()) {
            json row = json::object();
            for (auto e = c.edge_begin(x); e < c.edge_end(x); ++e)
                row[c.name(c.target(e))] = weight_json(c.edge_weight(e));
            edges[name] = row;
        } else if (kind.is<lmc_functor>()) {
            json rows = json::object();
            for (std::size_t a = 0; a < kind.alphabet().size(); ++a)
                if (c.defined(x, a))
                    rows[kind.alphabet()[a]] = json::object();
            for (auto e = c.edge_begin(x); e < c.edge_end(x); ++e)
                rows[kind.alphabet()[c.slot(e)]][c.name(c.target(e))] = weight_json(c.edge_weight(e));
            edges[name] = rows;
        } else if (kind.is<dfa_functor>()) {
            json next = json::object();
            for (auto e = c.edge_begin(x); e < c.edge_end(x); ++e)
                next[kind.alphabet()[c.slot(e)]] = c.name(c.target(e));
            edges[name] = {{"final", c.head(x) == 1}, {"next", next}};
        } else {
            json args = json::array();
            for (auto y : c.successors(x))
                args.push_back(c.name(y));
            edges[name] = {{"symbol", kind.symbol_name(c.head(x))}, {"args", args}};
        }
    }
    doc["edges"] = edges;
    return doc;
}

} // namespace coalcert
