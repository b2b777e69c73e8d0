#include "coalcert/key.hpp"

#include "coalcert/error.hpp"

#include <nlohmann/json.hpp>

namespace coalcert {

namespace {

std::vector<weight> map_weights(const std::vector<weight>& parts, std::span<const std::uint8_t> f,
                                unsigned target_level)
{
    std::vector<weight> out(target_level, weight::zero(parts.front().monoid()));
    for (std::size_t c = 0; c < parts.size(); ++c)
        out[f[c]] += parts[c];
    return out;
}

std::string render_weights(const std::vector<weight>& parts)
{
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            s += ",";
        s += parts[i].to_string();
    }
    return s + ")";
}

nlohmann::json weight_to_json(const weight& w)
{
    switch (w.value().index()) {
    case 0: return w.as_int();
    case 1: return format_rational(w.as_rational());
    default: return w.as_bool();
    }
}

weight weight_from_json(monoid_kind m, const nlohmann::json& j)
{
    switch (m) {
    case monoid_kind::int_add:
        if (!j.is_number_integer())
            throw parse_error("expected integer weight in key");
        return weight(j.get<std::int64_t>());
    case monoid_kind::rational_add:
        if (j.is_number_integer())
            return weight(rational(j.get<std::int64_t>()));
        if (!j.is_string())
            throw parse_error("expected rational weight in key");
        return weight(parse_rational(j.get<std::string>()));
    case monoid_kind::bool_or:
        if (!j.is_boolean())
            throw parse_error("expected boolean weight in key");
        return weight(j.get<bool>());
    }
    return {};
}

std::vector<weight> weights_from_json(monoid_kind m, unsigned level, const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != level)
        throw parse_error("key weight vector has wrong length");
    std::vector<weight> out;
    for (const auto& e : j)
        out.push_back(weight_from_json(m, e));
    return out;
}

const std::uint8_t to_two[] = {2};
const std::uint8_t shift_up[] = {1, 2};
const std::uint8_t outer[] = {0, 1, 1};
const std::uint8_t inner[] = {0, 0, 1};
const std::uint8_t all_zero[] = {0, 0, 0};

} // namespace

std::size_t key::hash() const
{
    std::size_t seed = level_ * 31 + payload_.index();
    struct visitor
    {
        std::size_t& seed;
        void operator()(const color_set& p) const { hash_combine(seed, p.mask); }
        void operator()(const weight_vector& p) const
        {
            for (const auto& w : p.by_color)
                hash_combine(seed, w.hash());
        }
        void operator()(const label_rows& p) const
        {
            for (const auto& row : p.rows) {
                hash_combine(seed, row.has_value());
                if (row)
                    for (const auto& w : *row)
                        hash_combine(seed, w.hash());
            }
        }
        void operator()(const term_shape& p) const
        {
            hash_combine(seed, p.symbol);
            for (auto c : p.colors)
                hash_combine(seed, c);
        }
    };
    std::visit(visitor{seed}, payload_);
    return seed;
}

key map_key(const key& k, std::span<const std::uint8_t> f, unsigned target_level)
{
    struct visitor
    {
        std::span<const std::uint8_t> f;
        unsigned target;
        key::payload_type operator()(const color_set& p) const
        {
            color_set out;
            for (unsigned c = 0; c < f.size(); ++c)
                if (p.mask & (1u << c))
                    out.mask |= static_cast<std::uint8_t>(1u << f[c]);
            return out;
        }
        key::payload_type operator()(const weight_vector& p) const
        {
            return weight_vector{map_weights(p.by_color, f, target)};
        }
        key::payload_type operator()(const label_rows& p) const
        {
            label_rows out;
            for (const auto& row : p.rows) {
                if (row)
                    out.rows.emplace_back(map_weights(*row, f, target));
                else
                    out.rows.emplace_back(std::nullopt);
            }
            return out;
        }
        key::payload_type operator()(const term_shape& p) const
        {
            term_shape out{p.symbol, {}};
            for (auto c : p.colors)
                out.colors.push_back(f[c]);
            return out;
        }
    };
    return key(target_level, std::visit(visitor{f.first(k.level()), target_level}, k.payload()));
}

key embed_level1(const key& k) { return map_key(k, to_two, 3); }
key embed_level2(const key& k) { return map_key(k, shift_up, 3); }
key restrict_to_outer(const key& k) { return map_key(k, outer, 2); }
key restrict_to_inner(const key& k) { return map_key(k, inner, 2); }
key collapse(const key& k) { return map_key(k, all_zero, 1); }

std::string render_key(const functor_kind& kind, const key& k)
{
    struct visitor
    {
        const functor_kind& kind;
        std::string operator()(const color_set& p) const
        {
            std::string s = "{";
            bool first = true;
            for (unsigned c = 0; c < 3; ++c)
                if (p.mask & (1u << c)) {
                    if (!first)
                        s += ",";
                    s += std::to_string(c);
                    first = false;
                }
            return s + "}";
        }
        std::string operator()(const weight_vector& p) const { return render_weights(p.by_color); }
        std::string operator()(const label_rows& p) const
        {
            std::string s;
            for (std::size_t a = 0; a < p.rows.size(); ++a) {
                if (a)
                    s += ";";
                s += kind.alphabet().at(a) + ":";
                s += p.rows[a] ? render_weights(*p.rows[a]) : "-";
            }
            return s;
        }
        std::string operator()(const term_shape& p) const
        {
            std::string s = kind.symbol_name(p.symbol);
            if (p.colors.empty())
                return s;
            s += "(";
            for (std::size_t i = 0; i < p.colors.size(); ++i) {
                if (i)
                    s += ",";
                s += std::to_string(p.colors[i]);
            }
            return s + ")";
        }
    };
    return std::visit(visitor{kind}, k.payload());
}

nlohmann::json key_to_json(const functor_kind& kind, const key& k)
{
    nlohmann::json j;
    j["level"] = k.level();
    struct visitor
    {
        const functor_kind& kind;
        nlohmann::json& j;
        void operator()(const color_set& p) const
        {
            auto colors = nlohmann::json::array();
            for (unsigned c = 0; c < 3; ++c)
                if (p.mask & (1u << c))
                    colors.push_back(c);
            j["colors"] = colors;
        }
        void operator()(const weight_vector& p) const
        {
            auto ws = nlohmann::json::array();
            for (const auto& w : p.by_color)
                ws.push_back(weight_to_json(w));
            j["weights"] = ws;
        }
        void operator()(const label_rows& p) const
        {
            auto rows = nlohmann::json::object();
            for (std::size_t a = 0; a < p.rows.size(); ++a) {
                if (!p.rows[a]) {
                    rows[kind.alphabet().at(a)] = nullptr;
                    continue;
                }
                auto ws = nlohmann::json::array();
                for (const auto& w : *p.rows[a])
                    ws.push_back(weight_to_json(w));
                rows[kind.alphabet().at(a)] = ws;
            }
            j["rows"] = rows;
        }
        void operator()(const term_shape& p) const
        {
            j["symbol"] = kind.symbol_name(p.symbol);
            j["colors"] = p.colors;
        }
    };
    std::visit(visitor{kind, j}, k.payload());
    return j;
}

key key_from_json(const functor_kind& kind, const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("level") || !j["level"].is_number_unsigned())
        throw parse_error("key must be an object with a level");
    auto level = j["level"].get<unsigned>();
    if (level < 1 || level > 3)
        throw parse_error("key level must be 1, 2 or 3");
    key result;
    if (kind.is<powerset_functor>()) {
        if (!j.contains("colors") || !j["colors"].is_array())
            throw parse_error("powerset key needs colors");
        color_set p;
        for (const auto& c : j["colors"]) {
            if (!c.is_number_unsigned() || c.get<unsigned>() >= level)
                throw parse_error("powerset key color out of range");
            p.mask |= static_cast<std::uint8_t>(1u << c.get<unsigned>());
        }
        result = key(level, p);
    } else if (kind.is<monoid_functor>() || kind.is<dist_functor>()) {
        if (!j.contains("weights"))
            throw parse_error("weighted key needs weights");
        result = key(level, weight_vector{weights_from_json(*kind.weight_monoid(), level, j["weights"])});
    } else if (kind.is<lmc_functor>()) {
        if (!j.contains("rows") || !j["rows"].is_object())
            throw parse_error("lmc key needs rows");
        label_rows p;
        for (const auto& a : kind.alphabet()) {
            if (!j["rows"].contains(a))
                throw parse_error("lmc key misses label '" + a + "'");
            const auto& row = j["rows"][a];
            if (row.is_null())
                p.rows.emplace_back(std::nullopt);
            else
                p.rows.emplace_back(weights_from_json(monoid_kind::rational_add, level, row));
        }
        if (j["rows"].size() != kind.alphabet().size())
            throw parse_error("lmc key has unknown labels");
        result = key(level, p);
    } else {
        if (!j.contains("symbol") || !j["symbol"].is_string() || !j.contains("colors") ||
            !j["colors"].is_array())
            throw parse_error("term key needs symbol and colors");
        auto sym = kind.symbol_index(j["symbol"].get<std::string>());
        if (!sym)
            throw parse_error("unknown symbol '" + j["symbol"].get<std::string>() + "'");
        term_shape p{static_cast<std::uint32_t>(*sym), {}};
        for (const auto& c : j["colors"]) {
            if (!c.is_number_unsigned() || c.get<unsigned>() >= level)
                throw parse_error("term key color out of range");
            p.colors.push_back(static_cast<std::uint8_t>(c.get<unsigned>()));
        }
        result = key(level, p);
    }
    validate_key(kind, result);
    return result;
}

void validate_key(const functor_kind& kind, const key& k)
{
    auto fail = [](const std::string& why) { throw parse_error("invalid key: " + why); };
    if (k.level() < 1 || k.level() > 3)
        fail("level out of range");
    if (kind.is<powerset_functor>()) {
        if (!std::holds_alternative<color_set>(k.payload()))
            fail("expected a color set");
        if (k.as<color_set>().mask >> k.level())
            fail("color out of range");
    } else if (kind.is<monoid_functor>() || kind.is<dist_functor>()) {
        if (!std::holds_alternative<weight_vector>(k.payload()))
            fail("expected a weight vector");
        const auto& ws = k.as<weight_vector>().by_color;
        if (ws.size() != k.level())
            fail("weight vector length");
        rational total = 0;
        for (const auto& w : ws) {
            if (w.monoid() != *kind.weight_monoid())
                fail("weight of the wrong monoid");
            if (kind.is<dist_functor>()) {
                if (w.as_rational() < 0)
                    fail("negative probability");
                total += w.as_rational();
            }
        }
        if (kind.is<dist_functor>() && total != 1)
            fail("probabilities do not sum to one");
    } else if (kind.is<lmc_functor>()) {
        if (!std::holds_alternative<label_rows>(k.payload()))
            fail("expected label rows");
        const auto& rows = k.as<label_rows>().rows;
        if (rows.size() != kind.alphabet().size())
            fail("row count differs from alphabet");
        for (const auto& row : rows) {
            if (!row)
                continue;
            if (row->size() != k.level())
                fail("row length");
            rational total = 0;
            for (const auto& w : *row) {
                if (w.monoid() != monoid_kind::rational_add || w.as_rational() < 0)
                    fail("probabilities must be non-negative rationals");
                total += w.as_rational();
            }
            if (total != 1)
                fail("row does not sum to one");
        }
    } else {
        if (!std::holds_alternative<term_shape>(k.payload()))
            fail("expected a term shape");
        const auto& t = k.as<term_shape>();
        if (t.symbol >= kind.symbol_count())
            fail("symbol out of range");
        if (t.colors.size() != kind.symbol_arity(t.symbol))
            fail("arity mismatch");
        for (auto c : t.colors)
            if (c >= k.level())
                fail("color out of range");
    }
}

} // namespace coalcert
