#pragma once

#include "coalcert/functor.hpp"
#include "coalcert/numeric.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace coalcert {

// Payloads of a key, one per functor family. A key of level k is an
// element of F{0,..,k-1}; colors are the numbers 0..k-1.

// Powerset: bit c is set iff some successor has color c.
struct color_set
{
    std::uint8_t mask = 0;
    friend bool operator==(const color_set&, const color_set&) = default;
};

// Monoid-valued and Dist: total weight per color, indexed by color.
struct weight_vector
{
    std::vector<weight> by_color;
    friend bool operator==(const weight_vector&, const weight_vector&) = default;
};

// Lmc: per label either undefined or the probability mass per color.
struct label_rows
{
    std::vector<std::optional<std::vector<weight>>> rows;
    friend bool operator==(const label_rows&, const label_rows&) = default;
};

// Signature and Dfa: symbol (Dfa: final flag) and the color of each argument.
struct term_shape
{
    std::uint32_t symbol = 0;
    std::vector<std::uint8_t> colors;
    friend bool operator==(const term_shape&, const term_shape&) = default;
};

class key
{
public:
    using payload_type = std::variant<color_set, weight_vector, label_rows, term_shape>;

    key() = default;
    key(unsigned level, payload_type payload) : level_(level), payload_(std::move(payload)) {}

    [[nodiscard]] unsigned level() const { return level_; }
    [[nodiscard]] const payload_type& payload() const { return payload_; }

    template <typename P>
    [[nodiscard]] const P& as() const { return std::get<P>(payload_); }

    [[nodiscard]] std::size_t hash() const;

    friend bool operator==(const key&, const key&) = default;

private:
    unsigned level_ = 1;
    payload_type payload_;
};

struct key_hash
{
    std::size_t operator()(const key& k) const { return k.hash(); }
};

// F f for a map f : {0..level-1} -> {0..target_level-1}.
[[nodiscard]] key map_key(const key& k, std::span<const std::uint8_t> f, unsigned target_level);

// j1 : F1 -> F3, 0 |-> 2.
[[nodiscard]] key embed_level1(const key& k);
// j2 : F2 -> F3, 0 |-> 1, 1 |-> 2.
[[nodiscard]] key embed_level2(const key& k);
// F chi_{1,2} : F3 -> F2.
[[nodiscard]] key restrict_to_outer(const key& k);
// F chi_{2} : F3 -> F2.
[[nodiscard]] key restrict_to_inner(const key& k);
// F! : Fk -> F1.
[[nodiscard]] key collapse(const key& k);

// Canonical text, e.g. {0,2}, (1,0,2), tau:(1/2,1/2,0), f(2,0).
[[nodiscard]] std::string render_key(const functor_kind& kind, const key& k);

[[nodiscard]] nlohmann::json key_to_json(const functor_kind& kind, const key& k);
// Throws parse_error on malformed or ill-kinded input.
[[nodiscard]] key key_from_json(const functor_kind& kind, const nlohmann::json& j);

// Throws if the key is not a well-formed element of F{0..level-1} for kind.
void validate_key(const functor_kind& kind, const key& k);

} // namespace coalcert
