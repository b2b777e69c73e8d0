#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace coalcert {

using rational = boost::multiprecision::cpp_rational;
using big_int = boost::multiprecision::cpp_int;

enum class monoid_kind
{
    int_add,
    rational_add,
    bool_or,
};

// Parses "p/q", "p", "-p/q". Throws parse_error.
[[nodiscard]] rational parse_rational(std::string_view text);
// Lowest terms, "p" when the denominator is one.
[[nodiscard]] std::string format_rational(const rational& value);

[[nodiscard]] std::int64_t checked_add(std::int64_t a, std::int64_t b);
[[nodiscard]] std::int64_t checked_sub(std::int64_t a, std::int64_t b);

// An element of one of the weight monoids. Every weight in a coalgebra
// or key has the alternative matching its monoid; mixing is a logic error.
class weight
{
public:
    using storage = std::variant<std::int64_t, rational, bool>;

    weight() = default;
    explicit weight(std::int64_t v) : value_(v) {}
    explicit weight(rational v) : value_(std::move(v)) {}
    explicit weight(bool v) : value_(v) {}

    [[nodiscard]] static weight zero(monoid_kind m);

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] monoid_kind monoid() const;
    [[nodiscard]] const storage& value() const { return value_; }

    [[nodiscard]] std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
    [[nodiscard]] const rational& as_rational() const { return std::get<rational>(value_); }
    [[nodiscard]] bool as_bool() const { return std::get<bool>(value_); }

    weight& operator+=(const weight& other);
    // Only defined for the cancellative monoids.
    weight& operator-=(const weight& other);

    friend weight operator+(weight a, const weight& b) { return a += b; }
    friend weight operator-(weight a, const weight& b) { return a -= b; }
    friend bool operator==(const weight&, const weight&) = default;

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::size_t hash() const;

private:
    storage value_ = std::int64_t{0};
};

// Parses a weight literal of the given monoid: integers, rationals "p/q",
// booleans "true"/"false"/"1"/"0".
[[nodiscard]] weight parse_weight(monoid_kind m, std::string_view text);

inline void hash_combine(std::size_t& seed, std::size_t v)
{
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

} // namespace coalcert
