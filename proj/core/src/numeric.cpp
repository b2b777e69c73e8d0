#include "coalcert/numeric.hpp"

#include "coalcert/error.hpp"

#include <charconv>

namespace coalcert {

namespace {

big_int parse_integer(std::string_view text, std::string_view whole)
{
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    if (text.empty())
        throw parse_error("malformed number '" + std::string(whole) + "'");
    big_int result = 0;
    for (char ch : text) {
        if (ch < '0' || ch > '9')
            throw parse_error("malformed number '" + std::string(whole) + "'");
        result = result * 10 + (ch - '0');
    }
    return negative ? big_int(-result) : result;
}

} // namespace

rational parse_rational(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return rational(parse_integer(text, text));
    big_int num = parse_integer(text.substr(0, slash), text);
    auto den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text.front() == '-' || den_text.front() == '+'))
        throw parse_error("malformed rational '" + std::string(text) + "'");
    big_int den = parse_integer(den_text, text);
    if (den == 0)
        throw parse_error("zero denominator in '" + std::string(text) + "'");
    return rational(num, den);
}

std::string format_rational(const rational& value)
{
    if (denominator(value) == 1)
        return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw arithmetic_error("integer weight overflow");
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw arithmetic_error("integer weight overflow");
    return r;
}

weight weight::zero(monoid_kind m)
{
    switch (m) {
    case monoid_kind::int_add: return weight(std::int64_t{0});
    case monoid_kind::rational_add: return weight(rational(0));
    case monoid_kind::bool_or: return weight(false);
    }
    return {};
}

bool weight::is_zero() const
{
    return std::visit([](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>)
            return !v;
        else
            return v == 0;
    }, value_);
}

monoid_kind weight::monoid() const
{
    switch (value_.index()) {
    case 0: return monoid_kind::int_add;
    case 1: return monoid_kind::rational_add;
    default: return monoid_kind::bool_or;
    }
}

weight& weight::operator+=(const weight& other)
{
    if (value_.index() != other.value_.index())
        throw std::logic_error("weight monoid mismatch");
    switch (value_.index()) {
    case 0: value_ = checked_add(as_int(), other.as_int()); break;
    case 1: std::get<rational>(value_) += other.as_rational(); break;
    default: value_ = as_bool() || other.as_bool(); break;
    }
    return *this;
}

weight& weight::operator-=(const weight& other)
{
    if (value_.index() != other.value_.index())
        throw std::logic_error("weight monoid mismatch");
    switch (value_.index()) {
    case 0: value_ = checked_sub(as_int(), other.as_int()); break;
    case 1: std::get<rational>(value_) -= other.as_rational(); break;
    default: throw std::logic_error("boolean weights cannot be subtracted");
    }
    return *this;
}

std::string weight::to_string() const
{
    switch (value_.index()) {
    case 0: return std::to_string(as_int());
    case 1: return format_rational(as_rational());
    default: return as_bool() ? "true" : "false";
    }
}

std::size_t weight::hash() const
{
    std::size_t seed = value_.index();
    switch (value_.index()) {
    case 0: hash_combine(seed, std::hash<std::int64_t>{}(as_int())); break;
    case 1: hash_combine(seed, boost::multiprecision::hash_value(as_rational())); break;
    default: hash_combine(seed, as_bool() ? 1 : 0); break;
    }
    return seed;
}

weight parse_weight(monoid_kind m, std::string_view text)
{
    switch (m) {
    case monoid_kind::int_add: {
        std::int64_t v = 0;
        auto begin = text.data();
        auto end = text.data() + text.size();
        if (!text.empty() && text.front() == '+')
            ++begin;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec == std::errc::result_out_of_range)
            throw arithmetic_error("integer weight out of range: '" + std::string(text) + "'");
        if (ec != std::errc() || ptr != end || begin == end)
            throw parse_error("malformed integer '" + std::string(text) + "'");
        return weight(v);
    }
    case monoid_kind::rational_add:
        return weight(parse_rational(text));
    case monoid_kind::bool_or:
        if (text == "true" || text == "1")
            return weight(true);
        if (text == "false" || text == "0")
            return weight(false);
        throw parse_error("malformed boolean '" + std::string(text) + "'");
    }
    return {};
}

} // namespace coalcert
