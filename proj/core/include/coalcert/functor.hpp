#pragma once

#include "coalcert/numeric.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace coalcert {

struct powerset_functor
{
    friend bool operator==(const powerset_functor&, const powerset_functor&) = default;
};

// Finitely supported maps into a commutative monoid.
struct monoid_functor
{
    monoid_kind monoid = monoid_kind::int_add;
    friend bool operator==(const monoid_functor&, const monoid_functor&) = default;
};

// Finitely supported probability distributions.
struct dist_functor
{
    friend bool operator==(const dist_functor&, const dist_functor&) = default;
};

// Labelled Markov chains: (D X + 1)^A.
struct lmc_functor
{
    std::vector<std::string> alphabet;
    friend bool operator==(const lmc_functor&, const lmc_functor&) = default;
};

// Deterministic automata: 2 x X^A.
struct dfa_functor
{
    std::vector<std::string> alphabet;
    friend bool operator==(const dfa_functor&, const dfa_functor&) = default;
};

// Polynomial functor of a finitary signature. Symbols are kept sorted by
// name; a symbol's index is its position in that order.
struct signature_functor
{
    std::vector<std::pair<std::string, unsigned>> symbols;
    friend bool operator==(const signature_functor&, const signature_functor&) = default;
};

class functor_kind
{
public:
    using variant = std::variant<powerset_functor, monoid_functor, dist_functor,
                                 lmc_functor, dfa_functor, signature_functor>;

    functor_kind() = default;
    functor_kind(powerset_functor f) : value_(f) {}
    functor_kind(monoid_functor f) : value_(f) {}
    functor_kind(dist_functor f) : value_(f) {}
    functor_kind(lmc_functor f);
    functor_kind(dfa_functor f);
    functor_kind(signature_functor f);

    [[nodiscard]] const variant& value() const { return value_; }

    template <typename F>
    [[nodiscard]] bool is() const { return std::holds_alternative<F>(value_); }
    template <typename F>
    [[nodiscard]] const F& as() const { return std::get<F>(value_); }

    // "powerset", "monoid-int", "monoid-rational", "monoid-bool", "dist",
    // "lmc", "dfa", "signature".
    [[nodiscard]] std::string name() const;

    // Every supported kind preserves the relevant pullbacks.
    [[nodiscard]] bool zippable() const { return true; }
    [[nodiscard]] bool cancellative() const;

    // Weight monoid of monoid/dist/lmc kinds (dist and lmc are rational).
    [[nodiscard]] std::optional<monoid_kind> weight_monoid() const;

    // Lmc/Dfa labels; empty for other kinds.
    [[nodiscard]] const std::vector<std::string>& alphabet() const;
    [[nodiscard]] std::optional<std::size_t> label_index(std::string_view label) const;

    // Signature symbols, or "nonfinal"/"final" for Dfa (index = final flag).
    [[nodiscard]] std::size_t symbol_count() const;
    [[nodiscard]] std::string symbol_name(std::size_t symbol) const;
    [[nodiscard]] unsigned symbol_arity(std::size_t symbol) const;
    [[nodiscard]] std::optional<std::size_t> symbol_index(std::string_view name) const;

    friend bool operator==(const functor_kind&, const functor_kind&) = default;

private:
    variant value_;
};

} // namespace coalcert
