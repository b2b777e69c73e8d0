#include "coalcert/functor.hpp"

#include "coalcert/error.hpp"

#include <algorithm>
#include <set>

namespace coalcert {

namespace {

void check_alphabet(const std::vector<std::string>& alphabet)
{
    if (alphabet.empty())
        throw model_error("alphabet must not be empty");
    std::set<std::string> seen;
    for (const auto& a : alphabet)
        if (!seen.insert(a).second)
            throw model_error("duplicate label '" + a + "'");
}

const std::vector<std::string> no_labels;

} // namespace

functor_kind::functor_kind(lmc_functor f)
{
    check_alphabet(f.alphabet);
    value_ = std::move(f);
}

functor_kind::functor_kind(dfa_functor f)
{
    check_alphabet(f.alphabet);
    value_ = std::move(f);
}

functor_kind::functor_kind(signature_functor f)
{
    if (f.symbols.empty())
        throw model_error("signature must have at least one symbol");
    std::sort(f.symbols.begin(), f.symbols.end());
    for (std::size_t i = 1; i < f.symbols.size(); ++i)
        if (f.symbols[i].first == f.symbols[i - 1].first)
            throw model_error("duplicate symbol '" + f.symbols[i].first + "'");
    value_ = std::move(f);
}

std::string functor_kind::name() const
{
    struct visitor
    {
        std::string operator()(const powerset_functor&) const { return "powerset"; }
        std::string operator()(const monoid_functor& f) const
        {
            switch (f.monoid) {
            case monoid_kind::int_add: return "monoid-int";
            case monoid_kind::rational_add: return "monoid-rational";
            case monoid_kind::bool_or: return "monoid-bool";
            }
            return "monoid";
        }
        std::string operator()(const dist_functor&) const { return "dist"; }
        std::string operator()(const lmc_functor&) const { return "lmc"; }
        std::string operator()(const dfa_functor&) const { return "dfa"; }
        std::string operator()(const signature_functor&) const { return "signature"; }
    };
    return std::visit(visitor{}, value_);
}

bool functor_kind::cancellative() const
{
    if (is<powerset_functor>())
        return false;
    if (is<monoid_functor>())
        return as<monoid_functor>().monoid != monoid_kind::bool_or;
    return true;
}

std::optional<monoid_kind> functor_kind::weight_monoid() const
{
    if (is<monoid_functor>())
        return as<monoid_functor>().monoid;
    if (is<dist_functor>() || is<lmc_functor>())
        return monoid_kind::rational_add;
    return std::nullopt;
}

const std::vector<std::string>& functor_kind::alphabet() const
{
    if (is<lmc_functor>())
        return as<lmc_functor>().alphabet;
    if (is<dfa_functor>())
        return as<dfa_functor>().alphabet;
    return no_labels;
}

std::optional<std::size_t> functor_kind::label_index(std::string_view label) const
{
    const auto& a = alphabet();
    auto it = std::find(a.begin(), a.end(), label);
    if (it == a.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - a.begin());
}

std::size_t functor_kind::symbol_count() const
{
    if (is<signature_functor>())
        return as<signature_functor>().symbols.size();
    if (is<dfa_functor>())
        return 2;
    return 0;
}

std::string functor_kind::symbol_name(std::size_t symbol) const
{
    if (is<signature_functor>())
        return as<signature_functor>().symbols.at(symbol).first;
    if (is<dfa_functor>())
        return symbol == 1 ? "final" : "nonfinal";
    throw kind_mismatch_error("functor kind " + name() + " has no symbols");
}

unsigned functor_kind::symbol_arity(std::size_t symbol) const
{
    if (is<signature_functor>())
        return as<signature_functor>().symbols.at(symbol).second;
    if (is<dfa_functor>())
        return static_cast<unsigned>(as<dfa_functor>().alphabet.size());
    throw kind_mismatch_error("functor kind " + name() + " has no symbols");
}

std::optional<std::size_t> functor_kind::symbol_index(std::string_view name) const
{
    for (std::size_t i = 0; i < symbol_count(); ++i)
        if (symbol_name(i) == name)
            return i;
    return std::nullopt;
}

} // namespace coalcert
