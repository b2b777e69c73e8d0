#pragma once

#include "coalcert/functor.hpp"
#include "coalcert/key.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coalcert {

using state_id = std::uint32_t;

// A finite coalgebra c : C -> F C over states 0..n-1.
//
// Successor data is stored per state as parallel arrays:
//  - successors: target states (powerset: sorted, no duplicates; weighted:
//    sorted by (slot, target), nonzero weights only)
//  - slots: Lmc label / Dfa letter / Signature argument position, else 0
//  - weights: monoid-valued, Dist, Lmc only
// plus a head per state (Signature symbol, Dfa final flag) and, for Lmc,
// the set of defined labels.
class coalgebra
{
public:
    coalgebra() = default;

    [[nodiscard]] const functor_kind& kind() const { return kind_; }
    [[nodiscard]] std::size_t size() const { return names_.size(); }

    [[nodiscard]] const std::string& name(state_id x) const { return names_[x]; }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] std::optional<state_id> find(std::string_view name) const;
    // Throws unknown_state_error.
    [[nodiscard]] state_id lookup(std::string_view name) const;

    [[nodiscard]] std::size_t edge_begin(state_id x) const { return offsets_[x]; }
    [[nodiscard]] std::size_t edge_end(state_id x) const { return offsets_[x + 1]; }
    [[nodiscard]] std::size_t edge_count() const { return targets_.size(); }

    [[nodiscard]] state_id target(std::size_t e) const { return targets_[e]; }
    [[nodiscard]] std::uint32_t slot(std::size_t e) const { return slots_[e]; }
    [[nodiscard]] const weight& edge_weight(std::size_t e) const { return weights_[e]; }

    [[nodiscard]] std::span<const state_id> successors(state_id x) const
    {
        return {targets_.data() + offsets_[x], targets_.data() + offsets_[x + 1]};
    }

    [[nodiscard]] std::uint32_t head(state_id x) const { return heads_[x]; }
    [[nodiscard]] bool defined(state_id x, std::size_t label) const
    {
        return defined_[x * kind_.alphabet().size() + label] != 0;
    }

private:
    friend class coalgebra_builder;

    functor_kind kind_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, state_id> index_;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<state_id> targets_;
    std::vector<std::uint32_t> slots_;
    std::vector<weight> weights_;
    std::vector<std::uint32_t> heads_;
    std::vector<std::uint8_t> defined_;
};

// Incremental construction with validation on build().
class coalgebra_builder
{
public:
    explicit coalgebra_builder(functor_kind kind);

    // Throws model_error on duplicate names.
    state_id add_state(std::string name);
    [[nodiscard]] std::size_t size() const { return names_.size(); }

    // Powerset.
    void add_successor(state_id x, state_id y);
    // Monoid-valued and Dist; weights of repeated targets accumulate.
    void add_weight(state_id x, state_id y, weight w);
    // Lmc; defining a label without mass makes it invalid at build time.
    void define_label(state_id x, std::size_t label);
    void add_probability(state_id x, std::size_t label, state_id y, rational p);
    // Dfa.
    void set_accepting(state_id x, bool accepting);
    void set_transition(state_id x, std::size_t letter, state_id y);
    // Signature.
    void set_term(state_id x, std::size_t symbol, std::vector<state_id> args);

    // Throws model_error naming the offending state.
    [[nodiscard]] coalgebra build() &&;

private:
    struct pending
    {
        std::uint32_t slot;
        state_id target;
        weight w;
    };

    void check_state(state_id x) const;

    functor_kind kind_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, state_id> index_;
    std::vector<std::vector<pending>> out_;
    std::vector<std::optional<std::uint32_t>> heads_;
    std::vector<std::vector<std::optional<state_id>>> letters_;
    std::vector<std::vector<state_id>> args_;
    std::vector<std::uint8_t> defined_;
};

// Number of stored successor entries (|A| per Dfa state, arity per term).
[[nodiscard]] std::size_t count_transitions(const coalgebra& c);

// For every state the source of each incoming stored edge, as edge ids
// (indices usable with coalgebra::target/slot/edge_weight).
struct reverse_edges
{
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> edges;
    std::vector<state_id> sources;

    [[nodiscard]] std::span<const std::uint32_t> incoming(state_id y) const
    {
        return {edges.data() + offsets[y], edges.data() + offsets[y + 1]};
    }
};
[[nodiscard]] reverse_edges build_reverse_edges(const coalgebra& c);

// Distinct predecessors of every state, sorted.
[[nodiscard]] std::vector<std::vector<state_id>> predecessors(const coalgebra& c);

// F!(c(x)).
[[nodiscard]] key eval1(const coalgebra& c, state_id x);
// F chi_S(c(x)); member[y] is 1 iff y is in S.
[[nodiscard]] key eval2(const coalgebra& c, state_id x, std::span<const std::uint8_t> member);
// F chi(c(x)) for a coloring into {0,1,2}.
[[nodiscard]] key eval3(const coalgebra& c, state_id x, std::span<const std::uint8_t> colors);
// F f(c(x)) for a coloring into {0..level-1}, level <= 3.
[[nodiscard]] key eval_colored(const coalgebra& c, state_id x, std::span<const std::uint8_t> colors,
                               unsigned level);

} // namespace coalcert
