#pragma once

#include "coalcert/coalgebra.hpp"
#include "coalcert/key.hpp"
#include "coalcert/partition.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coalcert {

using node_id = std::uint32_t;

enum class node_kind
{
    top,
    conj,
    // Modality <o> for o in F1.
    mod0,
    // Binary modality [s](delta) for s in F2 (cancellative certificates).
    mod2,
    // Ternary modality [t](delta, beta) for t in F3.
    mod3,
};

[[nodiscard]] const char* node_kind_name(node_kind k);

// An edge into the dag, possibly negated.
struct node_ref
{
    node_id node = 0;
    bool negated = false;
    friend bool operator==(const node_ref&, const node_ref&) = default;
};

struct dag_node
{
    node_kind kind = node_kind::top;
    std::optional<key> k;
    std::vector<node_ref> children;
    // Set once the node became a conjunct of some beta formula.
    bool used_in_beta = false;
};

// Shared formula dag. Node 0 is always top; children always have smaller
// ids than their parents.
class formula_dag
{
public:
    formula_dag();

    [[nodiscard]] static node_ref top() { return {0, false}; }

    node_ref add_conj(node_ref left, node_ref right);
    node_ref add_mod0(key k);
    node_ref add_mod2(key k, node_ref delta);
    node_ref add_mod3(key k, node_ref delta, node_ref beta);
    // Raw insertion used when reading serialized dags; checks arities.
    node_ref add(dag_node node);

    [[nodiscard]] const dag_node& node(node_id id) const { return nodes_[id]; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] const std::vector<dag_node>& nodes() const { return nodes_; }

    void mark_used_in_beta(node_id id) { nodes_[id].used_in_beta = true; }

private:
    std::vector<dag_node> nodes_;
};

// How the conjunct of a refined block came about.
struct ancestry_record
{
    block_id child = 0;
    block_id parent = 0;
    std::size_t iteration = 0;
    key k;
    // The modal node conjoined to the parent's certificate.
    node_id conjunct = 0;
};

struct cert_map
{
    refinement_mode mode = refinement_mode::general;
    // Certificate per block id (final ids of the trace).
    std::vector<node_ref> delta;
    // Characteristic formula per compound id (general mode only).
    std::vector<node_ref> beta;
    std::vector<ancestry_record> ancestry;
    std::vector<block_id> block_of;
};

struct certified
{
    formula_dag dag;
    cert_map map;

    [[nodiscard]] node_ref certificate_of(state_id x) const { return map.delta[map.block_of[x]]; }
};

// Snapshot handed to an observer after the initial partition and after
// every split event.
struct certificate_stage
{
    std::size_t events_applied;
    const formula_dag& dag;
    const std::vector<node_ref>& delta;
    const std::vector<node_ref>& beta;
};

struct certificate_options
{
    refinement_mode mode = refinement_mode::general;
    // Conjoin to beta only the conjuncts of delta(S) that are not already
    // implied on the whole compound.
    bool simplify = false;
    std::function<void(const certificate_stage&)> observer;
};

// Builds certificates from a refinement trace. Throws mode_error when the
// requested mode differs from the trace's, error when the trace does not
// belong to c.
[[nodiscard]] certified attach_certificates(const coalgebra& c, const refinement_trace& trace,
                                            const certificate_options& options);

// A formula true at x and false at y, or nullopt if x and y are
// behaviourally equivalent.
[[nodiscard]] std::optional<node_ref> distinguish(const certified& certs, state_id x, state_id y);

// Conjuncts of a certificate, oldest first: the initial modality followed
// by the modal nodes added at each refinement.
[[nodiscard]] std::vector<node_id> conjuncts(const formula_dag& dag, node_ref certificate);

struct dag_statistics
{
    std::size_t node_count = 0;
    // One plus the maximal nesting of modalities; conjunction and
    // negation do not add a level.
    std::size_t height = 0;
    // Number of nodes on the longest path.
    std::size_t longest_path = 0;
};

[[nodiscard]] dag_statistics dag_stats(const formula_dag& dag);
// Size of the formula tree obtained by unfolding all sharing; every node
// and every negation counts one.
[[nodiscard]] big_int tree_size(const formula_dag& dag, node_ref root);
[[nodiscard]] std::vector<big_int> tree_sizes(const formula_dag& dag);
// 2 m (log2 n + 1) + 2 n.
[[nodiscard]] double node_count_bound(std::size_t n, std::size_t m);

// Text rendering: T, ~, /\, <o>, [t](d,b), [s](d); nodes referenced at
// least twice are bound with "let #k = ..." lines.
[[nodiscard]] std::string render_text(const functor_kind& kind, const formula_dag& dag, node_ref root);
// Rendering without let bindings (may be exponentially large).
[[nodiscard]] std::string render_text_inline(const functor_kind& kind, const formula_dag& dag,
                                             node_ref root);

[[nodiscard]] nlohmann::json node_ref_to_json(node_ref r);
[[nodiscard]] nlohmann::json dag_to_json(const functor_kind& kind, const formula_dag& dag);
[[nodiscard]] formula_dag dag_from_json(const functor_kind& kind, const nlohmann::json& j);
// {"mode": ..., "nodes": [...], "delta": {state name of block minimum: ref}}.
[[nodiscard]] nlohmann::json certificates_to_json(const coalgebra& c, const certified& certs);

// Graphviz rendering of the quotient system.
[[nodiscard]] std::string render_dot(const coalgebra& c, const certified& certs);

} // namespace coalcert
