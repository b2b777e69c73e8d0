#include "coalcert/certificates.hpp"

#include "coalcert/error.hpp"

#include <algorithm>
#include <cmath>

namespace coalcert {

const char* node_kind_name(node_kind k)
{
    switch (k) {
    case node_kind::top: return "top";
    case node_kind::conj: return "conj";
    case node_kind::mod0: return "mod0";
    case node_kind::mod2: return "mod2";
    case node_kind::mod3: return "mod3";
    }
    return "?";
}

formula_dag::formula_dag() { nodes_.push_back({node_kind::top, std::nullopt, {}, false}); }

node_ref formula_dag::add(dag_node node)
{
    std::size_t arity = 0;
    unsigned level = 0;
    switch (node.kind) {
    case node_kind::top:
        throw parse_error("only node 0 may be top");
    case node_kind::conj: arity = 2; break;
    case node_kind::mod0: level = 1; break;
    case node_kind::mod2: arity = 1; level = 2; break;
    case node_kind::mod3: arity = 2; level = 3; break;
    }
    if (node.children.size() != arity)
        throw parse_error(std::string(node_kind_name(node.kind)) + " node needs " + std::to_string(arity) +
                          " children");
    if (level != 0 && (!node.k || node.k->level() != level))
        throw parse_error(std::string(node_kind_name(node.kind)) + " node needs a level " +
                          std::to_string(level) + " key");
    if (level == 0 && node.k)
        throw parse_error("conj node must not carry a key");
    for (auto r : node.children)
        if (r.node >= nodes_.size())
            throw parse_error("child reference to a later node");
    nodes_.push_back(std::move(node));
    return {static_cast<node_id>(nodes_.size() - 1), false};
}

node_ref formula_dag::add_conj(node_ref left, node_ref right)
{
    return add({node_kind::conj, std::nullopt, {left, right}, false});
}

node_ref formula_dag::add_mod0(key k) { return add({node_kind::mod0, std::move(k), {}, false}); }

node_ref formula_dag::add_mod2(key k, node_ref delta)
{
    return add({node_kind::mod2, std::move(k), {delta}, false});
}

node_ref formula_dag::add_mod3(key k, node_ref delta, node_ref beta)
{
    return add({node_kind::mod3, std::move(k), {delta, beta}, false});
}

std::vector<node_id> conjuncts(const formula_dag& dag, node_ref certificate)
{
    std::vector<node_id> out;
    node_id at = certificate.node;
    while (dag.node(at).kind == node_kind::conj) {
        out.push_back(dag.node(at).children[1].node);
        at = dag.node(at).children[0].node;
    }
    out.push_back(at);
    std::reverse(out.begin(), out.end());
    return out;
}

certified attach_certificates(const coalgebra& c, const refinement_trace& trace,
                              const certificate_options& options)
{
    if (options.mode != trace.mode)
        throw mode_error(std::string("trace was computed in ") + mode_name(trace.mode) +
                         " mode, certificates requested in " + mode_name(options.mode) + " mode");
    if (trace.state_count != c.size() || trace.initial_block_of.size() != c.size())
        throw error("trace does not belong to this coalgebra");
    const bool general = options.mode == refinement_mode::general;

    certified out;
    auto& dag = out.dag;
    auto& delta = out.map.delta;
    auto& beta = out.map.beta;
    out.map.mode = options.mode;

    // Number of conjuncts in delta(b), and for each compound the number of
    // conjuncts its beta formula shares with the certificates inside it.
    std::vector<std::size_t> chain_length;
    std::vector<std::size_t> anchor_length;
    std::vector<compound_id> compound_of;
    // For simplified beta formulas: per block the conjunction of the
    // conjuncts of delta(b) beyond the anchor of b's compound, which is
    // delta(b) itself while that anchor is zero.
    enum class tail_state : std::uint8_t { whole, none, partial };
    std::vector<tail_state> tail_kind;
    std::vector<node_ref> tail;

    auto ensure_block = [&](block_id b) {
        if (delta.size() <= b) {
            delta.resize(b + 1);
            chain_length.resize(b + 1);
            compound_of.resize(b + 1);
            tail_kind.resize(b + 1, tail_state::whole);
            tail.resize(b + 1);
        }
    };

    for (const auto& b : trace.init) {
        validate_key(c.kind(), b.k);
        ensure_block(b.block);
        delta[b.block] = dag.add_mod0(b.k);
        chain_length[b.block] = 1;
    }
    if (general && !trace.init.empty()) {
        beta.push_back(formula_dag::top());
        anchor_length.push_back(0);
    }
    auto notify = [&](std::size_t applied) {
        if (options.observer)
            options.observer(certificate_stage{applied, dag, delta, beta});
    };
    notify(0);

    std::size_t applied = 0;
    for (const auto& event : trace.events) {
        const node_ref ds = delta.at(event.splitter);
        const std::size_t ds_length = chain_length[event.splitter];
        const node_ref bb = general ? beta.at(event.compound) : node_ref{};

        // Every state of the compound satisfies the conjuncts of ds up to
        // the compound's anchor, so the simplified beta only negates the
        // newer ones.
        node_ref excluded = ds;
        if (general) {
            if (ds_length <= anchor_length[event.compound])
                throw std::logic_error("splitter certificate has no conjunct beyond its compound");
            if (options.simplify && tail_kind[event.splitter] == tail_state::partial)
                excluded = tail[event.splitter];
            if (beta.size() <= event.splitter_compound) {
                beta.resize(event.splitter_compound + 1);
                anchor_length.resize(event.splitter_compound + 1);
            }
            beta[event.splitter_compound] = ds;
            anchor_length[event.splitter_compound] = ds_length;
            compound_of[event.splitter] = event.splitter_compound;
            tail_kind[event.splitter] = tail_state::none;
        }

        for (const auto& r : event.refinements) {
            const node_ref dt = delta.at(r.parent);
            const std::size_t dt_length = chain_length[r.parent];
            const compound_id k = compound_of[r.parent];
            const tail_state tk = tail_kind[r.parent];
            const node_ref tt = tail[r.parent];
            for (const auto& child : r.children) {
                node_ref modal = general ? dag.add_mod3(child.k, ds, bb) : dag.add_mod2(child.k, ds);
                node_ref conj = dag.add_conj(dt, modal);
                ensure_block(child.block);
                delta[child.block] = conj;
                chain_length[child.block] = dt_length + 1;
                compound_of[child.block] = k;
                tail_kind[child.block] = tk == tail_state::whole ? tail_state::whole : tail_state::partial;
                if (general && options.simplify && tk != tail_state::whole)
                    tail[child.block] = tk == tail_state::none ? modal : dag.add_conj(tt, modal);
                out.map.ancestry.push_back({child.block, r.parent, event.iteration, child.k, modal.node});
            }
        }

        if (general) {
            dag.mark_used_in_beta(excluded.node);
            beta[event.compound] = dag.add_conj(bb, {excluded.node, !excluded.negated});
        }
        notify(++applied);
    }

    trace_replay replay(trace);
    replay.finish();
    out.map.block_of = replay.block_of();
    return out;
}

std::optional<node_ref> distinguish(const certified& certs, state_id x, state_id y)
{
    const auto& map = certs.map;
    if (x >= map.block_of.size() || y >= map.block_of.size())
        throw unknown_state_error("state id out of range");
    if (map.block_of[x] == map.block_of[y])
        return std::nullopt;
    auto cx = conjuncts(certs.dag, map.delta[map.block_of[x]]);
    auto cy = conjuncts(certs.dag, map.delta[map.block_of[y]]);
    for (std::size_t i = 0; i < cx.size(); ++i)
        if (i >= cy.size() || cx[i] != cy[i])
            return node_ref{cx[i], false};
    // x's chain is a proper prefix of y's: impossible for distinct blocks.
    throw std::logic_error("certificate chains do not diverge");
}

dag_statistics dag_stats(const formula_dag& dag)
{
    dag_statistics s;
    s.node_count = dag.size();
    std::vector<std::size_t> height(dag.size(), 1);
    std::vector<std::size_t> path(dag.size(), 1);
    for (node_id id = 0; id < dag.size(); ++id) {
        const auto& node = dag.node(id);
        std::size_t h = 0;
        std::size_t p = 0;
        for (auto r : node.children) {
            h = std::max(h, height[r.node]);
            p = std::max(p, path[r.node]);
        }
        const bool modal = node.kind == node_kind::mod0 || node.kind == node_kind::mod2 ||
                           node.kind == node_kind::mod3;
        if (node.kind == node_kind::conj)
            height[id] = h;
        else
            height[id] = modal ? h + 1 : 1;
        path[id] = p + 1;
        s.height = std::max(s.height, height[id]);
        s.longest_path = std::max(s.longest_path, path[id]);
    }
    return s;
}

std::vector<big_int> tree_sizes(const formula_dag& dag)
{
    std::vector<big_int> size(dag.size());
    for (node_id id = 0; id < dag.size(); ++id) {
        big_int total = 1;
        for (auto r : dag.node(id).children)
            total += size[r.node] + (r.negated ? 1 : 0);
        size[id] = total;
    }
    return size;
}

big_int tree_size(const formula_dag& dag, node_ref root)
{
    // Only the part reachable from root matters, but a full pass is linear.
    auto sizes = tree_sizes(dag);
    return sizes[root.node] + (root.negated ? 1 : 0);
}

double node_count_bound(std::size_t n, std::size_t m)
{
    const double logn = n > 0 ? std::log2(static_cast<double>(n)) : 0.0;
    return 2.0 * static_cast<double>(m) * (logn + 1.0) + 2.0 * static_cast<double>(n);
}

} // namespace coalcert
