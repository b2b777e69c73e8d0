#include "coalcert/certificates.hpp"
#include "coalcert/error.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <sstream>

namespace coalcert {

namespace {

class text_renderer
{
public:
    text_renderer(const functor_kind& kind, const formula_dag& dag, std::vector<bool> bound)
        : kind_(kind), dag_(dag), bound_(std::move(bound))
    {
    }

    std::string ref(node_ref r) const
    {
        if (!r.negated)
            return node(r.node, false);
        return "~" + node(r.node, true);
    }

    // Expression of a node; conjunctions are parenthesised when operands
    // of negation.
    std::string node(node_id id, bool operand) const
    {
        if (!bound_.empty() && bound_[id])
            return "#" + std::to_string(id);
        return body(id, operand);
    }

    std::string body(node_id id, bool operand) const
    {
        const auto& n = dag_.node(id);
        switch (n.kind) {
        case node_kind::top: return "T";
        case node_kind::mod0: return "<" + render_key(kind_, *n.k) + ">";
        case node_kind::mod2: return "[" + render_key(kind_, *n.k) + "](" + ref(n.children[0]) + ")";
        case node_kind::mod3:
            return "[" + render_key(kind_, *n.k) + "](" + ref(n.children[0]) + ", " + ref(n.children[1]) + ")";
        case node_kind::conj: {
            std::vector<node_ref> parts;
            node_id at = id;
            while (true) {
                const auto& c = dag_.node(at);
                parts.push_back(c.children[1]);
                auto left = c.children[0];
                if (!left.negated && dag_.node(left.node).kind == node_kind::conj &&
                    (bound_.empty() || !bound_[left.node])) {
                    at = left.node;
                    continue;
                }
                parts.push_back(left);
                break;
            }
            std::string s;
            for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
                if (!s.empty())
                    s += " /\\ ";
                s += ref(*it);
            }
            return operand ? "(" + s + ")" : s;
        }
        }
        return "?";
    }

private:
    const functor_kind& kind_;
    const formula_dag& dag_;
    std::vector<bool> bound_;
};

} // namespace

std::string render_text_inline(const functor_kind& kind, const formula_dag& dag, node_ref root)
{
    return text_renderer(kind, dag, {}).ref(root);
}

std::string render_text(const functor_kind& kind, const formula_dag& dag, node_ref root)
{
    std::vector<bool> reachable(dag.size(), false);
    std::vector<std::uint32_t> refs(dag.size(), 0);
    reachable[root.node] = true;
    for (node_id id = root.node + 1; id-- > 0;) {
        if (!reachable[id])
            continue;
        for (auto r : dag.node(id).children) {
            reachable[r.node] = true;
            ++refs[r.node];
        }
    }
    std::vector<bool> bound(dag.size(), false);
    for (node_id id = 0; id < dag.size(); ++id) {
        const auto k = dag.node(id).kind;
        bound[id] = refs[id] >= 2 && k != node_kind::top && k != node_kind::mod0;
    }
    text_renderer r(kind, dag, bound);
    std::string out;
    for (node_id id = 0; id < root.node; ++id)
        if (bound[id])
            out += "let #" + std::to_string(id) + " = " + r.body(id, false) + "\n";
    if (root.negated)
        return out + "~" + (bound[root.node] ? "#" + std::to_string(root.node) : r.body(root.node, true));
    return out + r.body(root.node, false);
}

nlohmann::json node_ref_to_json(node_ref r) { return {{"node", r.node}, {"neg", r.negated}}; }

nlohmann::json dag_to_json(const functor_kind& kind, const formula_dag& dag)
{
    auto nodes = nlohmann::json::array();
    for (node_id id = 0; id < dag.size(); ++id) {
        const auto& n = dag.node(id);
        nlohmann::json j{{"id", id}, {"kind", node_kind_name(n.kind)}};
        if (n.k)
            j["key"] = key_to_json(kind, *n.k);
        auto children = nlohmann::json::array();
        for (auto r : n.children)
            children.push_back(node_ref_to_json(r));
        j["children"] = children;
        nodes.push_back(j);
    }
    return {{"nodes", nodes}};
}

formula_dag dag_from_json(const functor_kind& kind, const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array())
        throw parse_error("dag must be an object with a nodes array");
    const auto& nodes = j["nodes"];
    formula_dag dag;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const std::string path = "nodes[" + std::to_string(i) + "]";
        if (!n.is_object() || !n.contains("id") || n["id"] != i)
            throw parse_error(path + ": node ids must be 0, 1, 2, ... in order");
        if (!n.contains("kind") || !n["kind"].is_string())
            throw parse_error(path + ": missing kind");
        const auto kind_name = n["kind"].get<std::string>();
        if (i == 0) {
            if (kind_name != "top")
                throw parse_error(path + ": node 0 must be top");
            continue;
        }
        dag_node node;
        if (kind_name == "conj")
            node.kind = node_kind::conj;
        else if (kind_name == "mod0")
            node.kind = node_kind::mod0;
        else if (kind_name == "mod2")
            node.kind = node_kind::mod2;
        else if (kind_name == "mod3")
            node.kind = node_kind::mod3;
        else
            throw parse_error(path + ": unknown node kind '" + kind_name + "'");
        if (n.contains("key"))
            node.k = key_from_json(kind, n["key"]);
        if (n.contains("children")) {
            if (!n["children"].is_array())
                throw parse_error(path + ": children must be an array");
            for (const auto& c : n["children"]) {
                if (!c.is_object() || !c.contains("node") || !c["node"].is_number_unsigned())
                    throw parse_error(path + ": malformed child reference");
                node.children.push_back({c["node"].get<node_id>(), c.value("neg", false)});
            }
        }
        try {
            dag.add(std::move(node));
        } catch (const parse_error& e) {
            throw parse_error(path + ": " + e.what());
        }
    }
    return dag;
}

nlohmann::json certificates_to_json(const coalgebra& c, const certified& certs)
{
    auto j = dag_to_json(c.kind(), certs.dag);
    j["mode"] = mode_name(certs.map.mode);
    nlohmann::json delta = nlohmann::json::object();
    nlohmann::json blocks = nlohmann::json::object();
    for (const auto& block : blocks_of(certs.map.block_of)) {
        const auto& name = c.name(block.front());
        delta[name] = node_ref_to_json(certs.map.delta[certs.map.block_of[block.front()]]);
        auto members = nlohmann::json::array();
        for (auto x : block)
            members.push_back(c.name(x));
        blocks[name] = members;
    }
    j["delta"] = delta;
    j["blocks"] = blocks;
    return j;
}

std::string render_dot(const coalgebra& c, const certified& certs)
{
    const auto blocks = blocks_of(certs.map.block_of);
    std::vector<std::size_t> index_of_block(certs.map.delta.size(), 0);
    for (std::size_t i = 0; i < blocks.size(); ++i)
        index_of_block[certs.map.block_of[blocks[i].front()]] = i;
    auto escape = [](const std::string& s) {
        std::string out;
        for (char ch : s) {
            if (ch == '"' || ch == '\\')
                out += '\\';
            out += ch;
        }
        return out;
    };

    std::ostringstream os;
    os << "digraph quotient {\n  node [shape=box];\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        std::string label = "{";
        for (std::size_t k = 0; k < blocks[i].size(); ++k)
            label += (k ? ", " : "") + c.name(blocks[i][k]);
        label += "}";
        const auto root = certs.map.delta[certs.map.block_of[blocks[i].front()]];
        os << "  b" << i << " [label=\"" << escape(label) << "\\ncertificate #" << root.node << "\"];\n";
    }

    const auto& kind = c.kind();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const state_id x = blocks[i].front();
        // Aggregate the representative's successors per (slot, target block).
        std::map<std::pair<std::uint32_t, std::size_t>, std::optional<weight>> arcs;
        for (auto e = c.edge_begin(x); e < c.edge_end(x); ++e) {
            auto at = std::make_pair(c.slot(e), index_of_block[certs.map.block_of[c.target(e)]]);
            auto& w = arcs[at];
            if (kind.weight_monoid()) {
                if (!w)
                    w = c.edge_weight(e);
                else
                    *w += c.edge_weight(e);
            }
        }
        for (const auto& [at, w] : arcs) {
            std::string label;
            if (!kind.alphabet().empty())
                label = kind.alphabet()[at.first];
            else if (kind.is<signature_functor>())
                label = std::to_string(at.first + 1);
            if (w)
                label += (label.empty() ? "" : " ") + w->to_string();
            os << "  b" << i << " -> b" << at.second;
            if (!label.empty())
                os << " [label=\"" << escape(label) << "\"]";
            os << ";\n";
        }
        if (kind.is<dfa_functor>() || kind.is<signature_functor>())
            os << "  b" << i << " [xlabel=\"" << escape(kind.symbol_name(c.head(x))) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace coalcert
