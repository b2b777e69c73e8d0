#include "coalcert/semantics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <unordered_map>

namespace coalcert {

formula_evaluator::formula_evaluator(const coalgebra& c, const formula_dag& dag)
    : c_(c), dag_(dag), cache_(dag.size()), done_(dag.size(), false)
{
}

const state_set& formula_evaluator::extension(node_id id)
{
    if (done_[id])
        return cache_[id];
    // Children have smaller ids, so an explicit stack in id order suffices.
    std::vector<node_id> stack{id};
    while (!stack.empty()) {
        auto top = stack.back();
        if (done_[top]) {
            stack.pop_back();
            continue;
        }
        bool ready = true;
        for (auto r : dag_.node(top).children)
            if (!done_[r.node]) {
                stack.push_back(r.node);
                ready = false;
            }
        if (ready) {
            compute(top);
            stack.pop_back();
        }
    }
    return cache_[id];
}

state_set formula_evaluator::extension(node_ref r)
{
    state_set s = extension(r.node);
    if (r.negated)
        s.flip();
    return s;
}

void formula_evaluator::compute(node_id id)
{
    const auto& node = dag_.node(id);
    const std::size_t n = c_.size();
    state_set out(n);
    auto child = [&](std::size_t i) {
        state_set s = cache_[node.children[i].node];
        if (node.children[i].negated)
            s.flip();
        return s;
    };
    switch (node.kind) {
    case node_kind::top:
        out.set();
        break;
    case node_kind::conj:
        out = child(0) & child(1);
        break;
    case node_kind::mod0:
        for (state_id x = 0; x < n; ++x)
            out[x] = eval1(c_, x) == *node.k;
        break;
    case node_kind::mod2: {
        auto d = child(0);
        std::vector<std::uint8_t> member(n);
        for (state_id y = 0; y < n; ++y)
            member[y] = d[y] ? 1 : 0;
        for (state_id x = 0; x < n; ++x)
            out[x] = eval_colored(c_, x, member, 2) == *node.k;
        break;
    }
    case node_kind::mod3: {
        auto d = child(0);
        auto b = child(1);
        if (!d.is_subset_of(b))
            violations_.push_back(id);
        std::vector<std::uint8_t> colors(n);
        for (state_id y = 0; y < n; ++y)
            colors[y] = b[y] ? (d[y] ? 2 : 1) : 0;
        for (state_id x = 0; x < n; ++x)
            out[x] = eval3(c_, x, colors) == *node.k;
        break;
    }
    }
    cache_[id] = std::move(out);
    done_[id] = true;
}

state_set eval_formula(const coalgebra& c, const formula_dag& dag, node_ref root)
{
    formula_evaluator ev(c, dag);
    return ev.extension(root);
}

std::vector<state_id> members(const state_set& s)
{
    std::vector<state_id> out;
    for (auto i = s.find_first(); i != state_set::npos; i = s.find_next(i))
        out.push_back(static_cast<state_id>(i));
    return out;
}

namespace {

// Canonical text of F(block)(c(x)), written without the key machinery.
std::string image(const coalgebra& c, state_id x, const std::vector<std::uint32_t>& block)
{
    const auto& kind = c.kind();
    std::string s;
    auto put = [&](std::uint64_t v) { s += std::to_string(v) + ","; };
    if (kind.is<powerset_functor>()) {
        std::vector<std::uint32_t> image;
        for (auto y : c.successors(x))
            image.push_back(block[y]);
        std::sort(image.begin(), image.end());
        image.erase(std::unique(image.begin(), image.end()), image.end());
        for (auto b : image)
            put(b);
        return s;
    }
    if (kind.weight_monoid()) {
        // (label, block) -> weight, zero sums dropped.
        std::map<std::pair<std::uint32_t, std::uint32_t>, weight> sums;
        for (auto e = c.edge_begin(x); e < c.edge_end(x); ++e) {
            auto at = std::make_pair(c.slot(e), block[c.target(e)]);
            auto [it, fresh] = sums.try_emplace(at, c.edge_weight(e));
            if (!fresh)
                it->second += c.edge_weight(e);
        }
        for (std::size_t a = 0; a < kind.alphabet().size(); ++a)
            s += c.defined(x, a) ? "d" : "u";
        s += "|";
        for (const auto& [at, w] : sums) {
            if (w.is_zero())
                continue;
            s += std::to_string(at.first) + ":" + std::to_string(at.second) + "=" + w.to_string() + ";";
        }
        return s;
    }
    put(c.head(x));
    for (auto y : c.successors(x))
        put(block[y]);
    return s;
}

} // namespace

std::vector<std::vector<state_id>> naive_partition(const coalgebra& c)
{
    const std::size_t n = c.size();
    std::vector<std::uint32_t> block(n, 0);
    std::size_t count = n > 0 ? 1 : 0;
    while (true) {
        std::unordered_map<std::string, std::uint32_t> ids;
        std::vector<std::uint32_t> next(n);
        for (state_id x = 0; x < n; ++x) {
            auto sig = std::to_string(block[x]) + "#" + image(c, x, block);
            auto [it, fresh] = ids.try_emplace(sig, static_cast<std::uint32_t>(ids.size()));
            next[x] = it->second;
        }
        block = std::move(next);
        if (ids.size() == count)
            break;
        count = ids.size();
    }
    return blocks_of(block);
}

check_report check_certificates(const coalgebra& c, const certified& certs)
{
    check_report report;
    formula_evaluator ev(c, certs.dag);
    for (const auto& block : blocks_of(certs.map.block_of)) {
        const auto root = certs.map.delta[certs.map.block_of[block.front()]];
        auto ext = members(ev.extension(root));
        if (ext != block)
            report.violations.push_back({block, root, std::move(ext)});
    }
    report.contract_violations = ev.contract_violations();
    return report;
}

nlohmann::json report_to_json(const coalgebra& c, const check_report& report)
{
    auto names = [&](const std::vector<state_id>& xs) {
        auto out = nlohmann::json::array();
        for (auto x : xs)
            out.push_back(c.name(x));
        return out;
    };
    auto list = nlohmann::json::array();
    for (const auto& v : report.violations)
        list.push_back({{"block", names(v.block)},
                        {"formulaRoot", node_ref_to_json(v.root)},
                        {"extension", names(v.extension)}});
    return {{"violations", list}, {"contractViolations", report.contract_violations}};
}

} // namespace coalcert
