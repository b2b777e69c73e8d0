#pragma once

#include "coalcert/certificates.hpp"
#include "coalcert/coalgebra.hpp"

#include <boost/dynamic_bitset.hpp>
#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace coalcert {

using state_set = boost::dynamic_bitset<>;

// Evaluates dag formulas over a coalgebra with one cached extension per
// node.
//
//   [[<o>]]       = { x | F!(c(x)) = o }
//   [[[s](d)]]    = { x | F chi_[[d]](c(x)) = s }
//   [[[t](d,b)]]  = { x | F chi_{[[d]] n [[b]]}^{[[b]]}(c(x)) = t }
//
// Ternary modalities are only meaningful when [[d]] is contained in [[b]];
// violations are recorded and can be inspected afterwards.
class formula_evaluator
{
public:
    formula_evaluator(const coalgebra& c, const formula_dag& dag);

    [[nodiscard]] const state_set& extension(node_id id);
    [[nodiscard]] state_set extension(node_ref r);

    [[nodiscard]] const std::vector<node_id>& contract_violations() const { return violations_; }

private:
    void compute(node_id id);

    const coalgebra& c_;
    const formula_dag& dag_;
    std::vector<state_set> cache_;
    std::vector<bool> done_;
    std::vector<node_id> violations_;
};

[[nodiscard]] state_set eval_formula(const coalgebra& c, const formula_dag& dag, node_ref root);

[[nodiscard]] std::vector<state_id> members(const state_set& s);

// Behavioural equivalence by naive fixpoint iteration of
// P_{i+1} = ker(F(P_i) . c), independent of the refinement engine.
// Blocks ordered by smallest state.
[[nodiscard]] std::vector<std::vector<state_id>> naive_partition(const coalgebra& c);

struct violation
{
    std::vector<state_id> block;
    node_ref root;
    std::vector<state_id> extension;
};

struct check_report
{
    std::vector<violation> violations;
    std::vector<node_id> contract_violations;

    [[nodiscard]] bool ok() const { return violations.empty() && contract_violations.empty(); }
};

// Checks [[delta(B)]] = B for every final block B.
[[nodiscard]] check_report check_certificates(const coalgebra& c, const certified& certs);

[[nodiscard]] nlohmann::json report_to_json(const coalgebra& c, const check_report& report);

} // namespace coalcert
