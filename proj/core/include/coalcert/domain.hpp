#pragma once

#include "coalcert/certificates.hpp"
#include "coalcert/coalgebra.hpp"
#include "coalcert/semantics.hpp"

#include <nlohmann/json_fwd.hpp>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coalcert {

// Formulas of the domain-specific logics:
//   T, ~F, F /\ F, F \/ F                      propositional
//   <> F                                       powerset: some successor satisfies F
//   <m> F                                      monoid/Dist: weight into [[F]] is exactly m
//   sym(s)                                     signature/Dfa: head symbol is s
//   pos{i,...} F                               signature/Dfa: exactly the listed
//                                              (1-based) arguments satisfy F
//   <a>=p F                                    Lmc: mass of [[F]] under label a
//                                              is at least p (undefined = 0)
//
// Values are immutable trees; copies share structure.
class domain_formula
{
public:
    enum class op
    {
        truth,
        negation,
        conjunction,
        disjunction,
        diamond,
        grade,
        symbol,
        positions,
        prob_at_least,
    };

    domain_formula();

    [[nodiscard]] static domain_formula truth();
    // Cancels double negation.
    [[nodiscard]] static domain_formula negation(domain_formula f);
    // Drops T conjuncts and collapses empty and singleton conjunctions.
    [[nodiscard]] static domain_formula conjunction(std::vector<domain_formula> parts);
    [[nodiscard]] static domain_formula disjunction(std::vector<domain_formula> parts);
    [[nodiscard]] static domain_formula diamond(domain_formula f);
    [[nodiscard]] static domain_formula grade(weight m, domain_formula f);
    [[nodiscard]] static domain_formula symbol(std::string name);
    [[nodiscard]] static domain_formula positions(std::vector<unsigned> indices, domain_formula f);
    [[nodiscard]] static domain_formula prob_at_least(std::string label, rational p, domain_formula f);

    [[nodiscard]] op kind() const { return node_->kind; }
    [[nodiscard]] const std::vector<domain_formula>& args() const { return node_->args; }
    [[nodiscard]] const weight& grade_value() const { return *node_->grade; }
    [[nodiscard]] const std::string& name() const { return node_->name; }
    [[nodiscard]] const std::vector<unsigned>& indices() const { return node_->indices; }
    [[nodiscard]] const rational& probability() const { return node_->probability; }

    // Identity of the shared node, for memoisation.
    [[nodiscard]] const void* identity() const { return node_.get(); }

    friend bool operator==(const domain_formula& a, const domain_formula& b);

private:
    struct node
    {
        op kind = op::truth;
        std::vector<domain_formula> args;
        std::optional<weight> grade;
        std::string name;
        std::vector<unsigned> indices;
        rational probability;
    };

    explicit domain_formula(std::shared_ptr<const node> n) : node_(std::move(n)) {}
    static domain_formula make(node n);

    std::shared_ptr<const node> node_;
};

// Nullary modality tau_o for o in F1.
[[nodiscard]] domain_formula domain_tau(const functor_kind& kind, const key& o);
// lambda_t(delta, rho) for t in F3.
[[nodiscard]] domain_formula domain_lambda(const functor_kind& kind, const key& t, const domain_formula& delta,
                                           const domain_formula& rho);
// kappa_s(delta) for s in F2; only for cancellative kinds.
[[nodiscard]] domain_formula domain_kappa(const functor_kind& kind, const key& s, const domain_formula& delta);

// Translates a dag formula into the domain logic:
//   <o>        -> tau_o
//   [t](d, b)  -> lambda_t(T d, T b /\ ~T d)
//   [s](d)     -> kappa_s(T d)
[[nodiscard]] domain_formula translate(const functor_kind& kind, const formula_dag& dag, node_ref root);

[[nodiscard]] state_set eval_domain(const coalgebra& c, const domain_formula& f);

// Size of the unfolded tree; each operator counts one.
[[nodiscard]] big_int domain_tree_size(const domain_formula& f);
// Number of distinct shared nodes.
[[nodiscard]] std::size_t domain_node_count(const domain_formula& f);

[[nodiscard]] std::string render_domain(const domain_formula& f);
[[nodiscard]] nlohmann::json domain_to_json(const domain_formula& f);
// Throws parse_error on syntax errors and kind_mismatch_error when a
// modality or literal does not fit the kind.
[[nodiscard]] domain_formula parse_domain(const functor_kind& kind, std::string_view text);

} // namespace coalcert
