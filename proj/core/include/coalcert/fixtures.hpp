#pragma once

#include "coalcert/coalgebra.hpp"

#include <cstdint>
#include <string>

namespace coalcert {

// x -> {x, x1}, x1 -> {x1, z}, z -> {}, y -> {y, z}. The formula
// [] <> T separates x from y.
[[nodiscard]] coalgebra fixture_fig1();

// Lmc over {tau}: x -> 1/2 z2 + 1/2 z1, z2 -> z1, y -> z1, z1 stuck.
[[nodiscard]] coalgebra fixture_fig2();

// Powerset system with layers 0..k of states x_i, y_i, z_i whose
// distinguishing formulas grow like Fibonacci numbers:
//   x_0 -> {y_0}, y_0 -> {}, z_0 -> {x_0},
//   x_{i+1} -> {x_i, y_i, z_i}, y_{i+1} -> {y_i, z_i}, z_{i+1} -> {x_i, z_i}.
[[nodiscard]] coalgebra fixture_threetower(unsigned k);

// Rational-weighted system with layers 0..k of states w_i, x_i, y_i, z_i
// whose cancellative certificates grow like 2^i.
[[nodiscard]] coalgebra fixture_layers(unsigned k);

struct random_spec
{
    // "powerset", "monoid-int", "monoid-rational", "monoid-bool", "dist",
    // "lmc", "dfa", "signature".
    std::string kind = "powerset";
    std::size_t states = 10;
    // Probability of an edge between an ordered pair of states (per label
    // for Lmc); Dfa and Signature ignore it except for symbol choice.
    double density = 0.2;
    std::uint64_t seed = 1;
    // When set, the system is built from a random base of states/2 states
    // and a copy whose edges are split or redirected between the two
    // copies, so many states end up behaviourally equivalent.
    bool mirrored = false;
};

// Deterministic for a given spec. Throws error for unknown kinds.
[[nodiscard]] coalgebra random_coalgebra(const random_spec& spec);

[[nodiscard]] const std::vector<std::string>& random_kinds();

} // namespace coalcert
