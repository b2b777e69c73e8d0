#pragma once

#include "coalcert/coalgebra.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <string_view>

namespace coalcert {

// Reads the JSON interchange format
//   {"functor": {"kind": ...}, "states": [...], "edges": {...}}
// Throws parse_error with the offending field path.
[[nodiscard]] coalgebra parse_coalgebra(const nlohmann::json& document);
[[nodiscard]] coalgebra parse_coalgebra_text(std::string_view text);

[[nodiscard]] nlohmann::json functor_to_json(const functor_kind& kind);
[[nodiscard]] functor_kind functor_from_json(const nlohmann::json& j);

// Inverse of parse_coalgebra up to zero weights and duplicate successors.
[[nodiscard]] nlohmann::json coalgebra_to_json(const coalgebra& c);

} // namespace coalcert
