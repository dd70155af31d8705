#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pencil/model.hpp"

namespace pencil {

inline constexpr std::string_view kSchemaVersion = "pencil-spectra/1";

/// A problem definition document: the pencil plus its default grid size.
struct ProblemDocument {
  PencilProblem problem;
  std::size_t grid_n = 4000;
};

/// Parses a document. Syntax errors raise ConfigError carrying line/column;
/// schema errors raise ConfigError without position.
ProblemDocument parse_problem_document(std::string_view text);
ProblemDocument problem_document_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ProblemDocument& doc);

/// Boundary matrices of a document without the admissibility check, so that
/// inadmissible data can still be inspected.
BoundaryMatrices boundary_from_document(const nlohmann::json& doc);

nlohmann::json to_json(const ScalarFunction& f);
ScalarFunction scalar_function_from_json(const nlohmann::json& j);
std::vector<ScalarFunction> functions_from_json(const nlohmann::json& array);

/// Parses raw JSON text, converting nlohmann parse errors to ConfigError with
/// 1-based line and column.
nlohmann::json parse_json_text(std::string_view text);

/// Stable 64-bit FNV-1a digest of the canonical serialization, as 16 hex digits.
std::string content_digest(const PencilProblem& problem);
std::string content_digest(std::string_view bytes);

/// %.17g rendering used for every CSV number.
std::string format_number(double value);

}  // namespace pencil
