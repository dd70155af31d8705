#include "pencil/json_io.hpp"

#include <cinttypes>
#include <cstdio>

#include "pencil/errors.hpp"

namespace pencil {

using nlohmann::json;

namespace {

std::string_view kind_name(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::zero:
      return "zero";
    case FunctionKind::constant:
      return "constant";
    case FunctionKind::polynomial:
      return "polynomial";
    case FunctionKind::cosine_series:
      return "cosine_series";
  }
  return "zero";
}

FunctionKind kind_from_name(const std::string& name) {
  if (name == "zero") return FunctionKind::zero;
  if (name == "constant") return FunctionKind::constant;
  if (name == "polynomial") return FunctionKind::polynomial;
  if (name == "cosine_series") return FunctionKind::cosine_series;
  throw ConfigError("unknown function kind '" + name + "'");
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

Matrix matrix_from_json(const json& j, int d, const char* name) {
  if (!j.is_array()) throw ConfigError(std::string("boundary.") + name + " must be an array");
  // accept either a flat row-major array or an array of rows
  std::vector<double> flat;
  for (const auto& item : j) {
    if (item.is_array()) {
      for (const auto& v : item) flat.push_back(v.get<double>());
    } else {
      flat.push_back(item.get<double>());
    }
  }
  if (flat.size() != static_cast<std::size_t>(d) * d) {
    throw ConfigError(std::string("boundary.") + name + " needs " + std::to_string(d * d) +
                      " entries");
  }
  Matrix m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = flat[static_cast<std::size_t>(r) * d + c];
  }
  return m;
}

BoundaryMatrices boundary_from_json(const json& j, int d) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "neumann") return BoundaryMatrices::neumann(d);
    if (name == "dirichlet") return BoundaryMatrices::dirichlet(d);
    throw ConfigError("unknown boundary shorthand '" + name + "'");
  }
  if (!j.is_object()) throw ConfigError("boundary must be a string or an object");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) throw ConfigError(std::string("boundary is missing ") + key);
  }
  return {matrix_from_json(j.at("A"), d, "A"), matrix_from_json(j.at("B"), d, "B"),
          matrix_from_json(j.at("C"), d, "C"), matrix_from_json(j.at("D"), d, "D")};
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t stop = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < stop; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

json to_json(const ScalarFunction& f) {
  json out;
  out["kind"] = kind_name(f.kind());
  out["coefficients"] = std::vector<double>(f.coefficients().begin(), f.coefficients().end());
  return out;
}

ScalarFunction scalar_function_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("function spec must be an object with a 'kind'");
  }
  const auto kind = kind_from_name(j.at("kind").get<std::string>());
  std::vector<double> coefficients;
  if (j.contains("coefficients")) coefficients = j.at("coefficients").get<std::vector<double>>();
  try {
    return ScalarFunction::make(kind, std::move(coefficients));
  } catch (const StructuralError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<ScalarFunction> functions_from_json(const json& array) {
  if (!array.is_array()) throw ConfigError("expected an array of function specs");
  std::vector<ScalarFunction> out;
  out.reserve(array.size());
  for (const auto& item : array) out.push_back(scalar_function_from_json(item));
  return out;
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ConfigError("JSON syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what(),
                      line, column);
  }
}

ProblemDocument problem_document_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("problem document must be a JSON object");
    if (doc.contains("schema") && doc.at("schema").get<std::string>() != kSchemaVersion) {
      throw ConfigError("unsupported schema '" + doc.at("schema").get<std::string>() + "'");
    }
    for (const char* key : {"dimension", "p", "q", "boundary"}) {
      if (!doc.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    }
    const int d = doc.at("dimension").get<int>();
    if (d < 1) throw ConfigError("dimension must be positive");
    auto p = functions_from_json(doc.at("p"));
    auto q = functions_from_json(doc.at("q"));
    if (p.size() != static_cast<std::size_t>(d)) {
      throw ConfigError("'p' must list exactly d diagonal entries");
    }
    if (q.size() != PencilProblem::upper_size(d)) {
      throw ConfigError("'q' must list d(d+1)/2 upper-triangle entries");
    }
    auto boundary = boundary_from_json(doc.at("boundary"), d);
    std::size_t grid_n = 4000;
    if (doc.contains("grid_n")) {
      const auto n = doc.at("grid_n").get<long long>();
      if (n < 16) throw ConfigError("grid_n must be at least 16");
      grid_n = static_cast<std::size_t>(n);
    }
    try {
      return {PencilProblem(std::move(p), std::move(q), std::move(boundary)), grid_n};
    } catch (const InvalidBoundaryError& e) {
      throw ConfigError(e.what());
    } catch (const ShapeError& e) {
      throw ConfigError(e.what());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("schema error: ") + e.what());
  }
}

BoundaryMatrices boundary_from_document(const json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("dimension") || !doc.contains("boundary")) {
      throw ConfigError("document needs 'dimension' and 'boundary'");
    }
    const int d = doc.at("dimension").get<int>();
    if (d < 1) throw ConfigError("dimension must be positive");
    return boundary_from_json(doc.at("boundary"), d);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("schema error: ") + e.what());
  }
}

ProblemDocument parse_problem_document(std::string_view text) {
  return problem_document_from_json(parse_json_text(text));
}

json to_json(const ProblemDocument& doc) {
  const auto& problem = doc.problem;
  json out;
  out["schema"] = kSchemaVersion;
  out["dimension"] = problem.dimension();
  json p = json::array();
  for (const auto& f : problem.p_diagonal()) p.push_back(to_json(f));
  out["p"] = std::move(p);
  json q = json::array();
  for (const auto& f : problem.q_upper()) q.push_back(to_json(f));
  out["q"] = std::move(q);
  const auto& b = problem.boundary();
  out["boundary"] = {{"A", matrix_to_json(b.left_a)},
                     {"B", matrix_to_json(b.left_b)},
                     {"C", matrix_to_json(b.right_c)},
                     {"D", matrix_to_json(b.right_d)}};
  out["grid_n"] = doc.grid_n;
  return out;
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

std::string content_digest(const PencilProblem& problem) {
  auto doc = to_json(ProblemDocument{problem, 0});
  doc.erase("grid_n");
  return content_digest(doc.dump());
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace pencil
