#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pencil/model.hpp"
#include "pencil/spectral.hpp"

namespace pencil {

enum class TheoremId { t31, t32, ground_state, eq39 };
enum class Verdict { consistent, violated, inconclusive };

std::string_view to_string(TheoremId id);
std::string_view to_string(Verdict verdict);

struct VerificationReport {
  TheoremId theorem = TheoremId::t31;
  std::string inputs_digest;
  std::vector<std::pair<std::string, double>> metrics;
  Verdict verdict = Verdict::inconclusive;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> notes;

  void set(std::string name, double value);
  /// NaN when absent.
  double metric(std::string_view name) const;
};

nlohmann::json to_json(const VerificationReport& report);

struct HarnessOptions {
  SearchOptions search;
  /// Spectra closer than this (all units matched) count as equal.
  double match_tol = 1e-4;
  /// Threshold on potential-side quantities (mean difference, potential size, residuals).
  double tol = 1e-8;
  /// Repeat spectral computations on the doubled grid and report the drift.
  bool cross_check = true;
};

/// Mean-potential uniqueness tested through its contrapositive: a nonzero
/// int_0^pi (Q - Q~) with identical spectra would be a violation.
/// Requires alpha(pi) = 0 (HypothesisError otherwise).
VerificationReport theorem31_contrapositive(const PencilProblem& problem,
                                            const std::vector<ScalarFunction>& q_tilde,
                                            const UniformGrid& grid, double lambda_min,
                                            double lambda_max, const HarnessOptions& options = {});

/// Rigidity: a nonzero potential whose Neumann spectrum on
/// [-n_max - 0.25, n_max + 0.25] reproduces the integers (multiplicity d) is a
/// violation. Requires alpha(pi) = 0 and Neumann boundary data.
VerificationReport theorem32_forward(const PencilProblem& problem, const UniformGrid& grid,
                                     int n_max, const HarnessOptions& options = {});

/// Residuals r_j = max_x |Q(x) e_j| of constant vectors at lambda = 0.
VerificationReport ground_state_check(const PencilProblem& problem, const UniformGrid& grid,
                                      double tol = 1e-8);

struct IntegralIdentity {
  Matrix lhs;  // int_0^pi Q
  Matrix rhs;  // -int_0^pi P^2
  double residual = 0.0;
};

IntegralIdentity integral_identity_39(const PencilProblem& problem);
/// Diagnostic report of integral_identity_39; always inconclusive.
VerificationReport integral_identity_report(const PencilProblem& problem);

/// Seeded perturbation families: Q entries are cosine series with at most 3
/// modes and coefficients uniform in [-0.5, 0.5]; P entries are c cos(x) with
/// |c| <= 0.5, so alpha(pi) = 0 exactly.
std::vector<ScalarFunction> random_q_entries(int dimension, std::uint64_t seed);
std::vector<ScalarFunction> random_p_diagonal(int dimension, std::uint64_t seed);

}  // namespace pencil
