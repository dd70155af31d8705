#include "pencil/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pencil/asymptotics.hpp"
#include "pencil/errors.hpp"
#include "pencil/json_io.hpp"
#include "pencil/propagator.hpp"

namespace pencil {

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::t31:
      return "T31";
    case TheoremId::t32:
      return "T32";
    case TheoremId::ground_state:
      return "ground_state";
    case TheoremId::eq39:
      return "eq39";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::consistent:
      return "consistent";
    case Verdict::violated:
      return "violated";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void VerificationReport::set(std::string name, double value) {
  for (auto& [key, v] : metrics) {
    if (key == name) {
      v = value;
      return;
    }
  }
  metrics.emplace_back(std::move(name), value);
}

double VerificationReport::metric(std::string_view name) const {
  for (const auto& [key, v] : metrics) {
    if (key == name) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [key, v] : report.metrics) metrics[key] = v;
  nlohmann::json out;
  out["theorem_id"] = to_string(report.theorem);
  out["inputs_digest"] = report.inputs_digest;
  out["metrics"] = std::move(metrics);
  out["verdict"] = to_string(report.verdict);
  out["seed"] = report.seed ? nlohmann::json(*report.seed) : nlohmann::json(nullptr);
  out["notes"] = report.notes;
  return out;
}

namespace {

constexpr double kAlphaHypothesisTol = 1e-10;

void require_alpha_pi_zero(const PencilProblem& problem) {
  const double a = problem.alpha(std::numbers::pi).cwiseAbs().maxCoeff();
  if (a > kAlphaHypothesisTol) {
    throw HypothesisError("alpha(pi) = 0 is required; max |alpha_j(pi)| = " + format_number(a));
  }
}

std::string digest_of(const nlohmann::json& inputs) { return content_digest(inputs.dump()); }

nlohmann::json problem_json(const PencilProblem& problem) {
  auto j = to_json(ProblemDocument{problem, 0});
  j.erase("grid_n");
  return j;
}

double potential_size(const PencilProblem& problem, const UniformGrid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i <= grid.n_steps(); ++i) {
    const double x = grid.node(i);
    s = std::max(s, problem.p_values(x).cwiseAbs().maxCoeff());
    s = std::max(s, problem.evaluate_q(x).cwiseAbs().maxCoeff());
  }
  return s;
}

// Retries with a slightly shifted window when an endpoint lands on an eigenvalue.
template <typename Fn>
auto with_window_retry(double& lambda_min, double& lambda_max, VerificationReport& report, Fn&& fn) {
  constexpr int kAttempts = 5;
  constexpr double kShift = 0.0371;
  for (int attempt = 0;; ++attempt) {
    try {
      return fn(lambda_min, lambda_max);
    } catch (const AmbiguousWindowError&) {
      if (attempt + 1 == kAttempts) throw;
      lambda_min -= kShift;
      lambda_max += kShift;
      report.notes.push_back("window widened to [" + format_number(lambda_min) + ", " +
                             format_number(lambda_max) + "] after an endpoint hit an eigenvalue");
    }
  }
}

// Uniform in [lo, hi] from the top 53 bits; independent of the standard library's distributions.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

VerificationReport theorem31_contrapositive(const PencilProblem& problem,
                                            const std::vector<ScalarFunction>& q_tilde,
                                            const UniformGrid& grid, double lambda_min,
                                            double lambda_max, const HarnessOptions& options) {
  require_alpha_pi_zero(problem);
  const PencilProblem tilde = problem.with_q(q_tilde);

  VerificationReport report;
  report.theorem = TheoremId::t31;
  nlohmann::json qt = nlohmann::json::array();
  for (const auto& f : q_tilde) qt.push_back(to_json(f));
  report.inputs_digest = digest_of({{"problem", problem_json(problem)},
                                    {"q_tilde", qt},
                                    {"grid_n", grid.n_steps()},
                                    {"window", {lambda_min, lambda_max}}});

  const double delta = (problem.integral_q(std::numbers::pi) - tilde.integral_q(std::numbers::pi))
                           .cwiseAbs()
                           .maxCoeff();
  report.set("alpha_pi_max", problem.alpha(std::numbers::pi).cwiseAbs().maxCoeff());
  report.set("mean_q_difference", delta);

  const Shooter shooter(problem, grid);
  const Shooter shooter_tilde(tilde, grid);
  const auto [spectrum, spectrum_tilde] =
      with_window_retry(lambda_min, lambda_max, report, [&](double lo, double hi) {
        return std::pair{locate_eigenvalues(shooter, lo, hi, options.search),
                         locate_eigenvalues(shooter_tilde, lo, hi, options.search)};
      });
  const auto cmp = compare_spectra(spectrum, spectrum_tilde, options.match_tol);

  report.set("window_min", lambda_min);
  report.set("window_max", lambda_max);
  report.set("eigenvalue_units", spectrum.total_multiplicity());
  report.set("eigenvalue_units_tilde", spectrum_tilde.total_multiplicity());
  report.set("spectral_deviation", cmp.max_deviation);
  report.set("unmatched_units", static_cast<double>(cmp.unmatched_left.size() +
                                                    cmp.unmatched_right.size()));
  report.set("match_tol", options.match_tol);
  report.set("tol", options.tol);

  if (delta <= options.tol) {
    report.verdict = Verdict::inconclusive;
    report.notes.emplace_back("mean potentials agree; the conclusion holds trivially for this pair");
  } else if (cmp.equivalent()) {
    report.verdict = delta >= 2.0 * options.tol ? Verdict::violated : Verdict::inconclusive;
  } else {
    report.verdict = Verdict::consistent;
  }
  return report;
}

VerificationReport theorem32_forward(const PencilProblem& problem, const UniformGrid& grid,
                                     int n_max, const HarnessOptions& options) {
  require_alpha_pi_zero(problem);
  if (!problem.boundary().is_neumann()) {
    throw HypothesisError("the rigidity check needs Neumann boundary data (A = C = 0)");
  }
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");

  VerificationReport report;
  report.theorem = TheoremId::t32;
  report.inputs_digest = digest_of(
      {{"problem", problem_json(problem)}, {"grid_n", grid.n_steps()}, {"n_max", n_max}});

  const auto reference = unperturbed_spectrum(problem.dimension(), n_max);
  const auto spectrum = locate_eigenvalues(problem, grid, reference.lambda_min,
                                           reference.lambda_max, options.search);
  const auto cmp = compare_spectra(spectrum, reference, options.match_tol);
  const double size = potential_size(problem, grid);

  report.set("alpha_pi_max", problem.alpha(std::numbers::pi).cwiseAbs().maxCoeff());
  report.set("potential_size", size);
  report.set("spectral_deviation", cmp.max_deviation);
  report.set("unmatched_units", static_cast<double>(cmp.unmatched_left.size() +
                                                    cmp.unmatched_right.size()));
  report.set("eigenvalue_units", spectrum.total_multiplicity());
  report.set("n_max", n_max);
  report.set("match_tol", options.match_tol);
  report.set("tol", options.tol);

  if (options.cross_check) {
    const auto fine = locate_eigenvalues(problem, UniformGrid(2 * grid.n_steps()),
                                         reference.lambda_min, reference.lambda_max, options.search);
    const auto fine_cmp = compare_spectra(fine, reference, options.match_tol);
    report.set("spectral_deviation_fine_grid", fine_cmp.max_deviation);
    report.set("grid_drift", compare_spectra(spectrum, fine, options.match_tol).max_deviation);
  }

  const bool same = cmp.equivalent();
  if (same && size > 100.0 * options.match_tol) {
    report.verdict = Verdict::violated;
  } else if ((same && size <= options.tol) || (!same && size > options.tol)) {
    report.verdict = Verdict::consistent;
  } else {
    report.verdict = Verdict::inconclusive;
    report.notes.emplace_back(same ? "potential too small to separate from the zero spectrum"
                                   : "zero potential but spectra differ; check grid resolution");
  }
  return report;
}

VerificationReport ground_state_check(const PencilProblem& problem, const UniformGrid& grid,
                                      double tol) {
  const int d = problem.dimension();
  VerificationReport report;
  report.theorem = TheoremId::ground_state;
  report.inputs_digest =
      digest_of({{"problem", problem_json(problem)}, {"grid_n", grid.n_steps()}});

  // only Q enters: (2 lambda P + Q) e_j at lambda = 0 is Q e_j
  Vector residual = Vector::Zero(d);
  for (std::size_t i = 0; i <= grid.n_steps(); ++i) {
    const Matrix q = problem.evaluate_q(grid.node(i));
    for (int j = 0; j < d; ++j) residual(j) = std::max(residual(j), q.col(j).cwiseAbs().maxCoeff());
  }
  for (int j = 0; j < d; ++j) report.set("r_" + std::to_string(j + 1), residual(j));
  const double worst = residual.maxCoeff();
  report.set("max_residual", worst);
  report.set("tol", tol);

  const bool q_zero = std::all_of(problem.q_upper().begin(), problem.q_upper().end(),
                                  [](const ScalarFunction& f) { return f.is_identically_zero(); });
  report.set("q_identically_zero", q_zero ? 1.0 : 0.0);
  int constant_directions = 0;
  for (int j = 0; j < d; ++j) {
    if (residual(j) <= tol) ++constant_directions;
  }
  report.set("constant_ground_directions", constant_directions);

  report.verdict = (worst <= tol) == q_zero ? Verdict::consistent : Verdict::inconclusive;
  if (report.verdict == Verdict::inconclusive) {
    report.notes.emplace_back("Q is nonzero as a function but below tol on the grid");
  }
  return report;
}

IntegralIdentity integral_identity_39(const PencilProblem& problem) {
  IntegralIdentity out;
  out.lhs = problem.integral_q(std::numbers::pi);
  out.rhs = -problem.integral_p_squared(std::numbers::pi);
  out.residual = (out.lhs - out.rhs).cwiseAbs().maxCoeff();
  return out;
}

VerificationReport integral_identity_report(const PencilProblem& problem) {
  const auto identity = integral_identity_39(problem);
  VerificationReport report;
  report.theorem = TheoremId::eq39;
  report.inputs_digest = digest_of({{"problem", problem_json(problem)}});
  report.set("residual", identity.residual);
  report.set("lhs_trace", identity.lhs.trace());
  report.set("rhs_trace", identity.rhs.trace());
  report.verdict = Verdict::inconclusive;
  report.notes.emplace_back("diagnostic only; the spectral hypothesis is not certified");
  return report;
}

std::vector<ScalarFunction> random_q_entries(int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ScalarFunction> out;
  for (std::size_t e = 0; e < PencilProblem::upper_size(dimension); ++e) {
    const auto modes = 1 + static_cast<std::size_t>(rng() % 3);
    std::vector<double> c(modes);
    for (auto& v : c) v = uniform(rng, -0.5, 0.5);
    out.push_back(ScalarFunction::cosine_series(std::move(c)));
  }
  return out;
}

std::vector<ScalarFunction> random_p_diagonal(int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<ScalarFunction> out;
  for (int j = 0; j < dimension; ++j) {
    out.push_back(ScalarFunction::cosine_series({0.0, uniform(rng, -0.5, 0.5)}));
  }
  return out;
}

}  // namespace pencil
