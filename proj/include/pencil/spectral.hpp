#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pencil/model.hpp"
#include "pencil/propagator.hpp"

namespace pencil {

struct SearchOptions {
  /// Scan intervals over the window; 0 selects 200 per unit of lambda.
  std::size_t n_scan = 0;
  /// Acceptance bound on sigma_min normalized by the window-wide sigma_max.
  double accept_tol = 1e-6;
  double refine_tol = 1e-9;
  double cluster_tol = 1e-5;
  /// Upper bound, relative to the window scale, on singular values counted
  /// toward multiplicity.
  double multiplicity_tol = 1e-3;
  /// Nested subdivisions (16 each) around every sigma_min dip; separates
  /// eigenvalues closer than one scan interval.
  int zoom_depth = 3;
  bool parallel = true;

  std::size_t scan_intervals(double lambda_min, double lambda_max) const;
};

struct EigenvalueRecord {
  double value = 0.0;
  int multiplicity = 1;
  double residual = 0.0;
  std::pair<double, double> bracket;
};

struct Spectrum {
  std::vector<EigenvalueRecord> records;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::string problem_hash;

  int total_multiplicity() const;
  /// Values repeated according to multiplicity.
  std::vector<double> expanded_values() const;
  /// Record closest to lambda, or nullptr if empty.
  const EigenvalueRecord* nearest(double lambda) const;
};

enum class RefineMode { det_bisection, sigma_min_search };

struct RefinedRoot {
  double lambda = 0.0;
  double sigma_min = 0.0;  // unnormalized
  std::pair<double, double> bracket;
  int iterations = 0;
};

inline constexpr int kMaxRefineIterations = 200;

/// Shrinks [lo, hi] below refine_tol around a root of det W (bisection) or a
/// minimum of sigma_min (golden section). Throws BracketError when det mode has
/// no sign change and ConvergenceError past kMaxRefineIterations.
RefinedRoot refine_root(const Shooter& shooter, std::pair<double, double> bracket, RefineMode mode,
                        double refine_tol);

/// Number of singular values of W(lambda) below `cutoff`, clamped to [1, d].
int multiplicity_at(const Shooter& shooter, double lambda, double cutoff);

/// Real eigenvalues in [lambda_min, lambda_max] as singular points of W.
Spectrum locate_eigenvalues(const Shooter& shooter, double lambda_min, double lambda_max,
                            const SearchOptions& options = {});
Spectrum locate_eigenvalues(const PencilProblem& problem, const UniformGrid& grid,
                            double lambda_min, double lambda_max,
                            const SearchOptions& options = {});

struct SpectrumComparison {
  std::vector<std::pair<double, double>> matched;
  double max_deviation = 0.0;
  std::vector<double> unmatched_left;
  std::vector<double> unmatched_right;
  double match_tol = 0.0;

  /// Every unit matched and no pair farther apart than match_tol.
  bool equivalent() const;
};

/// Greedy nearest-pair matching over multiplicity units. Throws
/// ComparisonError when the windows differ.
SpectrumComparison compare_spectra(const Spectrum& left, const Spectrum& right, double match_tol);

nlohmann::json to_json(const SpectrumComparison& comparison);
/// `value,multiplicity,residual`
std::string spectrum_csv(const Spectrum& spectrum);
/// `lambda,det_w,sigma_min`
std::string scan_csv(const std::vector<CharacteristicSample>& samples);

}  // namespace pencil
