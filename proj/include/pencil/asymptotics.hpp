#pragma once

#include <string>
#include <vector>

#include "pencil/model.hpp"
#include "pencil/spectral.hpp"

namespace pencil {

/// Spectrum of the zero pencil with Neumann data: the integers -n_max..n_max,
/// each of multiplicity d, on the window [-n_max - 0.25, n_max + 0.25].
Spectrum unperturbed_spectrum(int dimension, int n_max);

struct OracleSpectrum {
  std::vector<double> values;  // ascending, duplicates merged
  std::vector<int> skipped;    // n with p0^2 + q0 + n^2 < 0
};

/// Neumann eigenvalues of the scalar constant-coefficient pencil:
/// lambda^2 - 2 lambda p0 - q0 = n^2, i.e. p0 +- sqrt(p0^2 + q0 + n^2).
OracleSpectrum constant_coefficient_oracle(double p0, double q0, int n_max);

struct AsymptoticPrediction {
  int n = 0;
  int channel = 1;  // 1-based
  double predicted = 0.0;
};

/// n + alpha_j(pi) / pi for n in [n_min, n_max] and every channel j.
std::vector<AsymptoticPrediction> leading_order_predictions(const PencilProblem& problem,
                                                            int n_min, int n_max);

struct GapRow {
  int n = 0;
  int channel = 1;
  double computed = 0.0;
  double predicted = 0.0;
  double gap = 0.0;
  bool skipped = false;
  std::string note;
};

struct GapReport {
  std::vector<GapRow> rows;
  /// Least-squares c in gap ~ c / n over rows with n >= 5.
  double fitted_c = 0.0;
  /// Log-log slope of gap against n over the same rows (about -1 for 1/n decay).
  double fitted_exponent = 0.0;
};

GapReport asymptotic_gap_report(const Spectrum& spectrum,
                                const std::vector<AsymptoticPrediction>& predictions);

/// `n,j,computed,predicted,gap`; skipped rows leave computed and gap empty.
std::string gap_report_csv(const GapReport& report);

}  // namespace pencil
