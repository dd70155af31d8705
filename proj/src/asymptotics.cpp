#include "pencil/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pencil/errors.hpp"
#include "pencil/json_io.hpp"

namespace pencil {

Spectrum unperturbed_spectrum(int dimension, int n_max) {
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");
  if (dimension < 1) throw PreconditionError("dimension must be positive");
  Spectrum s;
  s.lambda_min = -n_max - 0.25;
  s.lambda_max = n_max + 0.25;
  for (int n = -n_max; n <= n_max; ++n) {
    const auto v = static_cast<double>(n);
    s.records.push_back({v, dimension, 0.0, {v, v}});
  }
  return s;
}

OracleSpectrum constant_coefficient_oracle(double p0, double q0, int n_max) {
  OracleSpectrum out;
  for (int n = 0; n <= n_max; ++n) {
    const double disc = p0 * p0 + q0 + static_cast<double>(n) * n;
    if (disc < 0.0) {
      out.skipped.push_back(n);
      continue;
    }
    const double root = std::sqrt(disc);
    out.values.push_back(p0 + root);
    out.values.push_back(p0 - root);
  }
  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  return out;
}

std::vector<AsymptoticPrediction> leading_order_predictions(const PencilProblem& problem,
                                                            int n_min, int n_max) {
  const Vector alpha_pi = problem.alpha(std::numbers::pi);
  std::vector<AsymptoticPrediction> out;
  for (int n = n_min; n <= n_max; ++n) {
    for (int j = 0; j < problem.dimension(); ++j) {
      out.push_back({n, j + 1, n + alpha_pi(j) / std::numbers::pi});
    }
  }
  return out;
}

GapReport asymptotic_gap_report(const Spectrum& spectrum,
                                const std::vector<AsymptoticPrediction>& predictions) {
  // one computed multiplicity unit per prediction, closest pairs first
  const auto units = spectrum.expanded_values();
  struct Pair {
    double distance;
    std::size_t prediction;
    std::size_t unit;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t u = 0; u < units.size(); ++u) {
      pairs.push_back({std::abs(units[u] - predictions[i].predicted), i, u});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.distance < b.distance; });
  std::vector<long> assigned(predictions.size(), -1);
  std::vector<bool> used(units.size(), false);
  for (const auto& pr : pairs) {
    if (assigned[pr.prediction] >= 0 || used[pr.unit]) continue;
    assigned[pr.prediction] = static_cast<long>(pr.unit);
    used[pr.unit] = true;
  }

  GapReport report;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    GapRow row{p.n, p.channel, 0.0, p.predicted, 0.0, false, {}};
    if (p.predicted < spectrum.lambda_min || p.predicted > spectrum.lambda_max) {
      row.skipped = true;
      row.note = "prediction outside window";
    } else if (assigned[i] < 0) {
      row.skipped = true;
      row.note = "no computed eigenvalue";
    } else {
      row.computed = units[static_cast<std::size_t>(assigned[i])];
      row.gap = std::abs(row.computed - p.predicted);
    }
    report.rows.push_back(std::move(row));
  }

  double num = 0.0;
  double den = 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& row : report.rows) {
    if (row.skipped || row.n < 5) continue;
    const double n = row.n;
    num += row.gap / n;
    den += 1.0 / (n * n);
    if (row.gap > 0.0) {
      const double lx = std::log(n);
      const double ly = std::log(row.gap);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++count;
    }
  }
  report.fitted_c = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  const double var = count * sxx - sx * sx;
  report.fitted_exponent =
      count >= 2 && var > 0.0 ? (count * sxy - sx * sy) / var : std::numeric_limits<double>::quiet_NaN();
  return report;
}

std::string gap_report_csv(const GapReport& report) {
  std::string out = "n,j,computed,predicted,gap\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.n) + "," + std::to_string(row.channel) + ",";
    out += row.skipped ? std::string() : format_number(row.computed);
    out += "," + format_number(row.predicted) + ",";
    out += row.skipped ? std::string() : format_number(row.gap);
    out += "\n";
  }
  return out;
}

}  // namespace pencil
