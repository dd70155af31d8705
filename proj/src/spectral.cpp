#include "pencil/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "pencil/errors.hpp"
#include "pencil/json_io.hpp"

namespace pencil {

std::size_t SearchOptions::scan_intervals(double lambda_min, double lambda_max) const {
  if (n_scan > 0) return n_scan;
  const double width = lambda_max - lambda_min;
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(200.0 * width)));
}

int Spectrum::total_multiplicity() const {
  return std::accumulate(records.begin(), records.end(), 0,
                         [](int acc, const EigenvalueRecord& r) { return acc + r.multiplicity; });
}

std::vector<double> Spectrum::expanded_values() const {
  std::vector<double> out;
  for (const auto& r : records) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.value);
  return out;
}

const EigenvalueRecord* Spectrum::nearest(double lambda) const {
  const EigenvalueRecord* best = nullptr;
  for (const auto& r : records) {
    if (!best || std::abs(r.value - lambda) < std::abs(best->value - lambda)) best = &r;
  }
  return best;
}

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

RefinedRoot bisect(const Shooter& shooter, double lo, double hi, double refine_tol) {
  double f_lo = shooter.sample(lo).det_w;
  const double f_hi = shooter.sample(hi).det_w;
  if (sign(f_lo) * sign(f_hi) > 0.0) {
    throw BracketError("det W has no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  int it = 0;
  if (f_lo == 0.0) {
    hi = lo;
  } else if (f_hi == 0.0) {
    lo = hi;
  }
  while (hi - lo > refine_tol) {
    if (++it > kMaxRefineIterations) throw ConvergenceError("bisection iteration cap exceeded");
    const double mid = 0.5 * (lo + hi);
    const double f_mid = shooter.sample(mid).det_w;
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if (sign(f_mid) == sign(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  return {mid, shooter.sample(mid).sigma_min, {lo, hi}, it};
}

RefinedRoot golden_section(const Shooter& shooter, double lo, double hi, double refine_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = shooter.sample(c).sigma_min;
  double fd = shooter.sample(d).sigma_min;
  int it = 0;
  while (hi - lo > refine_tol) {
    if (++it > kMaxRefineIterations) throw ConvergenceError("golden-section iteration cap exceeded");
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = shooter.sample(c).sigma_min;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = shooter.sample(d).sigma_min;
    }
  }
  const double mid = 0.5 * (lo + hi);
  return {mid, shooter.sample(mid).sigma_min, {lo, hi}, it};
}

struct Candidate {
  std::pair<double, double> bracket;
  RefineMode mode;
};

constexpr int kZoomIntervals = 16;

// Subdivides a sigma_min dip and refines every root inside it. Two roots in
// one coarse interval leave det W sign-definite and merge into a single dip.
void zoom(const Shooter& shooter, double lo, double hi, int depth, double refine_tol,
          std::vector<RefinedRoot>& out) {
  if (depth <= 0 || hi - lo <= kZoomIntervals * refine_tol) {
    out.push_back(golden_section(shooter, lo, hi, refine_tol));
    return;
  }
  std::vector<CharacteristicSample> s;
  s.reserve(kZoomIntervals + 1);
  for (int j = 0; j <= kZoomIntervals; ++j) {
    s.push_back(shooter.sample(j == kZoomIntervals ? hi : lo + (hi - lo) * j / kZoomIntervals));
  }
  for (int j = 0; j < kZoomIntervals; ++j) {
    if (sign(s[j].det_w) * sign(s[j + 1].det_w) < 0.0) {
      out.push_back(bisect(shooter, s[j].lambda, s[j + 1].lambda, refine_tol));
    }
  }
  for (int j = 1; j < kZoomIntervals; ++j) {
    if (s[j].sigma_min <= s[j - 1].sigma_min && s[j].sigma_min < s[j + 1].sigma_min) {
      zoom(shooter, s[j - 1].lambda, s[j + 1].lambda, depth - 1, refine_tol, out);
    }
  }
}

template <typename Fn>
void for_each_index(std::size_t count, bool parallel, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

RefinedRoot refine_root(const Shooter& shooter, std::pair<double, double> bracket, RefineMode mode,
                        double refine_tol) {
  auto [lo, hi] = bracket;
  if (lo > hi) std::swap(lo, hi);
  if (hi - lo < refine_tol) {
    const double mid = 0.5 * (lo + hi);
    return {mid, shooter.sample(mid).sigma_min, {lo, hi}, 0};
  }
  return mode == RefineMode::det_bisection ? bisect(shooter, lo, hi, refine_tol)
                                           : golden_section(shooter, lo, hi, refine_tol);
}

int multiplicity_at(const Shooter& shooter, double lambda, double cutoff) {
  const auto sample = shooter.sample(lambda);
  Eigen::JacobiSVD<Matrix> svd(sample.w);
  const auto& sv = svd.singularValues();
  int count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) < cutoff) ++count;
  }
  return std::clamp(count, 1, static_cast<int>(sv.size()));
}

Spectrum locate_eigenvalues(const Shooter& shooter, double lambda_min, double lambda_max,
                            const SearchOptions& options) {
  if (!(lambda_min < lambda_max)) throw PreconditionError("window needs lambda_min < lambda_max");
  if (!(options.accept_tol > 0.0 && options.refine_tol > 0.0 && options.cluster_tol > 0.0 &&
        options.multiplicity_tol > 0.0)) {
    throw PreconditionError("search tolerances must be positive");
  }
  const std::size_t n_scan = options.scan_intervals(lambda_min, lambda_max);
  const auto samples = options.parallel
                           ? characteristic_scan(shooter, lambda_min, lambda_max, n_scan)
                           : characteristic_scan_serial(shooter, lambda_min, lambda_max, n_scan);

  double scale = std::numeric_limits<double>::min();
  for (const auto& s : samples) scale = std::max(scale, s.sigma_max);

  for (const auto* end : {&samples.front(), &samples.back()}) {
    if (end->sigma_min / scale < 10.0 * options.accept_tol) {
      throw AmbiguousWindowError("window endpoint lambda = " + format_number(end->lambda) +
                                 " is at or next to an eigenvalue; widen the window");
    }
  }

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (sign(samples[i].det_w) * sign(samples[i + 1].det_w) < 0.0) {
      candidates.push_back({{samples[i].lambda, samples[i + 1].lambda}, RefineMode::det_bisection});
    }
  }
  // even-multiplicity roots leave det W sign-definite; catch them as sigma_min minima
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const double s = samples[i].sigma_min;
    const bool exact_zero_det = samples[i].det_w == 0.0;
    if ((s <= samples[i - 1].sigma_min && s < samples[i + 1].sigma_min) || exact_zero_det) {
      candidates.push_back(
          {{samples[i - 1].lambda, samples[i + 1].lambda}, RefineMode::sigma_min_search});
    }
  }

  std::vector<std::vector<RefinedRoot>> refined(candidates.size());
  for_each_index(candidates.size(), options.parallel, [&](std::size_t i) {
    const auto& c = candidates[i];
    if (c.mode == RefineMode::det_bisection) {
      refined[i].push_back(refine_root(shooter, c.bracket, c.mode, options.refine_tol));
    } else {
      zoom(shooter, c.bracket.first, c.bracket.second, options.zoom_depth, options.refine_tol,
           refined[i]);
    }
  });

  std::vector<EigenvalueRecord> accepted;
  for (const auto& group : refined) {
    for (const auto& r : group) {
      const double residual = r.sigma_min / scale;
      if (residual <= options.accept_tol && r.lambda >= lambda_min && r.lambda <= lambda_max) {
        accepted.push_back({r.lambda, 1, residual, r.bracket});
      }
    }
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });

  // Roots closer than cluster_tol collapse to one record. Within a cluster,
  // refinements further apart than the refinement noise are distinct roots.
  const double distinct_gap = 100.0 * options.refine_tol;
  std::vector<EigenvalueRecord> merged;
  std::vector<int> distinct;
  double last_distinct = 0.0;
  for (const auto& rec : accepted) {
    if (!merged.empty() && rec.value - merged.back().value <= options.cluster_tol) {
      if (rec.value - last_distinct > distinct_gap) {
        ++distinct.back();
        last_distinct = rec.value;
      }
      if (rec.residual < merged.back().residual) merged.back() = rec;
      continue;
    }
    merged.push_back(rec);
    distinct.push_back(1);
    last_distinct = rec.value;
  }

  // A kernel direction counts when its singular value is as small as an
  // accepted residual allows; near-pairs resolved by the zoom do not.
  for_each_index(merged.size(), options.parallel, [&](std::size_t i) {
    const double cutoff =
        std::min(options.multiplicity_tol * scale,
                 std::max(options.accept_tol * scale, 1e4 * merged[i].residual * scale));
    merged[i].multiplicity = std::max(
        distinct[i], multiplicity_at(shooter, merged[i].value, cutoff));
  });

  return {std::move(merged), lambda_min, lambda_max, content_digest(shooter.problem())};
}

Spectrum locate_eigenvalues(const PencilProblem& problem, const UniformGrid& grid,
                            double lambda_min, double lambda_max, const SearchOptions& options) {
  if (!(lambda_min < lambda_max)) throw PreconditionError("window needs lambda_min < lambda_max");
  return locate_eigenvalues(Shooter(problem, grid), lambda_min, lambda_max, options);
}

bool SpectrumComparison::equivalent() const {
  return unmatched_left.empty() && unmatched_right.empty() && max_deviation <= match_tol;
}

SpectrumComparison compare_spectra(const Spectrum& left, const Spectrum& right, double match_tol) {
  constexpr double kWindowSlack = 1e-12;
  if (std::abs(left.lambda_min - right.lambda_min) > kWindowSlack ||
      std::abs(left.lambda_max - right.lambda_max) > kWindowSlack) {
    throw ComparisonError("spectra were computed on different windows");
  }
  const auto lv = left.expanded_values();
  const auto rv = right.expanded_values();

  struct Pair {
    double distance;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(lv.size() * rv.size());
  for (std::size_t i = 0; i < lv.size(); ++i) {
    for (std::size_t j = 0; j < rv.size(); ++j) pairs.push_back({std::abs(lv[i] - rv[j]), i, j});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.distance < b.distance; });

  std::vector<bool> used_left(lv.size(), false);
  std::vector<bool> used_right(rv.size(), false);
  SpectrumComparison out;
  out.match_tol = match_tol;
  for (const auto& p : pairs) {
    if (used_left[p.i] || used_right[p.j]) continue;
    used_left[p.i] = used_right[p.j] = true;
    out.matched.emplace_back(lv[p.i], rv[p.j]);
    out.max_deviation = std::max(out.max_deviation, p.distance);
  }
  std::sort(out.matched.begin(), out.matched.end());
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (!used_left[i]) out.unmatched_left.push_back(lv[i]);
  }
  for (std::size_t j = 0; j < rv.size(); ++j) {
    if (!used_right[j]) out.unmatched_right.push_back(rv[j]);
  }
  return out;
}

nlohmann::json to_json(const SpectrumComparison& comparison) {
  nlohmann::json matched = nlohmann::json::array();
  for (const auto& [a, b] : comparison.matched) matched.push_back({a, b});
  return {{"matched", std::move(matched)},
          {"max_deviation", comparison.max_deviation},
          {"unmatched_left", comparison.unmatched_left},
          {"unmatched_right", comparison.unmatched_right}};
}

std::string spectrum_csv(const Spectrum& spectrum) {
  std::string out = "value,multiplicity,residual\n";
  for (const auto& r : spectrum.records) {
    out += format_number(r.value) + "," + std::to_string(r.multiplicity) + "," +
           format_number(r.residual) + "\n";
  }
  return out;
}

std::string scan_csv(const std::vector<CharacteristicSample>& samples) {
  std::string out = "lambda,det_w,sigma_min\n";
  for (const auto& s : samples) {
    out += format_number(s.lambda) + "," + format_number(s.det_w) + "," +
           format_number(s.sigma_min) + "\n";
  }
  return out;
}

}  // namespace pencil
