#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "pencil/model.hpp"

namespace pencil::test {

inline ScalarFunction cos1(double c) { return ScalarFunction::cosine_series({0.0, c}); }

inline std::vector<ScalarFunction> zeros(std::size_t n) {
  return std::vector<ScalarFunction>(n, ScalarFunction::zero());
}

inline PencilProblem zero_problem(int d) {
  return PencilProblem(zeros(static_cast<std::size_t>(d)), zeros(PencilProblem::upper_size(d)),
                       BoundaryMatrices::neumann(d));
}

inline PencilProblem constant_problem(double p0, double q0,
                                      BoundaryMatrices bc = BoundaryMatrices::neumann(1)) {
  return PencilProblem({p0 == 0.0 ? ScalarFunction::zero() : ScalarFunction::constant(p0)},
                       {q0 == 0.0 ? ScalarFunction::zero() : ScalarFunction::constant(q0)},
                       std::move(bc));
}

/// p = 0.3 cos x, q = 0.2 cos x; alpha(pi) = 0.
inline PencilProblem cosine_problem() {
  return PencilProblem({cos1(0.3)}, {cos1(0.2)}, BoundaryMatrices::neumann(1));
}

/// Two coupled channels with alpha(pi) = 0.
inline PencilProblem coupled_problem() {
  return PencilProblem({cos1(0.3), cos1(-0.2)},
                       {ScalarFunction::constant(0.2), cos1(0.1),
                        ScalarFunction::polynomial({0.1, 0.05})},
                       BoundaryMatrices::neumann(2));
}

/// Random cosine series with a few modes; the constant term is optional so
/// that alpha(pi) = 0 can be forced.
inline ScalarFunction random_cosine(std::mt19937_64& rng, double amplitude, bool mean_zero) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> c(4);
  for (auto& v : c) v = u(rng);
  if (mean_zero) c[0] = 0.0;
  return ScalarFunction::cosine_series(c);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace pencil::test
