#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pencil/model.hpp"

namespace pencil {

/// Transformation kernels A(x_i, t_k), B(x_i, t_k) on the triangle 0 <= k <= i <= N.
class KernelField {
 public:
  KernelField(UniformGrid grid, int dimension);

  const UniformGrid& grid() const { return grid_; }
  int dimension() const { return d_; }

  Eigen::Map<Matrix> a(std::size_t i, std::size_t k) { return {a_.data() + offset(i, k), d_, d_}; }
  Eigen::Map<Matrix> b(std::size_t i, std::size_t k) { return {b_.data() + offset(i, k), d_, d_}; }
  Eigen::Map<const Matrix> a(std::size_t i, std::size_t k) const {
    return {a_.data() + offset(i, k), d_, d_};
  }
  Eigen::Map<const Matrix> b(std::size_t i, std::size_t k) const {
    return {b_.data() + offset(i, k), d_, d_};
  }

  /// Largest |entry| over both kernels.
  double max_abs() const;

 private:
  std::size_t offset(std::size_t i, std::size_t k) const {
    return (i * (i + 1) / 2 + k) * static_cast<std::size_t>(d_) * d_;
  }

  UniformGrid grid_;
  int d_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Running integrals of T1 and T2 on the grid nodes (composite Simpson), where
/// T1 = P^2 + cos(a) Q cos(a) + sin(a) Q sin(a), T2 = sin(a) Q cos(a) - cos(a) Q sin(a).
struct TraceIntegrals {
  std::vector<Matrix> t1;
  std::vector<Matrix> t2;
};
TraceIntegrals trace_integrals(const PencilProblem& problem, const UniformGrid& grid);

/// A(x, x) and B(x, x) on the grid nodes, from
///   cos(a) A + sin(a) B = (1/2) int T1,
///   sin(a) A - cos(a) B = (1/2)[P(x) - P(0)] + (1/2) int T2
/// with the normalization A(0, 0) = 0.
struct DiagonalData {
  std::vector<Matrix> a;
  std::vector<Matrix> b;
};
DiagonalData diagonal_data(const PencilProblem& problem, const UniformGrid& grid);

inline constexpr double kBlowUpThreshold = 1e6;

/// Marches A_tt = A_xx - 2P B_t - Q A, B_tt = B_xx + 2P A_t - Q B over the
/// triangle with B(x,0) = 0, A_t(x,0) = 0 and the diagonal data on t = x.
/// Nodes of one x-level are updated in parallel. Requires N >= 16.
KernelField solve_goursat(const PencilProblem& problem, const UniformGrid& grid);

/// Single-threaded reference for solve_goursat; results are bitwise equal.
KernelField solve_goursat_serial(const PencilProblem& problem, const UniformGrid& grid);

/// cos(lambda x - alpha(x)) + int_0^x A(x,t) cos(lambda t) dt + int_0^x B(x,t) sin(lambda t) dt
/// at x = x_index * h.
Matrix reconstruct_y(const KernelField& field, const PencilProblem& problem, double lambda,
                     std::size_t x_index);

struct RepresentationResidual {
  double max_deviation = 0.0;
  double lambda = 0.0;
  double x = 0.0;
};

/// Largest max-norm gap between reconstruct_y and the RK4 solution with
/// Y(0) = I, Y'(0) = 0, over x in {pi/4, pi/2, 3pi/4, pi} and the given lambdas.
RepresentationResidual representation_residual(const KernelField& field,
                                               const PencilProblem& problem,
                                               const std::vector<double>& lambdas);

struct TraceResiduals {
  double r33 = 0.0;   // 2 d/dx[cos(a)A(x,x) + sin(a)B(x,x)] against P^2 + Q
  double r212 = 0.0;  // 2[cos(a)A + sin(a)B] against int T1
  double r213 = 0.0;  // 2[sin(a)A - cos(a)B] against P(x) - P(0) + int T2
};

TraceResiduals trace_identity_residual(const KernelField& field, const PencilProblem& problem);

/// `i,k,entry_row,entry_col,A_value,B_value`
std::string lattice_csv(const KernelField& field);

}  // namespace pencil
