#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pencil/model.hpp"

namespace pencil {

/// Sampled solution (Y, Y') of the matrix initial-value problem at fixed lambda.
struct Trajectory {
  double lambda = 0.0;
  UniformGrid grid{1};
  std::vector<Matrix> y;
  std::vector<Matrix> yprime;
};

/// W(lambda) = C Y(pi) + D Y'(pi) with its determinant and extreme singular values.
struct CharacteristicSample {
  double lambda = 0.0;
  Matrix w;
  double det_w = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Initial data (Y0, Y0') = (B*, -A*) whose columns span the solutions that
/// satisfy A y(0) + B y'(0) = 0. Throws InvalidBoundaryError unless BA* = 0
/// and rank[A, B] = d.
std::pair<Matrix, Matrix> left_initial_data(const Matrix& a, const Matrix& b);

/// Default step count for resolving oscillations up to |lambda|.
std::size_t default_grid_steps(double lambda_abs_max);

/// P (diagonal) and Q tabulated on nodes and midpoints: slot 2i is x_i,
/// slot 2i+1 is x_i + h/2.
class PotentialTable {
 public:
  PotentialTable(const PencilProblem& problem, const UniformGrid& grid);

  const Vector& p(std::size_t slot) const { return p_[slot]; }
  const Matrix& q(std::size_t slot) const { return q_[slot]; }
  std::size_t slots() const { return p_.size(); }

 private:
  std::vector<Vector> p_;
  std::vector<Matrix> q_;
};

/// Fixed-step RK4 shooting for one problem on one grid. Immutable after
/// construction; `sample` and `trajectory` may be called concurrently.
class Shooter {
 public:
  Shooter(PencilProblem problem, UniformGrid grid);

  const PencilProblem& problem() const { return problem_; }
  const UniformGrid& grid() const { return grid_; }

  Trajectory trajectory(double lambda) const;
  /// (Y(pi), Y'(pi)) without storing the interior samples.
  std::pair<Matrix, Matrix> endpoint(double lambda) const;
  CharacteristicSample sample(double lambda) const;

 private:
  template <typename Sink>
  void march(double lambda, Matrix& y, Matrix& z, Sink&& sink) const;

  PencilProblem problem_;
  UniformGrid grid_;
  PotentialTable table_;
  Matrix y0_;
  Matrix y0prime_;
};

Trajectory integrate(const PencilProblem& problem, double lambda, const UniformGrid& grid);

CharacteristicSample characteristic_matrix(const Trajectory& trajectory, const Matrix& c,
                                           const Matrix& d);

/// n_scan + 1 equally spaced samples of W on [lambda_min, lambda_max],
/// evaluated in parallel. Output order follows lambda.
std::vector<CharacteristicSample> characteristic_scan(const Shooter& shooter, double lambda_min,
                                                      double lambda_max, std::size_t n_scan);
std::vector<CharacteristicSample> characteristic_scan(const PencilProblem& problem,
                                                      const UniformGrid& grid, double lambda_min,
                                                      double lambda_max, std::size_t n_scan);

/// Single-threaded reference for characteristic_scan; results are bitwise equal.
std::vector<CharacteristicSample> characteristic_scan_serial(const Shooter& shooter,
                                                             double lambda_min, double lambda_max,
                                                             std::size_t n_scan);

}  // namespace pencil
