#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pencil {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FunctionKind { zero, constant, polynomial, cosine_series };

/// Closed-form real coefficient function on [0, pi].
///
/// `constant` holds one value, `polynomial` holds coefficients in ascending
/// powers of x, `cosine_series` holds c_k multiplying cos(k x) for k = 0, 1, ...
class ScalarFunction {
 public:
  ScalarFunction() = default;

  static ScalarFunction zero();
  static ScalarFunction constant(double value);
  static ScalarFunction polynomial(std::vector<double> coefficients);
  static ScalarFunction cosine_series(std::vector<double> coefficients);
  /// Throws StructuralError if the coefficient list is invalid for `kind`.
  static ScalarFunction make(FunctionKind kind, std::vector<double> coefficients);

  FunctionKind kind() const { return kind_; }
  std::span<const double> coefficients() const { return coefficients_; }

  double operator()(double x) const;
  /// Exact antiderivative from 0 to x.
  double integral(double x) const;
  /// Pointwise square, in the same family (constant stays constant, etc.).
  ScalarFunction squared() const;
  /// True when every coefficient is zero.
  bool is_identically_zero() const;

  friend bool operator==(const ScalarFunction&, const ScalarFunction&) = default;

 private:
  ScalarFunction(FunctionKind kind, std::vector<double> coefficients)
      : kind_(kind), coefficients_(std::move(coefficients)) {}

  FunctionKind kind_ = FunctionKind::zero;
  std::vector<double> coefficients_;
};

/// Boundary matrices of A y(0) + B y'(0) = C y(pi) + D y'(pi) = 0.
struct BoundaryMatrices {
  Matrix left_a;
  Matrix left_b;
  Matrix right_c;
  Matrix right_d;

  static BoundaryMatrices neumann(int dimension);
  static BoundaryMatrices dirichlet(int dimension);

  bool is_neumann() const;
};

/// Per-condition outcome of the admissibility check.
struct BoundaryReport {
  double self_adjoint_residual = 0.0;  // max |DC* - (DC*)*|
  double orthogonality_residual = 0.0; // max |BA*|
  int left_rank = 0;
  int right_rank = 0;
  int dimension = 0;
  bool self_adjoint_ok = false;
  bool orthogonality_ok = false;
  bool left_rank_ok = false;
  bool right_rank_ok = false;

  bool passed() const {
    return self_adjoint_ok && orthogonality_ok && left_rank_ok && right_rank_ok;
  }
};

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-10;

/// Checks DC* self-adjoint, BA* = 0 and rank[A,B] = rank[C,D] = d.
BoundaryReport validate_boundary(const Matrix& a, const Matrix& b, const Matrix& c,
                                 const Matrix& d);

/// Numerical rank of a matrix: singular values above tol * sigma_max.
int numerical_rank(const Matrix& m, double relative_tol = kRankTolerance);

/// The pencil -Y'' + [2 lambda P(x) + Q(x)] Y = lambda^2 Y on [0, pi] with
/// P diagonal, Q symmetric, and boundary matrices (A, B, C, D).
///
/// Q is stored as its upper triangle, row by row: (0,0), (0,1), ..., (0,d-1),
/// (1,1), ..., (d-1,d-1).
class PencilProblem {
 public:
  /// Throws ShapeError on inconsistent sizes and InvalidBoundaryError when
  /// the boundary matrices fail validate_boundary.
  PencilProblem(std::vector<ScalarFunction> p_diagonal, std::vector<ScalarFunction> q_upper,
                BoundaryMatrices boundary);

  int dimension() const { return dimension_; }
  const std::vector<ScalarFunction>& p_diagonal() const { return p_; }
  const std::vector<ScalarFunction>& q_upper() const { return q_; }
  const ScalarFunction& q_entry(int row, int col) const;
  const BoundaryMatrices& boundary() const { return boundary_; }

  /// diag(p_1(x), ..., p_d(x)) as a vector.
  Vector p_values(double x) const;
  Matrix evaluate_p(double x) const;
  Matrix evaluate_q(double x) const;
  /// Diagonal of alpha(x) = int_0^x P(t) dt, in closed form.
  Vector alpha(double x) const;
  /// int_0^x Q(t) dt, in closed form.
  Matrix integral_q(double x) const;
  /// int_0^x P(t)^2 dt, in closed form.
  Matrix integral_p_squared(double x) const;

  /// Same P and boundary, different Q.
  PencilProblem with_q(std::vector<ScalarFunction> q_upper) const;
  PencilProblem with_boundary(BoundaryMatrices boundary) const;

  static std::size_t upper_index(int row, int col, int dimension);
  static std::size_t upper_size(int dimension) {
    return static_cast<std::size_t>(dimension) * (dimension + 1) / 2;
  }

 private:
  void check_domain(double x) const;

  int dimension_;
  std::vector<ScalarFunction> p_;
  std::vector<ScalarFunction> q_;
  BoundaryMatrices boundary_;
};

/// Uniform grid x_i = i * pi / N on [0, pi]; node(N) is exactly pi.
class UniformGrid {
 public:
  explicit UniformGrid(std::size_t n_steps);

  std::size_t n_steps() const { return n_; }
  double step() const { return h_; }
  double node(std::size_t i) const;

  /// Index of the node closest to x.
  std::size_t nearest_index(double x) const;

 private:
  std::size_t n_;
  double h_;
};

}  // namespace pencil
