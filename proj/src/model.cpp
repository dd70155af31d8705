#include "pencil/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pencil/errors.hpp"

namespace pencil {

namespace {

constexpr double kDomainSlack = 8.0 * std::numeric_limits<double>::epsilon() * std::numbers::pi;

void require_finite(const std::vector<double>& coefficients) {
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw StructuralError("function coefficient is not finite");
  }
}

}  // namespace

ScalarFunction ScalarFunction::zero() { return {FunctionKind::zero, {}}; }

ScalarFunction ScalarFunction::constant(double value) {
  return make(FunctionKind::constant, {value});
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coefficients) {
  return make(FunctionKind::polynomial, std::move(coefficients));
}

ScalarFunction ScalarFunction::cosine_series(std::vector<double> coefficients) {
  return make(FunctionKind::cosine_series, std::move(coefficients));
}

ScalarFunction ScalarFunction::make(FunctionKind kind, std::vector<double> coefficients) {
  require_finite(coefficients);
  switch (kind) {
    case FunctionKind::zero:
      if (!coefficients.empty() &&
          std::any_of(coefficients.begin(), coefficients.end(), [](double c) { return c != 0.0; })) {
        throw StructuralError("zero function carries nonzero coefficients");
      }
      return {kind, {}};
    case FunctionKind::constant:
      if (coefficients.size() != 1) {
        throw StructuralError("constant function needs exactly one coefficient");
      }
      break;
    case FunctionKind::polynomial:
    case FunctionKind::cosine_series:
      if (coefficients.empty()) throw StructuralError("coefficient list is empty");
      break;
  }
  return {kind, std::move(coefficients)};
}

double ScalarFunction::operator()(double x) const {
  switch (kind_) {
    case FunctionKind::zero:
      return 0.0;
    case FunctionKind::constant:
      return coefficients_[0];
    case FunctionKind::polynomial: {
      double acc = 0.0;
      for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case FunctionKind::cosine_series: {
      double acc = 0.0;
      for (std::size_t k = 0; k < coefficients_.size(); ++k) {
        acc += coefficients_[k] * std::cos(static_cast<double>(k) * x);
      }
      return acc;
    }
  }
  return 0.0;
}

double ScalarFunction::integral(double x) const {
  switch (kind_) {
    case FunctionKind::zero:
      return 0.0;
    case FunctionKind::constant:
      return coefficients_[0] * x;
    case FunctionKind::polynomial: {
      double acc = 0.0;
      for (std::size_t k = coefficients_.size(); k-- > 0;) {
        acc = acc * x + coefficients_[k] / static_cast<double>(k + 1);
      }
      return acc * x;
    }
    case FunctionKind::cosine_series: {
      double acc = coefficients_[0] * x;
      for (std::size_t k = 1; k < coefficients_.size(); ++k) {
        const double kk = static_cast<double>(k);
        acc += coefficients_[k] * std::sin(kk * x) / kk;
      }
      return acc;
    }
  }
  return 0.0;
}

ScalarFunction ScalarFunction::squared() const {
  switch (kind_) {
    case FunctionKind::zero:
      return zero();
    case FunctionKind::constant:
      return constant(coefficients_[0] * coefficients_[0]);
    case FunctionKind::polynomial: {
      std::vector<double> out(2 * coefficients_.size() - 1, 0.0);
      for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        for (std::size_t j = 0; j < coefficients_.size(); ++j) {
          out[i + j] += coefficients_[i] * coefficients_[j];
        }
      }
      return polynomial(std::move(out));
    }
    case FunctionKind::cosine_series: {
      // cos(jx) cos(kx) = [cos((j-k)x) + cos((j+k)x)] / 2
      std::vector<double> out(2 * coefficients_.size() - 1, 0.0);
      for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        for (std::size_t k = 0; k < coefficients_.size(); ++k) {
          const double w = 0.5 * coefficients_[j] * coefficients_[k];
          out[j > k ? j - k : k - j] += w;
          out[j + k] += w;
        }
      }
      return cosine_series(std::move(out));
    }
  }
  return zero();
}

bool ScalarFunction::is_identically_zero() const {
  return std::all_of(coefficients_.begin(), coefficients_.end(), [](double c) { return c == 0.0; });
}

BoundaryMatrices BoundaryMatrices::neumann(int dimension) {
  return {Matrix::Zero(dimension, dimension), Matrix::Identity(dimension, dimension),
          Matrix::Zero(dimension, dimension), Matrix::Identity(dimension, dimension)};
}

BoundaryMatrices BoundaryMatrices::dirichlet(int dimension) {
  return {Matrix::Identity(dimension, dimension), Matrix::Zero(dimension, dimension),
          Matrix::Identity(dimension, dimension), Matrix::Zero(dimension, dimension)};
}

bool BoundaryMatrices::is_neumann() const {
  const int d = static_cast<int>(left_a.rows());
  return left_a.isZero(0.0) && right_c.isZero(0.0) && numerical_rank(left_b) == d &&
         numerical_rank(right_d) == d;
}

int numerical_rank(const Matrix& m, double relative_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > relative_tol * s(0)) ++rank;
  }
  return rank;
}

BoundaryReport validate_boundary(const Matrix& a, const Matrix& b, const Matrix& c,
                                 const Matrix& d) {
  const auto n = a.rows();
  for (const Matrix* m : {&a, &b, &c, &d}) {
    if (m->rows() != n || m->cols() != n) {
      throw ShapeError("boundary matrices must all be square of the same order");
    }
  }
  BoundaryReport report;
  report.dimension = static_cast<int>(n);
  if (n == 0) throw ShapeError("boundary matrices are empty");

  const Matrix dc = d * c.transpose();
  report.self_adjoint_residual = (dc - dc.transpose()).cwiseAbs().maxCoeff();
  report.orthogonality_residual = (b * a.transpose()).cwiseAbs().maxCoeff();

  Matrix left(n, 2 * n);
  left << a, b;
  Matrix right(n, 2 * n);
  right << c, d;
  report.left_rank = numerical_rank(left);
  report.right_rank = numerical_rank(right);

  report.self_adjoint_ok = report.self_adjoint_residual <= kSymmetryTolerance;
  report.orthogonality_ok = report.orthogonality_residual <= kSymmetryTolerance;
  report.left_rank_ok = report.left_rank == n;
  report.right_rank_ok = report.right_rank == n;
  return report;
}

PencilProblem::PencilProblem(std::vector<ScalarFunction> p_diagonal,
                             std::vector<ScalarFunction> q_upper, BoundaryMatrices boundary)
    : dimension_(static_cast<int>(p_diagonal.size())),
      p_(std::move(p_diagonal)),
      q_(std::move(q_upper)),
      boundary_(std::move(boundary)) {
  if (dimension_ < 1) throw ShapeError("dimension must be positive");
  if (q_.size() != upper_size(dimension_)) {
    throw ShapeError("q needs d(d+1)/2 = " + std::to_string(upper_size(dimension_)) +
                     " upper-triangle entries, got " + std::to_string(q_.size()));
  }
  if (boundary_.left_a.rows() != dimension_) {
    throw ShapeError("boundary matrices do not match the dimension");
  }
  const auto report =
      validate_boundary(boundary_.left_a, boundary_.left_b, boundary_.right_c, boundary_.right_d);
  if (!report.passed()) {
    std::string why;
    if (!report.self_adjoint_ok) why += " DC* not self-adjoint;";
    if (!report.orthogonality_ok) why += " BA* != 0;";
    if (!report.left_rank_ok) why += " rank[A,B] != d;";
    if (!report.right_rank_ok) why += " rank[C,D] != d;";
    throw InvalidBoundaryError("inadmissible boundary matrices:" + why);
  }
}

std::size_t PencilProblem::upper_index(int row, int col, int dimension) {
  if (row > col) std::swap(row, col);
  // rows 0..row-1 contribute d, d-1, ..., d-row+1 entries
  const auto r = static_cast<std::size_t>(row);
  const auto d = static_cast<std::size_t>(dimension);
  return r * d - r * (r - 1) / 2 + static_cast<std::size_t>(col - row);
}

const ScalarFunction& PencilProblem::q_entry(int row, int col) const {
  return q_[upper_index(row, col, dimension_)];
}

void PencilProblem::check_domain(double x) const {
  if (!(x >= -kDomainSlack && x <= std::numbers::pi + kDomainSlack)) {
    throw DomainError("x = " + std::to_string(x) + " lies outside [0, pi]");
  }
}

Vector PencilProblem::p_values(double x) const {
  check_domain(x);
  Vector v(dimension_);
  for (int j = 0; j < dimension_; ++j) v(j) = p_[j](x);
  return v;
}

Matrix PencilProblem::evaluate_p(double x) const { return p_values(x).asDiagonal(); }

Matrix PencilProblem::evaluate_q(double x) const {
  check_domain(x);
  Matrix q(dimension_, dimension_);
  std::size_t idx = 0;
  for (int i = 0; i < dimension_; ++i) {
    for (int j = i; j < dimension_; ++j) {
      const double v = q_[idx++](x);
      q(i, j) = v;
      q(j, i) = v;
    }
  }
  return q;
}

Vector PencilProblem::alpha(double x) const {
  check_domain(x);
  Vector v(dimension_);
  for (int j = 0; j < dimension_; ++j) v(j) = p_[j].integral(x);
  return v;
}

Matrix PencilProblem::integral_q(double x) const {
  check_domain(x);
  Matrix m(dimension_, dimension_);
  std::size_t idx = 0;
  for (int i = 0; i < dimension_; ++i) {
    for (int j = i; j < dimension_; ++j) {
      const double v = q_[idx++].integral(x);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Matrix PencilProblem::integral_p_squared(double x) const {
  check_domain(x);
  Vector v(dimension_);
  for (int j = 0; j < dimension_; ++j) v(j) = p_[j].squared().integral(x);
  return v.asDiagonal();
}

PencilProblem PencilProblem::with_q(std::vector<ScalarFunction> q_upper) const {
  return PencilProblem(p_, std::move(q_upper), boundary_);
}

PencilProblem PencilProblem::with_boundary(BoundaryMatrices boundary) const {
  return PencilProblem(p_, q_, std::move(boundary));
}

UniformGrid::UniformGrid(std::size_t n_steps) : n_(n_steps) {
  if (n_steps == 0) throw PreconditionError("grid needs at least one step");
  h_ = std::numbers::pi / static_cast<double>(n_steps);
}

double UniformGrid::node(std::size_t i) const {
  if (i > n_) throw DomainError("grid index " + std::to_string(i) + " beyond last node");
  if (i == n_) return std::numbers::pi;
  return static_cast<double>(i) * h_;
}

std::size_t UniformGrid::nearest_index(double x) const {
  const double r = std::round(x / h_);
  if (r <= 0.0) return 0;
  return std::min(n_, static_cast<std::size_t>(r));
}

}  // namespace pencil
