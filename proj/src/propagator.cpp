#include "pencil/propagator.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <string>

#include "pencil/errors.hpp"

namespace pencil {

std::pair<Matrix, Matrix> left_initial_data(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ShapeError("left boundary matrices must be square of equal order");
  }
  const auto report = validate_boundary(a, b, a, b);
  if (!report.orthogonality_ok || !report.left_rank_ok) {
    throw InvalidBoundaryError("left boundary data needs BA* = 0 and rank[A, B] = d");
  }
  return {b.transpose(), -a.transpose()};
}

std::size_t default_grid_steps(double lambda_abs_max) {
  const double scaled = std::ceil(40.0 * std::abs(lambda_abs_max) * std::numbers::pi);
  return std::max<std::size_t>(2000, static_cast<std::size_t>(scaled));
}

PotentialTable::PotentialTable(const PencilProblem& problem, const UniformGrid& grid) {
  const std::size_t n = grid.n_steps();
  p_.reserve(2 * n + 1);
  q_.reserve(2 * n + 1);
  for (std::size_t slot = 0; slot <= 2 * n; ++slot) {
    const double x = slot % 2 == 0 ? grid.node(slot / 2)
                                   : grid.node(slot / 2) + 0.5 * grid.step();
    p_.push_back(problem.p_values(x));
    q_.push_back(problem.evaluate_q(x));
  }
}

Shooter::Shooter(PencilProblem problem, UniformGrid grid)
    : problem_(std::move(problem)), grid_(grid), table_(problem_, grid_) {
  const auto& bc = problem_.boundary();
  std::tie(y0_, y0prime_) = left_initial_data(bc.left_a, bc.left_b);
}

template <typename Sink>
void Shooter::march(double lambda, Matrix& y, Matrix& z, Sink&& sink) const {
  const std::size_t n = grid_.n_steps();
  const double h = grid_.step();
  const double lam2 = lambda * lambda;
  const auto d = y.rows();

  // Y'' = (2 lambda P + Q - lambda^2) Y, written as Y' = Z, Z' = M Y
  auto apply = [&](std::size_t slot, const Matrix& arg, Matrix& out) {
    out.noalias() = table_.q(slot) * arg;
    const Vector& p = table_.p(slot);
    for (Eigen::Index r = 0; r < d; ++r) {
      out.row(r) += (2.0 * lambda * p(r) - lam2) * arg.row(r);
    }
  };

  Matrix ky1, kz1, ky2, kz2, ky3, kz3, ky4, kz4, ys, zs;
  kz1.resize(y.rows(), y.cols());
  kz2 = kz3 = kz4 = kz1;

  sink(std::size_t{0}, y, z);
  for (std::size_t i = 0; i < n; ++i) {
    ky1 = z;
    apply(2 * i, y, kz1);

    ys = y + 0.5 * h * ky1;
    zs = z + 0.5 * h * kz1;
    ky2 = zs;
    apply(2 * i + 1, ys, kz2);

    ys = y + 0.5 * h * ky2;
    zs = z + 0.5 * h * kz2;
    ky3 = zs;
    apply(2 * i + 1, ys, kz3);

    ys = y + h * ky3;
    zs = z + h * kz3;
    ky4 = zs;
    apply(2 * i + 2, ys, kz4);

    y += (h / 6.0) * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
    z += (h / 6.0) * (kz1 + 2.0 * kz2 + 2.0 * kz3 + kz4);

    if (!y.allFinite() || !z.allFinite()) {
      throw OverflowError("non-finite state at node " + std::to_string(i + 1) +
                              " (lambda = " + std::to_string(lambda) + ")",
                          i + 1, lambda);
    }
    sink(i + 1, y, z);
  }
}

Trajectory Shooter::trajectory(double lambda) const {
  if (!std::isfinite(lambda)) throw PreconditionError("lambda must be finite");
  Trajectory out{lambda, grid_, {}, {}};
  out.y.reserve(grid_.n_steps() + 1);
  out.yprime.reserve(grid_.n_steps() + 1);
  Matrix y = y0_;
  Matrix z = y0prime_;
  march(lambda, y, z, [&](std::size_t, const Matrix& ys, const Matrix& zs) {
    out.y.push_back(ys);
    out.yprime.push_back(zs);
  });
  return out;
}

std::pair<Matrix, Matrix> Shooter::endpoint(double lambda) const {
  if (!std::isfinite(lambda)) throw PreconditionError("lambda must be finite");
  Matrix y = y0_;
  Matrix z = y0prime_;
  march(lambda, y, z, [](std::size_t, const Matrix&, const Matrix&) {});
  return {std::move(y), std::move(z)};
}

namespace {

CharacteristicSample assemble(double lambda, const Matrix& y_end, const Matrix& yp_end,
                              const Matrix& c, const Matrix& d) {
  if (c.rows() != y_end.rows() || d.rows() != y_end.rows() || c.cols() != y_end.rows() ||
      d.cols() != y_end.rows()) {
    throw ShapeError("right boundary matrices do not match the trajectory dimension");
  }
  CharacteristicSample s;
  s.lambda = lambda;
  s.w = c * y_end + d * yp_end;
  s.det_w = Eigen::PartialPivLU<Matrix>(s.w).determinant();
  Eigen::JacobiSVD<Matrix> svd(s.w);
  const auto& sv = svd.singularValues();
  s.sigma_max = sv(0);
  s.sigma_min = sv(sv.size() - 1);
  return s;
}

}  // namespace

CharacteristicSample Shooter::sample(double lambda) const {
  const auto [y, yp] = endpoint(lambda);
  const auto& bc = problem_.boundary();
  return assemble(lambda, y, yp, bc.right_c, bc.right_d);
}

Trajectory integrate(const PencilProblem& problem, double lambda, const UniformGrid& grid) {
  return Shooter(problem, grid).trajectory(lambda);
}

CharacteristicSample characteristic_matrix(const Trajectory& trajectory, const Matrix& c,
                                           const Matrix& d) {
  if (trajectory.y.size() != trajectory.grid.n_steps() + 1) {
    throw PreconditionError("trajectory does not reach x = pi");
  }
  return assemble(trajectory.lambda, trajectory.y.back(), trajectory.yprime.back(), c, d);
}

namespace {

void check_scan_args(double lambda_min, double lambda_max, std::size_t n_scan) {
  if (!(lambda_min < lambda_max)) throw PreconditionError("scan needs lambda_min < lambda_max");
  if (n_scan < 2) throw PreconditionError("scan needs n_scan >= 2");
}

double scan_point(double lambda_min, double lambda_max, std::size_t i, std::size_t n_scan) {
  if (i == n_scan) return lambda_max;
  return lambda_min + (lambda_max - lambda_min) * static_cast<double>(i) / static_cast<double>(n_scan);
}

}  // namespace

std::vector<CharacteristicSample> characteristic_scan(const Shooter& shooter, double lambda_min,
                                                      double lambda_max, std::size_t n_scan) {
  check_scan_args(lambda_min, lambda_max, n_scan);
  std::vector<CharacteristicSample> out(n_scan + 1);
  std::vector<std::exception_ptr> errors(n_scan + 1);
  const auto count = static_cast<long long>(n_scan + 1);

#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out[idx] = shooter.sample(scan_point(lambda_min, lambda_max, idx, n_scan));
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<CharacteristicSample> characteristic_scan(const PencilProblem& problem,
                                                      const UniformGrid& grid, double lambda_min,
                                                      double lambda_max, std::size_t n_scan) {
  check_scan_args(lambda_min, lambda_max, n_scan);
  return characteristic_scan(Shooter(problem, grid), lambda_min, lambda_max, n_scan);
}

std::vector<CharacteristicSample> characteristic_scan_serial(const Shooter& shooter,
                                                             double lambda_min, double lambda_max,
                                                             std::size_t n_scan) {
  check_scan_args(lambda_min, lambda_max, n_scan);
  std::vector<CharacteristicSample> out;
  out.reserve(n_scan + 1);
  for (std::size_t i = 0; i <= n_scan; ++i) {
    out.push_back(shooter.sample(scan_point(lambda_min, lambda_max, i, n_scan)));
  }
  return out;
}

}  // namespace pencil
