#include "pencil/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pencil/errors.hpp"
#include "pencil/json_io.hpp"
#include "pencil/propagator.hpp"
#include "pencil/quadrature.hpp"

namespace pencil {

KernelField::KernelField(UniformGrid grid, int dimension) : grid_(grid), d_(dimension) {
  const std::size_t n = grid_.n_steps() + 1;
  const std::size_t size = n * (n + 1) / 2 * static_cast<std::size_t>(d_) * d_;
  a_.assign(size, 0.0);
  b_.assign(size, 0.0);
}

double KernelField::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  for (double v : b_) m = std::max(m, std::abs(v));
  return m;
}

TraceIntegrals trace_integrals(const PencilProblem& problem, const UniformGrid& grid) {
  const int d = problem.dimension();
  const std::size_t nodes = grid.n_steps() + 1;
  // sample T1, T2 entrywise; with diagonal alpha,
  // T1(r,c) = delta_rc p_r^2 + Q(r,c) cos(a_r - a_c), T2(r,c) = Q(r,c) sin(a_r - a_c)
  std::vector<std::vector<double>> t1(static_cast<std::size_t>(d) * d, std::vector<double>(nodes));
  auto t2 = t1;
  for (std::size_t m = 0; m < nodes; ++m) {
    const double x = grid.node(m);
    const Vector p = problem.p_values(x);
    const Vector al = problem.alpha(x);
    const Matrix q = problem.evaluate_q(x);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        const double diff = al(r) - al(c);
        const auto e = static_cast<std::size_t>(r * d + c);
        t1[e][m] = q(r, c) * std::cos(diff) + (r == c ? p(r) * p(r) : 0.0);
        t2[e][m] = q(r, c) * std::sin(diff);
      }
    }
  }
  TraceIntegrals out;
  out.t1.assign(nodes, Matrix::Zero(d, d));
  out.t2.assign(nodes, Matrix::Zero(d, d));
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const auto e = static_cast<std::size_t>(r * d + c);
      const auto i1 = cumulative_simpson(t1[e], grid.step());
      const auto i2 = cumulative_simpson(t2[e], grid.step());
      for (std::size_t m = 0; m < nodes; ++m) {
        out.t1[m](r, c) = i1[m];
        out.t2[m](r, c) = i2[m];
      }
    }
  }
  return out;
}

DiagonalData diagonal_data(const PencilProblem& problem, const UniformGrid& grid) {
  const auto integrals = trace_integrals(problem, grid);
  const std::size_t nodes = grid.n_steps() + 1;
  const Vector p0 = problem.p_values(0.0);
  DiagonalData out;
  out.a.reserve(nodes);
  out.b.reserve(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    const double x = grid.node(m);
    const Vector al = problem.alpha(x);
    const Vector ca = al.array().cos().matrix();
    const Vector sa = al.array().sin().matrix();
    const Matrix r1 = 0.5 * integrals.t1[m];
    Matrix r2 = 0.5 * integrals.t2[m];
    r2.diagonal() += 0.5 * (problem.p_values(x) - p0);
    // cos^2 + sin^2 = I for diagonal alpha inverts the 2x2 block system
    out.a.push_back(ca.asDiagonal() * r1 + sa.asDiagonal() * r2);
    out.b.push_back(sa.asDiagonal() * r1 - ca.asDiagonal() * r2);
  }
  return out;
}

namespace {

class GoursatMarcher {
 public:
  GoursatMarcher(const PencilProblem& problem, const UniformGrid& grid)
      : grid_(grid),
        h_(grid.step()),
        fine_(diagonal_data(problem, UniformGrid(2 * grid.n_steps()))) {
    for (std::size_t i = 0; i <= grid.n_steps(); ++i) {
      p_.push_back(problem.p_values(grid.node(i)));
      q_.push_back(problem.evaluate_q(grid.node(i)));
    }
    p_half_ = problem.p_values(0.5 * h_);
    q_half_ = problem.evaluate_q(0.5 * h_);
  }

  void start(KernelField& field) const {
    field.a(0, 0) = fine_.a[0];
    field.b(0, 0) = fine_.b[0];
  }

  // Fills node (i+1, k) from levels i and i-1.
  void update(KernelField& field, std::size_t i, std::size_t k) const {
    const std::size_t next = i + 1;
    if (k == next) {
      field.a(next, next) = fine_.a[2 * next];
      field.b(next, next) = fine_.b[2 * next];
      return;
    }
    if (k == i) {
      update_subdiagonal(field, i);
      return;
    }
    // diamond cell centred on (i, k); ghost column k = -1 by reflection
    Matrix ga, gb;
    forcing(field, i, k, ga, gb);
    const double h2 = h_ * h_;
    if (k == 0) {
      field.a(next, 0) = 2.0 * field.a(i, 1) - field.a(i - 1, 0) + h2 * ga;
      field.b(next, 0).setZero();
      return;
    }
    field.a(next, k) = field.a(i, k + 1) + field.a(i, k - 1) - field.a(i - 1, k) + h2 * ga;
    field.b(next, k) = field.b(i, k + 1) + field.b(i, k - 1) - field.b(i - 1, k) + h2 * gb;
  }

 private:
  // G = u_xx - u_tt at node (i, k), k < i, with centred t-derivatives.
  void forcing(const KernelField& field, std::size_t i, std::size_t k, Matrix& ga,
               Matrix& gb) const {
    const Vector& p = p_[i];
    const Matrix& q = q_[i];
    Matrix at, bt;
    if (k == 0) {
      at = Matrix::Zero(field.dimension(), field.dimension());
      bt = field.b(i, 1) / h_;
    } else {
      at = (field.a(i, k + 1) - field.a(i, k - 1)) / (2.0 * h_);
      bt = (field.b(i, k + 1) - field.b(i, k - 1)) / (2.0 * h_);
    }
    ga = 2.0 * p.asDiagonal() * bt + q * field.a(i, k);
    gb = -2.0 * p.asDiagonal() * at + q * field.b(i, k);
  }

  // Node (i+1, i) from the characteristic cell with corners on the diagonal
  // at x_{i-1/2}, x_{i+1/2} and the previous sub-diagonal node (i, i-1).
  void update_subdiagonal(KernelField& field, std::size_t i) const {
    const std::size_t next = i + 1;
    if (i == 0) {
      // cell touching the origin; its fourth corner is the mirror image of
      // the diagonal point x = t = h/2 across t = 0
      const Matrix& a_half = fine_.a[1];
      const Matrix bt = fine_.b[1] / (0.5 * h_);
      const Matrix ga = 2.0 * p_half_.asDiagonal() * bt + q_half_ * a_half;
      field.a(1, 0) = 2.0 * a_half - fine_.a[0] + 0.25 * h_ * h_ * ga;
      field.b(1, 0).setZero();
      return;
    }
    Matrix ga, gb;
    forcing(field, i, i - 1, ga, gb);
    const double w = 0.5 * h_ * h_;
    field.a(next, i) = field.a(i, i - 1) + fine_.a[2 * i + 1] - fine_.a[2 * i - 1] + w * ga;
    field.b(next, i) = field.b(i, i - 1) + fine_.b[2 * i + 1] - fine_.b[2 * i - 1] + w * gb;
  }

  UniformGrid grid_;
  double h_;
  DiagonalData fine_;
  std::vector<Vector> p_;
  std::vector<Matrix> q_;
  Vector p_half_;
  Matrix q_half_;
};

void check_level(const KernelField& field, std::size_t level) {
  for (std::size_t k = 0; k <= level; ++k) {
    const double m =
        std::max(field.a(level, k).cwiseAbs().maxCoeff(), field.b(level, k).cwiseAbs().maxCoeff());
    if (!(m <= kBlowUpThreshold)) {
      throw BlowUpError("kernel marching blew up at lattice node (" + std::to_string(level) +
                            ", " + std::to_string(k) + ")",
                        level, k);
    }
  }
}

void check_goursat_grid(const UniformGrid& grid) {
  if (grid.n_steps() < 16) throw PreconditionError("kernel lattice needs N >= 16");
}

}  // namespace

KernelField solve_goursat(const PencilProblem& problem, const UniformGrid& grid) {
  check_goursat_grid(grid);
  const GoursatMarcher marcher(problem, grid);
  KernelField field(grid, problem.dimension());
  marcher.start(field);
  for (std::size_t i = 0; i < grid.n_steps(); ++i) {
    const auto count = static_cast<long long>(i + 2);
#pragma omp parallel for schedule(static) if (count >= 128)
    for (long long k = 0; k < count; ++k) {
      marcher.update(field, i, static_cast<std::size_t>(k));
    }
    check_level(field, i + 1);
  }
  return field;
}

KernelField solve_goursat_serial(const PencilProblem& problem, const UniformGrid& grid) {
  check_goursat_grid(grid);
  const GoursatMarcher marcher(problem, grid);
  KernelField field(grid, problem.dimension());
  marcher.start(field);
  for (std::size_t i = 0; i < grid.n_steps(); ++i) {
    for (std::size_t k = 0; k <= i + 1; ++k) marcher.update(field, i, k);
    check_level(field, i + 1);
  }
  return field;
}

Matrix reconstruct_y(const KernelField& field, const PencilProblem& problem, double lambda,
                     std::size_t x_index) {
  const auto& grid = field.grid();
  if (x_index > grid.n_steps()) throw DomainError("x index beyond the lattice");
  const int d = field.dimension();
  const double x = grid.node(x_index);
  const Vector phase = (lambda * x - problem.alpha(x).array()).matrix();
  Matrix y = phase.array().cos().matrix().asDiagonal();

  std::vector<double> row(x_index + 1);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      for (std::size_t k = 0; k <= x_index; ++k) {
        const double t = grid.node(k);
        row[k] = field.a(x_index, k)(r, c) * std::cos(lambda * t) +
                 field.b(x_index, k)(r, c) * std::sin(lambda * t);
      }
      y(r, c) += simpson(row, grid.step());
    }
  }
  return y;
}

RepresentationResidual representation_residual(const KernelField& field,
                                               const PencilProblem& problem,
                                               const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw PreconditionError("representation residual needs at least one lambda");
  const auto& grid = field.grid();
  const std::size_t refine = std::max<std::size_t>(1, (4000 + grid.n_steps() - 1) / grid.n_steps());
  const Shooter shooter(problem.with_boundary(BoundaryMatrices::neumann(problem.dimension())),
                        UniformGrid(grid.n_steps() * refine));

  RepresentationResidual worst;
  for (double lambda : lambdas) {
    const auto trajectory = shooter.trajectory(lambda);
    for (double x : {0.25 * std::numbers::pi, 0.5 * std::numbers::pi, 0.75 * std::numbers::pi,
                     std::numbers::pi}) {
      const std::size_t idx = grid.nearest_index(x);
      const Matrix rebuilt = reconstruct_y(field, problem, lambda, idx);
      const double dev = (rebuilt - trajectory.y[idx * refine]).cwiseAbs().maxCoeff();
      if (dev >= worst.max_deviation) worst = {dev, lambda, grid.node(idx)};
    }
  }
  return worst;
}

TraceResiduals trace_identity_residual(const KernelField& field, const PencilProblem& problem) {
  const auto& grid = field.grid();
  const std::size_t n = grid.n_steps();
  const auto integrals = trace_integrals(problem, UniformGrid(2 * n));
  const Vector p0 = problem.p_values(0.0);

  std::vector<Matrix> u(n + 1);
  TraceResiduals out;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = grid.node(i);
    const Vector al = problem.alpha(x);
    const Vector ca = al.array().cos().matrix();
    const Vector sa = al.array().sin().matrix();
    const auto a = field.a(i, i);
    const auto b = field.b(i, i);
    u[i] = ca.asDiagonal() * a + sa.asDiagonal() * b;
    const Matrix v = sa.asDiagonal() * a - ca.asDiagonal() * b;

    const Matrix lhs212 = 2.0 * u[i];
    const Matrix rhs212 = integrals.t1[2 * i];
    out.r212 = std::max(out.r212, (lhs212 - rhs212).cwiseAbs().maxCoeff());

    Matrix rhs213 = integrals.t2[2 * i];
    rhs213.diagonal() += problem.p_values(x) - p0;
    out.r213 = std::max(out.r213, (2.0 * v - rhs213).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double x = grid.node(i);
    const Matrix derivative = (u[i + 1] - u[i - 1]) / grid.step();  // 2 * centred difference
    Matrix target = problem.evaluate_q(x);
    target.diagonal() += problem.p_values(x).array().square().matrix();
    out.r33 = std::max(out.r33, (derivative - target).cwiseAbs().maxCoeff());
  }
  return out;
}

std::string lattice_csv(const KernelField& field) {
  std::string out = "i,k,entry_row,entry_col,A_value,B_value\n";
  const int d = field.dimension();
  for (std::size_t i = 0; i <= field.grid().n_steps(); ++i) {
    for (std::size_t k = 0; k <= i; ++k) {
      const auto a = field.a(i, k);
      const auto b = field.b(i, k);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          out += std::to_string(i) + "," + std::to_string(k) + "," + std::to_string(r) + "," +
                 std::to_string(c) + "," + format_number(a(r, c)) + "," + format_number(b(r, c)) +
                 "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace pencil
