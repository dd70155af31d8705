#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pencil/errors.hpp"
#include "pencil/harness.hpp"
#include "support.hpp"

using namespace pencil;
using test::cos1;

constexpr double kPi = std::numbers::pi;

namespace {

std::vector<ScalarFunction> scaled_identity(int d, double c) {
  std::vector<ScalarFunction> q;
  for (int r = 0; r < d; ++r) {
    for (int k = r; k < d; ++k) {
      q.push_back(r == k && c != 0.0 ? ScalarFunction::constant(c) : ScalarFunction::zero());
    }
  }
  return q;
}

HarnessOptions quick() {
  HarnessOptions o;
  o.cross_check = false;
  return o;
}

}  // namespace

TEST_CASE("mean-potential contrapositive on a shifted constant") {
  for (int d : {1, 2}) {
    const auto report = theorem31_contrapositive(test::zero_problem(d), scaled_identity(d, 0.1),
                                                 UniformGrid(1000), -3.5, 3.5, quick());
    CHECK(report.theorem == TheoremId::t31);
    CHECK(report.verdict == Verdict::consistent);
    CHECK(report.metric("mean_q_difference") == doctest::Approx(0.1 * kPi));
    CHECK(report.metric("spectral_deviation") >= 0.31);
    CHECK(report.metric("spectral_deviation") ==
          doctest::Approx(0.31622776601683794).epsilon(1e-6));
  }
}

TEST_CASE("identical potentials are inconclusive") {
  const auto problem = test::cosine_problem();
  const auto report =
      theorem31_contrapositive(problem, problem.q_upper(), UniformGrid(1000), -2.5, 2.5, quick());
  CHECK(report.verdict == Verdict::inconclusive);
  CHECK(report.metric("mean_q_difference") == 0.0);
  CHECK(report.metric("spectral_deviation") <= 1e-9);
}

TEST_CASE("zero-mean perturbation gives no verdict") {
  const auto report = theorem31_contrapositive(
      test::zero_problem(1), {ScalarFunction::cosine_series({0.0, 0.0, 0.2})}, UniformGrid(1000),
      -2.5, 2.5, quick());
  CHECK(report.metric("mean_q_difference") < 1e-15);
  CHECK(report.verdict == Verdict::inconclusive);
}

TEST_CASE("constant-coefficient families never violate the contrapositive") {
  for (double c : {0.05, 0.3, -0.2}) {
    const auto problem = test::constant_problem(0.0, 0.1);
    const auto report = theorem31_contrapositive(problem, {ScalarFunction::constant(0.1 + c)},
                                                 UniformGrid(800), -2.7, 2.7, quick());
    CHECK(report.verdict != Verdict::violated);
  }
}

TEST_CASE("ambiguous windows are widened and noted") {
  const auto report = theorem31_contrapositive(test::zero_problem(1), scaled_identity(1, 0.1),
                                               UniformGrid(800), -3.0, 3.0, quick());
  CHECK(report.verdict == Verdict::consistent);
  CHECK_FALSE(report.notes.empty());
  CHECK(report.metric("window_max") > 3.0);
}

TEST_CASE("the alpha(pi) hypothesis is enforced") {
  const auto shifted = test::constant_problem(0.5, 0.0);
  CHECK_THROWS_AS(theorem31_contrapositive(shifted, {ScalarFunction::zero()}, UniformGrid(200),
                                           -1.3, 1.3),
                  HypothesisError);
  CHECK_THROWS_AS(theorem32_forward(shifted, UniformGrid(200), 2), HypothesisError);
  const auto dirichlet = test::constant_problem(0.0, 0.0, BoundaryMatrices::dirichlet(1));
  CHECK_THROWS_AS(theorem32_forward(dirichlet, UniformGrid(200), 2), HypothesisError);
  CHECK_THROWS_AS(theorem31_contrapositive(test::zero_problem(2), {ScalarFunction::zero()},
                                           UniformGrid(200), -1.3, 1.3),
                  ShapeError);
}

TEST_CASE("rigidity holds on the zero problem in every dimension") {
  for (int d : {1, 2, 3}) {
    for (int n_max : {1, 5}) {
      // RK4 error in lambda grows like (h lambda)^4; the default grid keeps it below refine_tol
      const auto report = theorem32_forward(test::zero_problem(d), UniformGrid(4000), n_max, quick());
      CHECK(report.verdict == Verdict::consistent);
      CHECK(report.metric("spectral_deviation") <= SearchOptions{}.refine_tol);
      CHECK(report.metric("potential_size") == 0.0);
    }
  }
}

TEST_CASE("nonzero potentials move the spectrum") {
  const auto shifted = theorem32_forward(test::constant_problem(0.0, 0.1), UniformGrid(1000), 3);
  CHECK(shifted.verdict == Verdict::consistent);
  CHECK(shifted.metric("potential_size") == doctest::Approx(0.1));
  CHECK(shifted.metric("spectral_deviation") >= 0.31);

  const PencilProblem cosine({cos1(0.3)}, {ScalarFunction::zero()}, BoundaryMatrices::neumann(1));
  const auto report = theorem32_forward(cosine, UniformGrid(1000), 3);
  CHECK(report.verdict == Verdict::consistent);
  CHECK(report.metric("potential_size") == doctest::Approx(0.3));
  CHECK(report.metric("spectral_deviation") > 1e-4);
  CHECK(report.metric("grid_drift") < 1e-8);
}

TEST_CASE("ground-state residuals follow the columns of Q") {
  const auto zero = ground_state_check(test::zero_problem(2), UniformGrid(100));
  CHECK(zero.verdict == Verdict::consistent);
  CHECK(zero.metric("max_residual") == 0.0);
  CHECK(zero.metric("constant_ground_directions") == 2.0);

  const auto shifted = ground_state_check(test::constant_problem(0.0, 0.1), UniformGrid(100));
  CHECK(shifted.verdict == Verdict::consistent);
  CHECK(shifted.metric("r_1") == doctest::Approx(0.1));

  const PencilProblem split(test::zeros(2),
                            {ScalarFunction::zero(), ScalarFunction::zero(), ScalarFunction::constant(0.2)},
                            BoundaryMatrices::neumann(2));
  const auto partial = ground_state_check(split, UniformGrid(100));
  CHECK(partial.metric("r_1") == 0.0);
  CHECK(partial.metric("r_2") == doctest::Approx(0.2));
  CHECK(partial.metric("constant_ground_directions") == 1.0);
}

TEST_CASE("integral identity is a closed-form diagnostic") {
  const auto zero = integral_identity_39(test::zero_problem(2));
  CHECK(zero.residual == 0.0);
  CHECK(zero.lhs.rows() == 2);

  const auto klein_gordon = integral_identity_39(test::constant_problem(0.5, -0.25));
  CHECK(klein_gordon.lhs(0, 0) == doctest::Approx(-0.25 * kPi));
  CHECK(klein_gordon.rhs(0, 0) == doctest::Approx(-0.25 * kPi));
  CHECK(klein_gordon.residual < 1e-15);

  const auto off = integral_identity_39(test::constant_problem(0.5, 0.0));
  CHECK(off.residual == doctest::Approx(0.25 * kPi));
  CHECK(integral_identity_report(test::constant_problem(0.5, 0.0)).verdict == Verdict::inconclusive);
}

TEST_CASE("reports serialize with a fixed key set") {
  auto report = ground_state_check(test::zero_problem(1), UniformGrid(50));
  auto j = to_json(report);
  for (const char* key : {"theorem_id", "inputs_digest", "metrics", "verdict", "seed", "notes"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["theorem_id"] == "ground_state");
  CHECK(j["seed"].is_null());
  report.seed = 7;
  CHECK(to_json(report)["seed"] == 7);
  CHECK(std::isnan(report.metric("absent")));
  CHECK(to_string(Verdict::violated) == "violated");
  CHECK(to_string(TheoremId::eq39) == "eq39");
}

TEST_CASE("seeded families are reproducible") {
  const auto a = random_q_entries(3, 7);
  const auto b = random_q_entries(3, 7);
  const auto c = random_q_entries(3, 8);
  CHECK(a.size() == 6);
  CHECK(a == b);
  CHECK(a != c);
  const auto p = random_p_diagonal(2, 7);
  CHECK(p.size() == 2);
  for (const auto& f : p) CHECK(std::abs(f.integral(kPi)) < 1e-15);
}
