#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "pencil/errors.hpp"
#include "pencil/json_io.hpp"
#include "pencil/model.hpp"
#include "pencil/quadrature.hpp"
#include "support.hpp"

using namespace pencil;
using pencil::test::cos1;

constexpr double kPi = std::numbers::pi;

TEST_CASE("scalar functions evaluate and integrate exactly") {
  const auto poly = ScalarFunction::polynomial({1.0, 2.0, 3.0});
  CHECK(poly(2.0) == doctest::Approx(17.0));
  CHECK(poly.integral(2.0) == doctest::Approx(14.0));

  const auto series = ScalarFunction::cosine_series({1.0, 0.5, -0.25});
  const double x = 1.1;
  CHECK(series(x) == doctest::Approx(1.0 + 0.5 * std::cos(x) - 0.25 * std::cos(2 * x)));
  CHECK(series.integral(x) ==
        doctest::Approx(x + 0.5 * std::sin(x) - 0.125 * std::sin(2 * x)));

  CHECK(ScalarFunction::zero()(1.0) == 0.0);
  CHECK(ScalarFunction::constant(-0.7).integral(kPi) == doctest::Approx(-0.7 * kPi));
  CHECK(ScalarFunction::zero().is_identically_zero());
  CHECK(ScalarFunction::polynomial({0.0, 0.0}).is_identically_zero());
  CHECK_FALSE(cos1(1e-12).is_identically_zero());
}

TEST_CASE("structural errors in function specs") {
  CHECK_THROWS_AS(ScalarFunction::make(FunctionKind::constant, {1.0, 2.0}), StructuralError);
  CHECK_THROWS_AS(ScalarFunction::make(FunctionKind::polynomial, {}), StructuralError);
  CHECK_THROWS_AS(ScalarFunction::make(FunctionKind::zero, {1.0}), StructuralError);
  CHECK_THROWS_AS(ScalarFunction::polynomial({1.0, std::nan("")}), StructuralError);
}

TEST_CASE("squared matches pointwise square for every kind") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c{u(rng), u(rng), u(rng)};
    for (const auto& f : {ScalarFunction::polynomial(c), ScalarFunction::cosine_series(c),
                          ScalarFunction::constant(c[0])}) {
      const auto g = f.squared();
      for (double x : {0.0, 0.4, 1.7, kPi}) CHECK(g(x) == doctest::Approx(f(x) * f(x)));
    }
  }
}

TEST_CASE("standard boundary quadruples are admissible") {
  for (int d : {1, 2, 3}) {
    for (const auto& bc : {BoundaryMatrices::neumann(d), BoundaryMatrices::dirichlet(d)}) {
      const auto r = validate_boundary(bc.left_a, bc.left_b, bc.right_c, bc.right_d);
      CHECK(r.passed());
      CHECK(r.left_rank == d);
      CHECK(r.right_rank == d);
    }
  }
  CHECK(BoundaryMatrices::neumann(2).is_neumann());
  CHECK_FALSE(BoundaryMatrices::dirichlet(2).is_neumann());
}

TEST_CASE("identity quadruple fails orthogonality with residual one") {
  const Matrix i2 = Matrix::Identity(2, 2);
  const auto r = validate_boundary(i2, i2, i2, i2);
  CHECK_FALSE(r.orthogonality_ok);
  CHECK(r.orthogonality_residual == doctest::Approx(1.0));
  CHECK(r.self_adjoint_ok);
  CHECK_FALSE(r.passed());
}

TEST_CASE("rank deficiency is reported") {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;
  const auto r = validate_boundary(a, b, a, Matrix::Identity(2, 2));
  CHECK(r.left_rank == 1);
  CHECK_FALSE(r.left_rank_ok);
  CHECK(numerical_rank(Matrix::Identity(3, 3)) == 3);
}

TEST_CASE("problem construction validates shapes and boundary") {
  CHECK_THROWS_AS(PencilProblem({cos1(0.1)}, {}, BoundaryMatrices::neumann(1)), ShapeError);
  CHECK_THROWS_AS(PencilProblem({cos1(0.1)}, {cos1(0.1)}, BoundaryMatrices::neumann(2)),
                  ShapeError);
  const Matrix i1 = Matrix::Identity(1, 1);
  CHECK_THROWS_AS(PencilProblem({cos1(0.1)}, {cos1(0.1)}, {i1, i1, i1, i1}),
                  InvalidBoundaryError);
}

TEST_CASE("potentials are symmetric and alpha integrates p") {
  const auto problem = test::coupled_problem();
  for (double x : {0.0, 0.3, 2.0, kPi}) {
    const Matrix q = problem.evaluate_q(x);
    CHECK(test::max_abs(q - q.transpose()) == 0.0);
    const Matrix p = problem.evaluate_p(x);
    CHECK(test::max_abs(p - Matrix(p.diagonal().asDiagonal())) == 0.0);
  }
  CHECK(problem.q_entry(1, 0) == problem.q_entry(0, 1));
  CHECK(problem.alpha(kPi).cwiseAbs().maxCoeff() < 1e-15);
  const auto c = test::constant_problem(0.5, 0.0);
  CHECK(c.alpha(1.0)(0) == doctest::Approx(0.5));
  CHECK(c.integral_p_squared(2.0)(0, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(problem.evaluate_q(-0.1), DomainError);
  CHECK_THROWS_AS(problem.evaluate_q(kPi + 0.1), DomainError);
}

TEST_CASE("upper index enumerates the triangle row by row") {
  CHECK(PencilProblem::upper_size(3) == 6);
  CHECK(PencilProblem::upper_index(0, 0, 3) == 0);
  CHECK(PencilProblem::upper_index(0, 2, 3) == 2);
  CHECK(PencilProblem::upper_index(1, 1, 3) == 3);
  CHECK(PencilProblem::upper_index(2, 1, 3) == PencilProblem::upper_index(1, 2, 3));
  CHECK(PencilProblem::upper_index(2, 2, 3) == 5);
}

TEST_CASE("uniform grid ends exactly at pi") {
  const UniformGrid grid(7);
  CHECK(grid.node(0) == 0.0);
  CHECK(grid.node(7) == kPi);
  CHECK(grid.step() == doctest::Approx(kPi / 7));
  CHECK_THROWS_AS(grid.node(8), DomainError);
  CHECK(grid.nearest_index(0.3 * kPi) == 2);
  CHECK(grid.nearest_index(kPi) == 7);
  CHECK_THROWS_AS(UniformGrid(0), PreconditionError);
}

TEST_CASE("simpson is exact for cubics and handles odd panel counts") {
  for (std::size_t n : {2u, 3u, 8u, 9u}) {
    const double h = 1.0 / static_cast<double>(n);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double x = i * h;
      f[i] = n % 2 == 0 ? x * x * x : x;
    }
    CHECK(simpson(f, h) == doctest::Approx(n % 2 == 0 ? 0.25 : 0.5));
    const auto running = cumulative_simpson(f, h);
    CHECK(running.size() == f.size());
    CHECK(running.front() == 0.0);
    CHECK(running.back() == doctest::Approx(simpson(f, h)));
  }
  CHECK(simpson(std::vector<double>{1.0}, 0.1) == 0.0);
}

TEST_CASE("problem documents parse shorthand and explicit boundaries") {
  const auto doc = parse_problem_document(R"({
    "dimension": 1,
    "p": [{"kind": "cosine_series", "coefficients": [0, 0.3]}],
    "q": [{"kind": "zero"}],
    "boundary": "dirichlet",
    "grid_n": 500
  })");
  CHECK(doc.grid_n == 500);
  CHECK(doc.problem.boundary().left_a(0, 0) == 1.0);

  const auto explicit_doc = parse_problem_document(R"({
    "dimension": 2,
    "p": [{"kind": "zero"}, {"kind": "zero"}],
    "q": [{"kind": "zero"}, {"kind": "zero"}, {"kind": "zero"}],
    "boundary": {"A": [[0,0],[0,0]], "B": [1,0,0,1], "C": [0,0,0,0], "D": [[1,0],[0,1]]}
  })");
  CHECK(explicit_doc.grid_n == 4000);
  CHECK(explicit_doc.problem.boundary().is_neumann());
}

TEST_CASE("malformed documents raise config errors with a location") {
  try {
    parse_problem_document("{\n  \"dimension\": 1,\n  \"p\": [\n}");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 1);
  }
  const char* base = R"({"dimension":1,"p":[{"kind":"zero"}],"q":[{"kind":"zero"}],)";
  CHECK_THROWS_AS(parse_problem_document(std::string(base) + R"("boundary":"robin"})"), ConfigError);
  CHECK_THROWS_AS(parse_problem_document(std::string(base) + R"("boundary":"neumann","grid_n":8})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_problem_document(R"({"dimension":1,"p":[{"kind":"bessel"}],"q":[{"kind":"zero"}],"boundary":"neumann"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_problem_document(R"({"dimension":2,"p":[{"kind":"zero"}],"q":[],"boundary":"neumann"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_problem_document(R"({"dimension":1,"p":[{"kind":"zero"}],"q":[{"kind":"zero"}],"boundary":{"A":[1],"B":[1],"C":[1],"D":[1]}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_problem_document(std::string(base) + R"("boundary":"neumann","schema":"other/2"})"),
                  ConfigError);
}

TEST_CASE("serialization round-trips random problems") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 1 + trial % 3;
    std::vector<ScalarFunction> p, q;
    for (int j = 0; j < d; ++j) p.push_back(test::random_cosine(rng, 0.5, trial % 2 == 0));
    for (std::size_t j = 0; j < PencilProblem::upper_size(d); ++j) {
      q.push_back(j % 2 == 0 ? test::random_cosine(rng, 0.5, false)
                             : ScalarFunction::polynomial({0.1 * j, -0.2}));
    }
    const auto bc = trial % 3 == 0 ? BoundaryMatrices::dirichlet(d) : BoundaryMatrices::neumann(d);
    const ProblemDocument original{PencilProblem(p, q, bc), 100 + static_cast<std::size_t>(trial)};

    const auto text = to_json(original).dump();
    const auto restored = parse_problem_document(text);
    CHECK(restored.grid_n == original.grid_n);
    CHECK(restored.problem.p_diagonal() == original.problem.p_diagonal());
    CHECK(restored.problem.q_upper() == original.problem.q_upper());
    CHECK(restored.problem.boundary().left_a == original.problem.boundary().left_a);
    CHECK(restored.problem.boundary().right_d == original.problem.boundary().right_d);
    CHECK(to_json(restored).dump() == text);
    CHECK(content_digest(restored.problem) == content_digest(original.problem));
  }
}

TEST_CASE("content digest ignores grid size and tracks the potentials") {
  const auto problem = test::cosine_problem();
  const auto digest = content_digest(problem);
  CHECK(digest.size() == 16);
  CHECK(content_digest(problem.with_q({cos1(0.2000001)})) != digest);
  CHECK(content_digest(to_json(ProblemDocument{problem, 100}).dump()) !=
        content_digest(to_json(ProblemDocument{problem, 200}).dump()));
  CHECK(content_digest(std::string_view{}) == "cbf29ce484222325");
}

TEST_CASE("numbers format with round-trip precision") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(kPi)) == kPi);
}
