#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pencil/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = pencil::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("pencil_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kZero2 = R"({"dimension":2,"p":[{"kind":"zero"},{"kind":"zero"}],
  "q":[{"kind":"zero"},{"kind":"zero"},{"kind":"zero"}],"boundary":"neumann","grid_n":1000})";

const char* kZero1 = R"({"dimension":1,"p":[{"kind":"zero"}],"q":[{"kind":"zero"}],
  "boundary":"neumann","grid_n":4000})";

std::vector<std::vector<double>> csv_rows(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(cell.empty() ? NAN : std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("spectrum of the zero problem in two channels") {
  const auto cfg = write("zero2.json", kZero2);
  const auto r = run({"spectrum", "--config", cfg, "--lambda-min", "-3.25", "--lambda-max", "3.25"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(std::abs(rows[i][0] - (static_cast<double>(i) - 3.0)) < 1e-6);
    CHECK(rows[i][1] == 2.0);
  }
  CHECK(r.err.find("eigenvalues: 7 (14 with multiplicity)") != std::string::npos);
}

TEST_CASE("spectrum output file and idempotence") {
  const auto cfg = write("p05.json", R"({"dimension":1,"p":[{"kind":"constant","coefficients":[0.5]}],
    "q":[{"kind":"zero"}],"boundary":"neumann","grid_n":2000,"run":{"lambda_min":-2,"lambda_max":3}})");
  const auto out1 = (scratch() / "s1.csv").string();
  const auto out2 = (scratch() / "s2.csv").string();
  const auto scan = (scratch() / "scan.csv").string();
  REQUIRE(run({"spectrum", "--config", cfg, "--out", out1, "--scan-out", scan}).code == 0);
  const auto second = run({"spectrum", "--config", cfg, "--out", out2, "--jobs", "1"});
  REQUIRE(second.code == 0);
  CHECK(second.out.find("eigenvalues: 6") != std::string::npos);
  CHECK(read(out1) == read(out2));
  bool found = false;
  for (const auto& row : csv_rows(read(out1))) found |= std::abs(row[0] - 1.618033988749895) < 1e-6;
  CHECK(found);
  CHECK(read(scan).rfind("lambda,det_w,sigma_min\n", 0) == 0);
}

TEST_CASE("configuration errors exit with code 2") {
  const auto bad = write("bad.json", "{\n  \"dimension\": 1,\n  \"p\": [\n}");
  auto r = run({"spectrum", "--config", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 4, column 1") != std::string::npos);

  CHECK(run({"spectrum"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"spectrum", "--config", (scratch() / "missing.json").string()}).code == 2);
  const auto cfg = write("zero2b.json", kZero2);
  CHECK(run({"spectrum", "--config", cfg, "--lambda-min", "2", "--lambda-max", "1"}).code == 2);
  CHECK(run({"spectrum", "--config", cfg, "--grid-n", "8"}).code == 2);
  CHECK(run({"spectrum", "--config", cfg, "--jobs", "0"}).code == 2);
  CHECK(run({"verify", "--config", cfg, "--theorem", "t99"}).code == 2);
  const auto inadmissible = write("inadm.json", R"({"dimension":1,"p":[{"kind":"zero"}],
    "q":[{"kind":"zero"}],"boundary":{"A":[1],"B":[1],"C":[1],"D":[1]}})");
  CHECK(run({"spectrum", "--config", inadmissible}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("validate-bc") != std::string::npos);
}

TEST_CASE("an eigenvalue on the window edge is a numerical failure") {
  const auto cfg = write("zero2c.json", kZero2);
  const auto r = run({"spectrum", "--config", cfg, "--lambda-min", "-1", "--lambda-max", "1.5"});
  CHECK(r.code == 4);
  CHECK(r.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("kernels on the zero problem have vanishing residuals") {
  const auto cfg = write("zero1k.json", kZero1);
  const auto lattice = (scratch() / "lattice.csv.gz").string();
  const auto r = run({"kernels", "--config", cfg, "--grid-n", "64", "--out", lattice, "--gzip",
                      "--lambda-min", "0"});
  REQUIRE(r.code == 0);
  const auto summary = json::parse(r.out);
  for (const char* key : {"r33", "r212", "r213", "representation_residual"}) {
    CHECK(summary.at(key).get<double>() <= 1e-10);
  }
  CHECK(summary.contains("convergence"));
  CHECK(r.err.find("ignored") != std::string::npos);
  const auto bytes = read(lattice);
  REQUIRE(bytes.size() > 2);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x1f);
  CHECK(static_cast<unsigned char>(bytes[1]) == 0x8b);
}

TEST_CASE("kernel convergence study on a smooth instance") {
  const auto cfg = write("cos.json", R"({"dimension":1,
    "p":[{"kind":"cosine_series","coefficients":[0,0.3]}],
    "q":[{"kind":"cosine_series","coefficients":[0,0.2]}],"boundary":"neumann"})");
  const auto r = run({"kernels", "--config", cfg, "--grid-n", "200", "--lambdas", "1.3,2.7"});
  REQUIRE(r.code == 0);
  const auto summary = json::parse(r.out);
  CHECK(summary["lambdas"].size() == 2);
  CHECK(summary["convergence"]["representation_ratio"].get<double>() >= 3.5);
  CHECK(summary["convergence"]["r33_ratio"].get<double>() >= 3.5);
  const auto quick = run({"kernels", "--config", cfg, "--grid-n", "64", "--no-convergence"});
  CHECK_FALSE(json::parse(quick.out).contains("convergence"));
}

TEST_CASE("verify reports per theorem") {
  const auto cfg = write("zero1v.json", R"({"dimension":1,"p":[{"kind":"zero"}],
    "q":[{"kind":"zero"}],"boundary":"neumann","grid_n":1000,
    "run":{"q_tilde":[{"kind":"constant","coefficients":[0.1]}],"cross_check":false}})");
  auto r = run({"verify", "--config", cfg, "--theorem", "t32"});
  CHECK(r.code == 0);
  auto reports = json::parse(r.out);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0]["theorem_id"] == "T32");
  CHECK(reports[0]["verdict"] == "consistent");

  r = run({"verify", "--config", cfg, "--theorem", "t31"});
  CHECK(r.code == 0);
  reports = json::parse(r.out);
  CHECK(reports[0]["verdict"] == "consistent");
  CHECK(reports[0]["metrics"]["spectral_deviation"].get<double>() >= 0.31);
  CHECK(reports[0]["seed"] == 0);
}

TEST_CASE("a numerically indistinguishable perturbation is flagged as a violation") {
  // Q~ = 1e-9 moves eigenvalues near n by ~5e-10/n, far below match_tol
  const auto cfg = write("tiny.json", R"({"dimension":1,"p":[{"kind":"zero"}],
    "q":[{"kind":"zero"}],"boundary":"neumann","grid_n":1000,
    "run":{"q_tilde":[{"kind":"constant","coefficients":[1e-9]}],"cross_check":false}})");
  const auto r = run({"verify", "--config", cfg, "--theorem", "t31", "--tol", "1e-10",
                      "--lambda-min", "0.5", "--lambda-max", "3.5"});
  CHECK(r.code == 3);
  CHECK(json::parse(r.out)[0]["verdict"] == "violated");
}

TEST_CASE("hypothesis failures depend on the theorem selection") {
  const auto cfg = write("shift.json", R"({"dimension":1,
    "p":[{"kind":"constant","coefficients":[0.5]}],"q":[{"kind":"zero"}],
    "boundary":"neumann","grid_n":500,"run":{"cross_check":false}})");
  CHECK(run({"verify", "--config", cfg, "--theorem", "t32"}).code == 2);
  const auto all = run({"verify", "--config", cfg, "--theorem", "all", "--seed", "3"});
  REQUIRE(all.code == 0);
  const auto reports = json::parse(all.out);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0]["verdict"] == "inconclusive");
  CHECK(reports[1]["verdict"] == "inconclusive");
  CHECK(reports[3]["theorem_id"] == "eq39");
}

TEST_CASE("asymptotics on the zero problem has no gap") {
  const auto cfg = write("zero1a.json", kZero1);
  const auto r = run({"asymptotics", "--config", cfg, "--n-min", "5", "--n-max", "8"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) CHECK(row[4] <= 1e-9);
}

TEST_CASE("asymptotics flags rows the window does not cover") {
  const auto cfg = write("p05a.json", R"({"dimension":1,"p":[{"kind":"constant","coefficients":[0.5]}],
    "q":[{"kind":"zero"}],"boundary":"neumann","grid_n":2000})");
  const auto r = run({"asymptotics", "--config", cfg, "--n-min", "5", "--n-max", "7",
                      "--lambda-min", "5.2", "--lambda-max", "6.8"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(std::isnan(rows[2][2]));
  CHECK(std::abs(rows[0][4] - 0.024937810560444973) < 1e-8);
  CHECK(r.err.find("skipped rows: 1") != std::string::npos);
}

TEST_CASE("validate-bc reports each condition") {
  const auto good = write("bc_neumann.json", R"({"dimension":2,"boundary":"neumann"})");
  auto r = run({"validate-bc", "--config", good});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["passed"] == true);

  const auto bad = write("bc_identity.json",
                         R"({"dimension":2,"boundary":{"A":[1,0,0,1],"B":[1,0,0,1],"C":[1,0,0,1],"D":[1,0,0,1]}})");
  r = run({"validate-bc", "--config", bad});
  CHECK(r.code == 2);
  const auto report = json::parse(r.out);
  CHECK(report["orthogonal_ba"]["pass"] == false);
  CHECK(report["orthogonal_ba"]["residual"] == 1.0);
  CHECK(report["self_adjoint_dc"]["pass"] == true);
}
