#include "pencil/cli.hpp"

#include <omp.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pencil/asymptotics.hpp"
#include "pencil/errors.hpp"
#include "pencil/harness.hpp"
#include "pencil/json_io.hpp"
#include "pencil/kernels.hpp"
#include "pencil/propagator.hpp"
#include "pencil/spectral.hpp"

namespace pencil::cli {

namespace {

using nlohmann::json;

/// Options of one invocation. Flags win over the config file's "run" section,
/// which wins over the built-in defaults.
struct RunConfig {
  std::string config_path;
  std::string out_path;
  std::string scan_out_path;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<std::size_t> grid_n;
  std::optional<std::size_t> n_scan;
  std::optional<double> tol;
  std::string theorem = "all";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::vector<double> lambdas;
  bool gzip = false;
  bool skip_convergence = false;
};

struct Loaded {
  json raw;
  json run;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Loaded load(const RunConfig& cfg) {
  if (cfg.config_path.empty()) throw ConfigError("--config is required");
  Loaded out;
  out.raw = parse_json_text(read_file(cfg.config_path));
  if (out.raw.is_object() && out.raw.contains("run")) {
    out.run = out.raw.at("run");
    if (!out.run.is_object()) throw ConfigError("'run' must be an object");
  } else {
    out.run = json::object();
  }
  return out;
}

template <typename T>
T pick(const std::optional<T>& flag, const json& run, const char* key, T fallback) {
  if (flag) return *flag;
  if (run.contains(key)) {
    try {
      return run.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("run.") + key + ": " + e.what());
    }
  }
  return fallback;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
}

void check_window(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("window must satisfy lambda_min < lambda_max");
}

std::size_t pick_grid(const RunConfig& cfg, const json& run, std::size_t fallback) {
  const auto n = pick<std::size_t>(cfg.grid_n, run, "grid_n", fallback);
  if (n < 16) throw ConfigError("grid_n must be at least 16");
  return n;
}

SearchOptions search_options(const RunConfig& cfg, const json& run) {
  SearchOptions opts;
  opts.n_scan = pick<std::size_t>(cfg.n_scan, run, "n_scan", 0);
  opts.accept_tol = pick<double>(std::nullopt, run, "accept_tol", opts.accept_tol);
  opts.refine_tol = pick<double>(std::nullopt, run, "refine_tol", opts.refine_tol);
  opts.cluster_tol = pick<double>(std::nullopt, run, "cluster_tol", opts.cluster_tol);
  check_positive(opts.accept_tol, "accept_tol");
  check_positive(opts.refine_tol, "refine_tol");
  check_positive(opts.cluster_tol, "cluster_tol");
  if (cfg.n_scan && *cfg.n_scan < 2) throw ConfigError("n_scan must be at least 2");
  return opts;
}

void write_output(const std::string& path, const std::string& content, bool gzip,
                  std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  if (gzip) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (f == nullptr) throw ConfigError("cannot open output '" + path + "'");
    const int written = gzwrite(f, content.data(), static_cast<unsigned>(content.size()));
    gzclose(f);
    if (written != static_cast<int>(content.size())) {
      throw ConfigError("short write to '" + path + "'");
    }
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output '" + path + "'");
  f << content;
}

// Summary lines go to stdout unless stdout already carries the data.
std::ostream& summary_stream(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return cfg.out_path.empty() ? err : out;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto loaded = load(cfg);
  const auto doc = problem_document_from_json(loaded.raw);
  const double lo = pick<double>(cfg.lambda_min, loaded.run, "lambda_min", -5.25);
  const double hi = pick<double>(cfg.lambda_max, loaded.run, "lambda_max", 5.25);
  check_window(lo, hi);
  auto opts = search_options(cfg, loaded.run);
  if (cfg.tol) {
    check_positive(*cfg.tol, "--tol");
    opts.accept_tol = *cfg.tol;
  }
  const UniformGrid grid(pick_grid(cfg, loaded.run, doc.grid_n));
  const Shooter shooter(doc.problem, grid);

  const auto spectrum = locate_eigenvalues(shooter, lo, hi, opts);
  write_output(cfg.out_path, spectrum_csv(spectrum), false, out);
  if (!cfg.scan_out_path.empty()) {
    const auto samples =
        characteristic_scan(shooter, lo, hi, opts.scan_intervals(lo, hi));
    write_output(cfg.scan_out_path, scan_csv(samples), false, out);
  }

  double min_residual = 0.0;
  if (!spectrum.records.empty()) {
    min_residual = std::min_element(spectrum.records.begin(), spectrum.records.end(),
                                    [](const auto& a, const auto& b) {
                                      return a.residual < b.residual;
                                    })->residual;
  }
  summary_stream(cfg, out, err) << "eigenvalues: " << spectrum.records.size() << " ("
                                << spectrum.total_multiplicity() << " with multiplicity) on ["
                                << format_number(lo) << ", " << format_number(hi)
                                << "], grid_n " << grid.n_steps() << ", min residual "
                                << format_number(min_residual) << "\n";
  return kSuccess;
}

int cmd_kernels(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto loaded = load(cfg);
  const auto doc = problem_document_from_json(loaded.raw);
  if (cfg.lambda_min || cfg.lambda_max) {
    err << "warning: kernels need no spectral window; --lambda-min/--lambda-max ignored\n";
  }
  const std::size_t n = pick_grid(cfg, loaded.run, doc.grid_n);
  std::vector<double> lambdas = cfg.lambdas;
  if (lambdas.empty()) {
    lambdas = pick<std::vector<double>>(std::nullopt, loaded.run, "lambdas", {1.3, 2.7, 5.1});
  }
  if (lambdas.empty()) throw ConfigError("lambdas must not be empty");

  const auto field = solve_goursat(doc.problem, UniformGrid(n));
  const auto rep = representation_residual(field, doc.problem, lambdas);
  const auto trace = trace_identity_residual(field, doc.problem);

  json summary;
  summary["grid_n"] = n;
  summary["lambdas"] = lambdas;
  summary["r33"] = trace.r33;
  summary["r212"] = trace.r212;
  summary["r213"] = trace.r213;
  summary["representation_residual"] = rep.max_deviation;
  summary["representation_lambda"] = rep.lambda;
  summary["representation_x"] = rep.x;
  if (!cfg.skip_convergence) {
    const auto fine = solve_goursat(doc.problem, UniformGrid(2 * n));
    const auto rep_fine = representation_residual(fine, doc.problem, lambdas);
    const auto trace_fine = trace_identity_residual(fine, doc.problem);
    summary["convergence"] = {
        {"grid_n_fine", 2 * n},
        {"representation_residual_fine", rep_fine.max_deviation},
        {"representation_ratio", rep.max_deviation / rep_fine.max_deviation},
        {"r33_fine", trace_fine.r33},
        {"r33_ratio", trace.r33 / trace_fine.r33},
    };
  }
  if (!cfg.out_path.empty()) write_output(cfg.out_path, lattice_csv(field), cfg.gzip, out);
  out << summary.dump(2) << "\n";
  return kSuccess;
}

std::vector<std::string> selected_theorems(const std::string& name) {
  if (name == "all") return {"t31", "t32", "ground", "eq39"};
  if (name == "t31" || name == "t32" || name == "ground" || name == "eq39") return {name};
  throw ConfigError("unknown theorem '" + name + "' (expected t31|t32|ground|eq39|all)");
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto loaded = load(cfg);
  const auto doc = problem_document_from_json(loaded.raw);
  const auto& problem = doc.problem;
  const auto theorems = selected_theorems(cfg.theorem);
  const bool single = theorems.size() == 1;

  const UniformGrid grid(pick_grid(cfg, loaded.run, doc.grid_n));
  const std::uint64_t seed = pick<std::uint64_t>(cfg.seed, loaded.run, "seed", 0);
  HarnessOptions options;
  options.search = search_options(cfg, loaded.run);
  options.tol = pick<double>(cfg.tol, loaded.run, "tol", options.tol);
  options.match_tol = pick<double>(std::nullopt, loaded.run, "match_tol", options.match_tol);
  options.cross_check = pick<bool>(std::nullopt, loaded.run, "cross_check", true);
  check_positive(options.tol, "tol");
  check_positive(options.match_tol, "match_tol");
  const double lo = pick<double>(cfg.lambda_min, loaded.run, "lambda_min", -3.5);
  const double hi = pick<double>(cfg.lambda_max, loaded.run, "lambda_max", 3.5);
  check_window(lo, hi);
  const int n_max = pick<int>(cfg.n_max, loaded.run, "n_max", 3);

  std::vector<ScalarFunction> q_tilde;
  bool q_tilde_random = false;
  if (loaded.run.contains("q_tilde")) {
    q_tilde = functions_from_json(loaded.run.at("q_tilde"));
    if (q_tilde.size() != PencilProblem::upper_size(problem.dimension())) {
      throw ConfigError("run.q_tilde must list d(d+1)/2 upper-triangle entries");
    }
  } else {
    q_tilde = random_q_entries(problem.dimension(), seed);
    q_tilde_random = true;
  }

  json reports = json::array();
  bool violated = false;
  for (const auto& name : theorems) {
    VerificationReport report;
    try {
      if (name == "t31") {
        report = theorem31_contrapositive(problem, q_tilde, grid, lo, hi, options);
        if (q_tilde_random) report.notes.emplace_back("q_tilde drawn from the seeded family");
      } else if (name == "t32") {
        report = theorem32_forward(problem, grid, n_max, options);
      } else if (name == "ground") {
        report = ground_state_check(problem, grid, options.tol);
      } else {
        report = integral_identity_report(problem);
      }
    } catch (const HypothesisError& e) {
      if (single) throw ConfigError(e.what());
      report = {};
      report.theorem = name == "t31" ? TheoremId::t31 : TheoremId::t32;
      report.inputs_digest = content_digest(problem);
      report.verdict = Verdict::inconclusive;
      report.notes.emplace_back(std::string("hypothesis not met: ") + e.what());
    }
    report.seed = seed;
    violated = violated || report.verdict == Verdict::violated;
    summary_stream(cfg, out, err) << to_string(report.theorem) << ": " << to_string(report.verdict)
                                  << "\n";
    reports.push_back(to_json(report));
  }
  write_output(cfg.out_path, reports.dump(2) + "\n", false, out);
  return violated ? kViolation : kSuccess;
}

int cmd_asymptotics(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto loaded = load(cfg);
  const auto doc = problem_document_from_json(loaded.raw);
  const auto& problem = doc.problem;
  const int n_min = pick<int>(cfg.n_min, loaded.run, "n_min", 5);
  const int n_max = pick<int>(cfg.n_max, loaded.run, "n_max", 20);
  if (n_min > n_max) throw ConfigError("n_min must not exceed n_max");

  const Vector shift = problem.alpha(std::numbers::pi) / std::numbers::pi;
  const double lo = pick<double>(cfg.lambda_min, loaded.run, "lambda_min",
                                 n_min - 0.5 + shift.minCoeff());
  const double hi = pick<double>(cfg.lambda_max, loaded.run, "lambda_max",
                                 n_max + 0.5 + shift.maxCoeff());
  check_window(lo, hi);
  const std::size_t fallback =
      std::max(doc.grid_n, default_grid_steps(std::max(std::abs(lo), std::abs(hi))));
  const UniformGrid grid(pick_grid(cfg, loaded.run, fallback));

  const auto spectrum = locate_eigenvalues(problem, grid, lo, hi, search_options(cfg, loaded.run));
  const auto report =
      asymptotic_gap_report(spectrum, leading_order_predictions(problem, n_min, n_max));
  write_output(cfg.out_path, gap_report_csv(report), false, out);

  const auto skipped = std::count_if(report.rows.begin(), report.rows.end(),
                                     [](const GapRow& r) { return r.skipped; });
  auto& s = summary_stream(cfg, out, err);
  s << "gap fit: c = " << format_number(report.fitted_c)
    << ", exponent = " << format_number(report.fitted_exponent) << "\n";
  if (skipped > 0) s << "skipped rows: " << skipped << " (prediction outside the window)\n";
  return kSuccess;
}

int cmd_validate_bc(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto loaded = load(cfg);
  const auto bc = boundary_from_document(loaded.raw);
  const auto r = validate_boundary(bc.left_a, bc.left_b, bc.right_c, bc.right_d);
  json report = {
      {"self_adjoint_dc", {{"pass", r.self_adjoint_ok}, {"residual", r.self_adjoint_residual}}},
      {"orthogonal_ba", {{"pass", r.orthogonality_ok}, {"residual", r.orthogonality_residual}}},
      {"rank_ab", {{"pass", r.left_rank_ok}, {"rank", r.left_rank}}},
      {"rank_cd", {{"pass", r.right_rank_ok}, {"rank", r.right_rank}}},
      {"dimension", r.dimension},
      {"passed", r.passed()},
  };
  write_output(cfg.out_path, report.dump(2) + "\n", false, out);
  return r.passed() ? kSuccess : kConfigError;
}

void add_common_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--config", cfg.config_path, "Problem definition document (JSON)")->required();
  sub.add_option("--out", cfg.out_path, "Output file (default: standard output)");
  sub.add_option("--lambda-min", cfg.lambda_min, "Lower end of the spectral window");
  sub.add_option("--lambda-max", cfg.lambda_max, "Upper end of the spectral window");
  sub.add_option("--grid-n", cfg.grid_n, "Integration steps on [0, pi]");
  sub.add_option("--n-scan", cfg.n_scan, "Scan intervals over the window");
  sub.add_option("--tol", cfg.tol, "Acceptance (spectrum) or potential (verify) tolerance");
  sub.add_option("--seed", cfg.seed, "Seed for randomized perturbations");
  sub.add_option("--jobs", cfg.jobs, "Maximum concurrent workers")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral solver and verification harness for quadratic matrix Sturm-Liouville pencils",
               "pencil"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* spectrum = app.add_subcommand("spectrum", "Locate real eigenvalues; writes value,multiplicity,residual CSV");
  add_common_options(*spectrum, cfg);
  spectrum->add_option("--scan-out", cfg.scan_out_path, "Also write the lambda,det_w,sigma_min scan");

  auto* kernels = app.add_subcommand("kernels", "Solve the kernel system and report residuals");
  add_common_options(*kernels, cfg);
  kernels->add_flag("--gzip", cfg.gzip, "Compress the lattice CSV");
  kernels->add_option("--lambdas", cfg.lambdas, "Lambdas for the representation check")->delimiter(',');
  kernels->add_flag("--no-convergence", cfg.skip_convergence, "Skip the doubled-grid study");

  auto* verify = app.add_subcommand("verify", "Run theorem verification suites; JSON reports");
  add_common_options(*verify, cfg);
  verify->add_option("--theorem", cfg.theorem, "t31|t32|ground|eq39|all");
  verify->add_option("--n-max", cfg.n_max, "Largest |n| in the rigidity window");

  auto* asymptotics = app.add_subcommand("asymptotics", "Gap report against n + alpha_j/pi");
  add_common_options(*asymptotics, cfg);
  asymptotics->add_option("--n-min", cfg.n_min, "First index n");
  asymptotics->add_option("--n-max", cfg.n_max, "Last index n");

  auto* validate = app.add_subcommand("validate-bc", "Check boundary-matrix admissibility");
  add_common_options(*validate, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  if (cfg.jobs) omp_set_num_threads(*cfg.jobs);

  try {
    if (spectrum->parsed()) return cmd_spectrum(cfg, out, err);
    if (kernels->parsed()) return cmd_kernels(cfg, out, err);
    if (verify->parsed()) return cmd_verify(cfg, out, err);
    if (asymptotics->parsed()) return cmd_asymptotics(cfg, out, err);
    if (validate->parsed()) return cmd_validate_bc(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidBoundaryError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ShapeError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace pencil::cli
