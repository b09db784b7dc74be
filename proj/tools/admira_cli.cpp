#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "admira/analysis.hpp"
#include "admira/error.hpp"
#include "admira/experiment.hpp"
#include "admira/text_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace admira;

namespace {

struct Settings {
  SolverConfig admira;
  SvtConfig svt;
  std::string ls = "auto";
  std::string svd = "auto";
  double svt_tau = 0.0;
  double svt_step = 0.0;
  std::size_t threads = 1;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  bool fixed_tolerance = false;
};

const std::map<std::string, SvdMode> kSvdModes{
    {"auto", SvdMode::automatic}, {"dense", SvdMode::dense}, {"lanczos", SvdMode::lanczos}};

// Config file keys are the long flag names with '-' replaced by '_'.
void apply_config(const json& config, Settings& s) {
  if (!config.is_object()) throw InvalidArgument("config: top level must be an object");
  for (const auto& [key, value] : config.items()) {
    if (key == "rank") s.admira.target_rank = value.get<std::size_t>();
    else if (key == "tol") s.admira.residual_tol = value.get<double>();
    else if (key == "max_iter") s.admira.max_iter = value.get<std::size_t>();
    else if (key == "cap_iterations") s.admira.cap_at_theoretical_bound = value.get<bool>();
    else if (key == "ls") s.ls = value.get<std::string>();
    else if (key == "ls_tol") s.admira.least_squares.tolerance = value.get<double>();
    else if (key == "ls_max_iter") s.admira.least_squares.max_iter = value.get<std::size_t>();
    else if (key == "svd") s.svd = value.get<std::string>();
    else if (key == "svd_tol") s.admira.svd.tolerance = value.get<double>();
    else if (key == "dense_threshold") s.admira.svd.dense_threshold = value.get<std::size_t>();
    else if (key == "svt_tau") s.svt_tau = value.get<double>();
    else if (key == "svt_step") s.svt_step = value.get<double>();
    else if (key == "svt_tol") s.svt.residual_tol = value.get<double>();
    else if (key == "svt_max_iter") s.svt.max_iter = value.get<std::size_t>();
    else if (key == "threads") s.threads = value.get<std::size_t>();
    else if (key == "trials") s.trials = value.get<std::size_t>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else if (key == "fixed_tolerance") s.fixed_tolerance = value.get<bool>();
    else throw InvalidArgument("config: unknown key '" + key + "'");
  }
}

// The config file is read before the command line so explicit flags win.
void preload_config(int argc, char** argv, Settings& s) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    if (path.empty()) continue;
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config '" + path + "'");
    apply_config(json::parse(in), s);
  }
}

void finalize(Settings& s) {
  s.admira.least_squares.method = parse_least_squares_method(s.ls);
  s.admira.svd.mode = kSvdModes.at(s.svd);
  s.svt.svd = s.admira.svd;
  if (s.svt_tau > 0.0) s.svt.tau = s.svt_tau;
  if (s.svt_step > 0.0) s.svt.step = s.svt_step;
  s.admira.seed = s.seed;
}

void add_common(CLI::App* app, Settings& s) {
  app->add_option("--config", "JSON file of flag values (keys use '_' for '-')")
      ->check(CLI::ExistingFile);
  app->add_option("--seed", s.seed, "Base seed")->capture_default_str();
}

void add_solver_flags(CLI::App* app, Settings& s) {
  app->add_option("--tol", s.admira.residual_tol, "Stop when |b - A X| / |b| falls below")
      ->capture_default_str();
  app->add_option("--max-iter", s.admira.max_iter, "ADMiRA iteration limit")->capture_default_str();
  app->add_flag("--cap-iterations", s.admira.cap_at_theoretical_bound,
                "Also stop after 6 (r + 1) iterations");
  app->add_option("--ls", s.ls, "Least-squares method")
      ->check(CLI::IsMember({"auto", "qr", "cg", "richardson"}))
      ->capture_default_str();
  app->add_option("--ls-tol", s.admira.least_squares.tolerance, "Iterative least-squares tolerance")
      ->capture_default_str();
  app->add_option("--ls-max-iter", s.admira.least_squares.max_iter,
                  "Iterative least-squares limit (0 = default)");
  app->add_option("--svd", s.svd, "Partial SVD path")
      ->check(CLI::IsMember({"auto", "dense", "lanczos"}))
      ->capture_default_str();
  app->add_option("--svd-tol", s.admira.svd.tolerance, "Lanczos residual tolerance")
      ->capture_default_str();
  app->add_option("--dense-threshold", s.admira.svd.dense_threshold,
                  "auto uses a dense SVD when min(m, n) <= this")
      ->capture_default_str();
}

void add_svt_flags(CLI::App* app, Settings& s) {
  app->add_option("--svt-tau", s.svt_tau, "SVT threshold (default 5 sqrt(mn))");
  app->add_option("--svt-step", s.svt_step, "SVT step (default 1.2 mn / p)");
  app->add_option("--svt-tol", s.svt.residual_tol, "SVT residual tolerance")->capture_default_str();
  app->add_option("--svt-max-iter", s.svt.max_iter, "SVT iteration limit")->capture_default_str();
}

// `trials` keeps a value from the config file, else takes the subcommand default.
void add_sweep_flags(CLI::App* app, Settings& s, std::size_t& trials, std::size_t default_trials) {
  trials = s.trials > 0 ? s.trials : default_trials;
  app->add_option("--trials", trials, "Trials per cell")->capture_default_str();
  app->add_option("--threads", s.threads, "Worker threads (results do not depend on this)")
      ->capture_default_str();
  app->add_flag("--fixed-tolerance", s.fixed_tolerance,
                "On noisy problems stop only at --tol, not at the noise level");
}

ExperimentOptions experiment_options(const Settings& s, std::size_t trials) {
  ExperimentOptions o;
  o.trials = trials;
  o.seed = s.seed;
  o.threads = std::max<std::size_t>(1, s.threads);
  o.admira = s.admira;
  o.svt = s.svt;
  o.stop_at_noise_level = !s.fixed_tolerance;
  return o;
}

json trace_json(const SolverReport& report) {
  return json{{"iterations", report.iterations},
              {"stop_reason", to_string(report.stop_reason)},
              {"residual_trace", report.residual_trace},
              {"error_trace", report.error_trace}};
}

void write_json(const std::string& path, const json& value) {
  if (path.empty() || path == "-") {
    std::cout << value.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << value.dump(2) << '\n';
}

struct GenArgs {
  std::size_t m = 100;
  std::size_t n = 100;
  std::size_t rank = 2;
  std::string kind = "sampling";
  std::size_t p = 0;
  double density = 0.0;
  double snr = std::numeric_limits<double>::quiet_NaN();
  std::string out_dir = ".";
};

ProblemSpec gen_spec(const GenArgs& g, std::uint64_t seed) {
  ProblemSpec spec;
  spec.m = g.m;
  spec.n = g.n;
  spec.r_true = g.rank;
  spec.kind = parse_operator_kind(g.kind);
  spec.p = g.p > 0 ? g.p
                   : static_cast<std::size_t>(
                         std::llround(g.density * static_cast<double>(g.m * g.n)));
  if (!std::isnan(g.snr)) spec.snr_meas_db = g.snr;
  spec.seed = seed;
  return spec;
}

int run_gen(const GenArgs& g, const Settings& s) {
  const ProblemSpec spec = gen_spec(g, s.seed);
  const Problem problem = generate_problem(spec);
  const fs::path dir(g.out_dir);
  fs::create_directories(dir);
  save_operator(dir / "operator.txt", *problem.op);
  save_vector(dir / "b.txt", problem.b);
  save_matrix(dir / "x0.txt", problem.x0);
  if (spec.snr_meas_db) save_vector(dir / "noise.txt", problem.noise);
  json meta{{"m", spec.m},
            {"n", spec.n},
            {"r_true", spec.r_true},
            {"kind", to_string(spec.kind)},
            {"p", spec.p},
            {"snr_meas_db", spec.snr_meas_db ? json(*spec.snr_meas_db) : json(nullptr)},
            {"seed", spec.seed},
            {"spec_hash", format_hash(spec_hash(spec))}};
  write_json((dir / "spec.json").string(), meta);
  std::cout << "wrote problem " << format_hash(spec_hash(spec)) << " to " << dir.string() << '\n';
  return 0;
}

struct SolveArgs {
  std::string op;
  std::string b;
  std::string x0;
  std::string algo = "admira";
  std::size_t rank = 1;
  std::size_t rank_search = 0;
  double eta = 1e-3;
  std::string search_mode = "bisection";
  std::string out = "solution.txt";
  std::string report = "-";
};

int run_solve(const SolveArgs& a, Settings s) {
  s.admira.target_rank = a.rank;
  const auto op = load_operator(a.op);
  const std::vector<double> b = load_vector(a.b);
  std::optional<DenseMatrix> x0;
  if (!a.x0.empty()) x0 = load_matrix(a.x0);
  const DenseMatrix* truth = x0 ? &*x0 : nullptr;

  const auto start = std::chrono::steady_clock::now();
  json report{{"algorithm", a.algo}};
  SolverReport result{FactoredMatrix(op->rows(), op->cols()), 0, {}, {}, StopReason::max_iter};
  if (a.algo == "svt") {
    const auto* sampling = dynamic_cast<const SamplingOperator*>(op.get());
    if (sampling == nullptr) throw InvalidArgument("svt requires a sampling operator file");
    result = svt_solve(*sampling, b, s.svt, truth);
  } else if (a.rank_search > 0) {
    const RankSearchMode mode =
        a.search_mode == "incremental" ? RankSearchMode::incremental : RankSearchMode::bisection;
    RankSearchResult search = rank_search(*op, b, a.rank_search, a.eta, mode, s.admira);
    json probes = json::array();
    for (const auto& [rank, ratio] : search.probes) {
      probes.push_back({{"rank", rank}, {"residual_ratio", ratio}});
    }
    report["rank_search"] = {{"feasible", search.feasible},
                             {"rank", search.rank},
                             {"residual_ratio", search.residual_ratio},
                             {"probes", probes}};
    result = std::move(search.report);
    if (truth != nullptr) {
      s.admira.target_rank = search.rank;
      result = admira_solve(*op, b, s.admira, truth);
    }
  } else {
    result = admira_solve(*op, b, s.admira, truth);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  save_factored(a.out, result.solution);
  report.update(trace_json(result));
  report["rank"] = result.solution.rank();
  report["residual_ratio"] = residual_ratio(*op, b, result.solution);
  if (truth != nullptr) report["snr_recon_db"] = snr_recon(*truth, result.solution);
  report["wall_time_s"] = wall;
  report["solution_file"] = a.out;
  write_json(a.report, report);
  return 0;
}

void print_rows(const Sweep<Table1Row>& sweep) {
  std::printf("%6s %9s %8s %8s %12s %10s %12s %10s\n", "n", "p", "p/n^2", "p/d_r", "SNR clean",
              "iters", "SNR 20dB", "iters");
  for (const auto& r : sweep.rows) {
    std::printf("%6zu %9zu %8.3f %8.2f %12.2f %10.2f %12.2f %10.2f\n", r.n, r.p, r.p_over_n2,
                r.p_over_dr, r.snr_noiseless, r.iterations_noiseless, r.snr_noisy,
                r.iterations_noisy);
  }
}

void print_rows(const Sweep<Table2Row>& sweep) {
  std::printf("%4s %7s %8s %12s %10s %12s %10s\n", "r", "p/n^2", "p/d_r", "ADMiRA dB", "iters",
              "SVT dB", "iters");
  for (const auto& r : sweep.rows) {
    std::printf("%4zu %7.3f %8.2f %12.2f %10.2f %12.2f %10.2f\n", r.r, r.p_over_n2, r.p_over_dr,
                r.admira_snr, r.admira_iterations, r.svt_snr, r.svt_iterations);
  }
}

void print_rows(const Sweep<PhaseRow>& sweep) {
  std::printf("%4s %9s %8s %8s %10s %10s\n", "r", "p", "p/d_r", "algo", "successes", "mean dB");
  for (const auto& r : sweep.rows) {
    std::printf("%4zu %9zu %8.2f %8s %7zu/%-2zu %10.2f\n", r.r, r.p, r.p_over_dr,
                std::string(to_string(r.algorithm)).c_str(), r.successes, r.trials, r.mean_snr);
  }
}

struct PhaseArgs {
  std::size_t n = 100;
  std::vector<std::size_t> p;
  std::vector<double> ratio;
  std::vector<std::size_t> r{1, 2, 3, 4, 5};
  std::vector<std::string> algo{"admira", "svt"};
  std::string kind = "sampling";
  std::string out = "phase.csv";
};

int run_phase_cmd(const PhaseArgs& a, const Settings& s, std::size_t trials) {
  std::vector<Algorithm> algorithms;
  for (const auto& name : a.algo) algorithms.push_back(parse_algorithm(name));
  const OperatorKind kind = parse_operator_kind(a.kind);
  const ExperimentOptions options = experiment_options(s, trials);
  Sweep<PhaseRow> all;
  if (!a.ratio.empty()) {
    for (const std::size_t r : a.r) {
      std::vector<std::size_t> grid;
      for (const double q : a.ratio) {
        grid.push_back(static_cast<std::size_t>(
            std::llround(q * static_cast<double>(degrees_of_freedom(a.n, a.n, r)))));
      }
      const std::size_t ranks[] = {r};
      auto part = run_phase(a.n, grid, ranks, algorithms, kind, options);
      all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
      all.trials.insert(all.trials.end(), part.trials.begin(), part.trials.end());
    }
  } else {
    if (a.p.empty()) throw InvalidArgument("phase: give --p or --ratio");
    all = run_phase(a.n, a.p, a.r, algorithms, kind, options);
  }
  write_csv(a.out, all);
  print_rows(all);
  return 0;
}

struct RipArgs {
  std::size_t m = 10;
  std::size_t n = 10;
  std::size_t p = 500;
  std::string kind = "gaussian";
  std::size_t rank = 2;
  std::size_t trials = 200;
  std::string out = "-";
};

int run_ripcheck(const RipArgs& a, const Settings& s) {
  std::unique_ptr<MeasurementOperator> op;
  if (a.kind == "gaussian") op = std::make_unique<GaussianOperator>(a.m, a.n, a.p, s.seed);
  else if (a.kind == "sampling")
    op = std::make_unique<SamplingOperator>(SamplingOperator::random(a.m, a.n, a.p, s.seed));
  else op = std::make_unique<IdentityOperator>(a.m, a.n);
  const PropositionReport report = check_proposition_inequalities(*op, a.rank, a.trials, s.seed);
  json estimates = json::array();
  for (const auto& e : report.estimates) {
    estimates.push_back({{"rank", e.rank}, {"delta_lower", e.delta_lower}, {"trials", e.trials}});
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"trial", c.trial},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"rhs_conservative", c.rhs_conservative},
                      {"status", c.consistent ? "consistent" : "inconsistent"}});
  }
  write_json(a.out, json{{"operator", a.kind},
                         {"m", a.m},
                         {"n", a.n},
                         {"p", op->measurements()},
                         {"seed", s.seed},
                         {"estimates", estimates},
                         {"inconsistent", report.inconsistent},
                         {"checks", checks}});
  std::cerr << report.checks.size() << " checks, " << report.inconsistent << " inconsistent\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  try {
    preload_config(argc, argv, s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Low-rank matrix recovery by greedy atomic decomposition"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random problem instance");
  add_common(gen_cmd, s);
  gen_cmd->add_option("--m", gen.m, "Rows")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Columns")->capture_default_str();
  gen_cmd->add_option("--rank", gen.rank, "Rank of X0")->capture_default_str();
  gen_cmd->add_option("--kind", gen.kind, "Operator")
      ->check(CLI::IsMember({"gaussian", "sampling"}))
      ->capture_default_str();
  auto* p_opt = gen_cmd->add_option("--p", gen.p, "Number of measurements");
  auto* d_opt = gen_cmd->add_option("--density", gen.density, "Measurements as a fraction of mn");
  p_opt->excludes(d_opt);
  gen_cmd->add_option("--snr", gen.snr, "Measurement SNR in dB (omit for noiseless)");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->capture_default_str();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Recover a matrix from problem files");
  add_common(solve_cmd, s);
  add_solver_flags(solve_cmd, s);
  add_svt_flags(solve_cmd, s);
  solve_cmd->add_option("--op", solve.op, "Operator file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--b", solve.b, "Measurement vector file")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--x0", solve.x0, "Ground truth matrix (adds the error trace)")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--algo", solve.algo, "Algorithm")
      ->check(CLI::IsMember({"admira", "svt"}))
      ->capture_default_str();
  solve_cmd->add_option("--rank", solve.rank, "Target rank")->capture_default_str();
  solve_cmd->add_option("--rank-search", solve.rank_search,
                        "Search ranks 1..R for the smallest with residual ratio <= eta");
  solve_cmd->add_option("--eta", solve.eta, "Rank-search residual target")->capture_default_str();
  solve_cmd->add_option("--search-mode", solve.search_mode, "Rank-search strategy")
      ->check(CLI::IsMember({"incremental", "bisection"}))
      ->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "Factored solution file")->capture_default_str();
  solve_cmd->add_option("--report", solve.report, "JSON report file ('-' for stdout)")
      ->capture_default_str();

  std::vector<std::size_t> t1_n{500, 1000};
  std::size_t t1_rank = 2;
  double t1_snr = 20.0;
  std::string t1_out = "table1.csv";
  auto* t1_cmd = app.add_subcommand("table1", "Completion accuracy versus matrix size");
  add_common(t1_cmd, s);
  add_solver_flags(t1_cmd, s);
  std::size_t t1_trials = 0;
  add_sweep_flags(t1_cmd, s, t1_trials, 20);
  t1_cmd->add_option("--n", t1_n, "Matrix sizes")->capture_default_str();
  t1_cmd->add_option("--rank", t1_rank, "Rank")->capture_default_str();
  t1_cmd->add_option("--noisy-snr", t1_snr, "Measurement SNR of the noisy runs (dB)")
      ->capture_default_str();
  t1_cmd->add_option("--out", t1_out, "CSV file (appended)")->capture_default_str();

  std::size_t t2_n = 1000;
  std::vector<std::size_t> t2_r{2, 5, 10};
  std::vector<double> t2_density{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::string t2_out = "table2.csv";
  auto* t2_cmd = app.add_subcommand("table2", "ADMiRA versus SVT, noiseless completion");
  add_common(t2_cmd, s);
  add_solver_flags(t2_cmd, s);
  add_svt_flags(t2_cmd, s);
  std::size_t t2_trials = 0;
  add_sweep_flags(t2_cmd, s, t2_trials, 20);
  t2_cmd->add_option("--n", t2_n, "Matrix size")->capture_default_str();
  t2_cmd->add_option("--r", t2_r, "Ranks")->capture_default_str();
  t2_cmd->add_option("--density", t2_density, "Sampling densities p / n^2")->capture_default_str();
  t2_cmd->add_option("--out", t2_out, "CSV file (appended)")->capture_default_str();

  PhaseArgs phase;
  auto* phase_cmd = app.add_subcommand("phase", "Success counts over a (p, r) grid");
  add_common(phase_cmd, s);
  add_solver_flags(phase_cmd, s);
  add_svt_flags(phase_cmd, s);
  std::size_t phase_trials = 0;
  add_sweep_flags(phase_cmd, s, phase_trials, 10);
  phase_cmd->add_option("--n", phase.n, "Matrix size")->capture_default_str();
  auto* pp = phase_cmd->add_option("--p", phase.p, "Measurement counts");
  auto* pr = phase_cmd->add_option("--ratio", phase.ratio, "Measurement counts as multiples of d_r");
  pp->excludes(pr);
  phase_cmd->add_option("--r", phase.r, "Ranks")->capture_default_str();
  phase_cmd->add_option("--algo", phase.algo, "Algorithms")
      ->check(CLI::IsMember({"admira", "svt"}))
      ->capture_default_str();
  phase_cmd->add_option("--kind", phase.kind, "Operator")
      ->check(CLI::IsMember({"gaussian", "sampling"}))
      ->capture_default_str();
  phase_cmd->add_option("--out", phase.out, "CSV file (appended)")->capture_default_str();

  RipArgs rip;
  auto* rip_cmd = app.add_subcommand("ripcheck", "Monte Carlo isometry-inequality checks");
  add_common(rip_cmd, s);
  rip_cmd->add_option("--m", rip.m, "Rows")->capture_default_str();
  rip_cmd->add_option("--n", rip.n, "Columns")->capture_default_str();
  rip_cmd->add_option("--p", rip.p, "Measurements")->capture_default_str();
  rip_cmd->add_option("--kind", rip.kind, "Operator")
      ->check(CLI::IsMember({"gaussian", "sampling", "identity"}))
      ->capture_default_str();
  rip_cmd->add_option("--rank", rip.rank, "Rank")->capture_default_str();
  rip_cmd->add_option("--trials", rip.trials, "Trials")->capture_default_str();
  rip_cmd->add_option("--out", rip.out, "JSON file ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    finalize(s);
    if (*gen_cmd) return run_gen(gen, s);
    if (*solve_cmd) return run_solve(solve, s);
    if (*t1_cmd) {
      const auto sweep = run_table1(t1_n, experiment_options(s, t1_trials), t1_rank, t1_snr);
      write_csv(t1_out, sweep);
      print_rows(sweep);
      return 0;
    }
    if (*t2_cmd) {
      const auto sweep = run_table2(t2_n, t2_r, t2_density, experiment_options(s, t2_trials));
      write_csv(t2_out, sweep);
      print_rows(sweep);
      return 0;
    }
    if (*phase_cmd) return run_phase_cmd(phase, s, phase_trials);
    if (*rip_cmd) return run_ripcheck(rip, s);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
