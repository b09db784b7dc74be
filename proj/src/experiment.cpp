#include "admira/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "admira/analysis.hpp"
#include "admira/error.hpp"
#include "admira/parallel.hpp"
#include "admira/random.hpp"

namespace admira {
namespace {

// Substreams of a trial seed.
constexpr std::uint64_t kFactorStream = 1;
constexpr std::uint64_t kOperatorStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kSolverStream = 4;

double norm2(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::string format_fixed(double x, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, x);
  return buffer;
}

TrialRecord solve_trial(const ProblemSpec& spec, std::uint64_t hash, std::size_t trial,
                        Algorithm algorithm, const ExperimentOptions& options) {
  TrialRecord record;
  record.spec_hash = hash;
  record.trial = trial;
  record.algorithm = algorithm;

  ProblemSpec instance = spec;
  instance.seed = mix_seed(spec.seed, trial);
  const auto start = std::chrono::steady_clock::now();
  try {
    const Problem problem = generate_problem(instance);
    double noise_ratio = 0.0;
    if (options.stop_at_noise_level && instance.snr_meas_db) {
      noise_ratio = norm2(problem.noise) / norm2(problem.b);
    }
    SolverReport report = [&] {
      if (algorithm == Algorithm::svt) {
        const auto* sampling = dynamic_cast<const SamplingOperator*>(problem.op.get());
        if (sampling == nullptr) throw InvalidArgument("svt requires a sampling operator");
        SvtConfig config = options.svt;
        config.residual_tol = std::max(config.residual_tol, noise_ratio);
        return svt_solve(*sampling, problem.b, config);
      }
      SolverConfig config = options.admira;
      config.residual_tol = std::max(config.residual_tol, noise_ratio);
      config.target_rank = spec.r_true;
      config.seed = mix_seed(instance.seed, kSolverStream);
      return admira_solve(*problem.op, problem.b, config);
    }();
    record.snr_recon_db = snr_recon(problem.x0, report.solution);
    record.iterations = report.iterations;
    record.stop_reason = std::string(to_string(report.stop_reason));
  } catch (const DivergenceError& e) {
    record.snr_recon_db = 0.0;
    record.iterations = e.iteration();
    record.stop_reason = "diverged";
  } catch (const Error&) {
    record.snr_recon_db = 0.0;
    record.stop_reason = "error";
  }
  record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

struct Summary {
  double mean_snr = 0.0;
  double mean_iterations = 0.0;
  std::size_t successes = 0;
};

Summary summarize(std::span<const TrialRecord> records, Algorithm algorithm) {
  Summary s;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.algorithm != algorithm) continue;
    ++count;
    s.mean_snr += r.snr_recon_db;
    s.mean_iterations += static_cast<double>(r.iterations);
    if (r.success()) ++s.successes;
  }
  if (count > 0) {
    s.mean_snr /= static_cast<double>(count);
    s.mean_iterations /= static_cast<double>(count);
  }
  return s;
}

ProblemSpec square_sampling(std::size_t n, std::size_t r, std::size_t p, std::uint64_t seed) {
  ProblemSpec spec;
  spec.m = n;
  spec.n = n;
  spec.r_true = r;
  spec.kind = OperatorKind::sampling;
  spec.p = p;
  spec.seed = seed;
  return spec;
}

void append(std::vector<TrialRecord>& into, std::vector<TrialRecord> from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()),
              std::make_move_iterator(from.end()));
}

std::ofstream open_append(const std::filesystem::path& path, std::string_view header) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for appending");
  if (fresh) out << header << '\n';
  return out;
}

void write_trials(const std::filesystem::path& path, std::span<const TrialRecord> trials) {
  auto out = open_append(sidecar_path(path, "trials"),
                         "spec_hash,trial,algorithm,snr_recon_db,iterations,stop_reason,success");
  for (const auto& t : trials) {
    out << format_hash(t.spec_hash) << ',' << t.trial << ',' << to_string(t.algorithm) << ','
        << format_double(t.snr_recon_db) << ',' << t.iterations << ',' << t.stop_reason << ','
        << (t.success() ? 1 : 0) << '\n';
  }
  auto timing = open_append(sidecar_path(path, "timing"), "spec_hash,trial,algorithm,wall_time_s");
  for (const auto& t : trials) {
    timing << format_hash(t.spec_hash) << ',' << t.trial << ',' << to_string(t.algorithm) << ','
           << format_fixed(t.wall_time, 6) << '\n';
  }
}

}  // namespace

std::string_view to_string(OperatorKind kind) {
  return kind == OperatorKind::gaussian ? "gaussian" : "sampling";
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::admira ? "admira" : "svt";
}

OperatorKind parse_operator_kind(std::string_view name) {
  if (name == "gaussian") return OperatorKind::gaussian;
  if (name == "sampling") return OperatorKind::sampling;
  throw InvalidArgument("unknown operator kind '" + std::string(name) + "'");
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "admira") return Algorithm::admira;
  if (name == "svt") return Algorithm::svt;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

void ProblemSpec::validate() const {
  if (m == 0 || n == 0) throw InvalidArgument("problem: m and n must be positive");
  if (r_true == 0 || r_true > std::min(m, n)) {
    throw InvalidArgument("problem: r_true must lie in [1, min(m, n)]");
  }
  if (p == 0) throw InvalidArgument("problem: p must be positive");
  if (kind == OperatorKind::sampling && p > m * n) {
    throw InvalidArgument("problem: p exceeds m n for a sampling operator");
  }
  if (snr_meas_db && !std::isfinite(*snr_meas_db)) {
    throw InvalidArgument("problem: snr_meas_db must be finite");
  }
}

std::uint64_t spec_hash(const ProblemSpec& spec) {
  std::ostringstream text;
  text << spec.m << '|' << spec.n << '|' << spec.r_true << '|' << to_string(spec.kind) << '|'
       << spec.p << '|' << (spec.snr_meas_db ? format_double(*spec.snr_meas_db) : "none") << '|'
       << spec.seed;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string format_hash(std::uint64_t hash) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

Problem generate_problem(const ProblemSpec& spec) {
  spec.validate();
  Rng factors(mix_seed(spec.seed, kFactorStream));
  Eigen::MatrixXd left(spec.m, spec.r_true);
  Eigen::MatrixXd right(spec.n, spec.r_true);
  for (Eigen::Index j = 0; j < left.cols(); ++j)
    for (Eigen::Index i = 0; i < left.rows(); ++i) left(i, j) = factors.normal();
  for (Eigen::Index j = 0; j < right.cols(); ++j)
    for (Eigen::Index i = 0; i < right.rows(); ++i) right(i, j) = factors.normal();
  DenseMatrix x0(spec.m, spec.n);
  x0.eigen() = left * right.transpose();

  const std::uint64_t op_seed = mix_seed(spec.seed, kOperatorStream);
  std::unique_ptr<MeasurementOperator> op;
  if (spec.kind == OperatorKind::gaussian) {
    op = std::make_unique<GaussianOperator>(spec.m, spec.n, spec.p, op_seed);
  } else {
    op = std::make_unique<SamplingOperator>(SamplingOperator::random(spec.m, spec.n, spec.p, op_seed));
  }

  std::vector<double> b_clean = op->apply(x0);
  std::vector<double> noise(b_clean.size(), 0.0);
  if (spec.snr_meas_db) {
    Rng noise_rng(mix_seed(spec.seed, kNoiseStream));
    noise = noise_rng.normal_vector(b_clean.size());
    const double scale =
        norm2(b_clean) * std::pow(10.0, -*spec.snr_meas_db / 20.0) / norm2(noise);
    for (double& x : noise) x *= scale;
  }
  std::vector<double> b(b_clean.size());
  for (std::size_t s = 0; s < b.size(); ++s) b[s] = b_clean[s] + noise[s];
  return Problem{std::move(op), std::move(b), std::move(b_clean), std::move(noise), std::move(x0)};
}

std::size_t table1_measurements(std::size_t n, std::size_t r) {
  const double nd = static_cast<double>(n);
  return 10 * static_cast<std::size_t>(
                  std::ceil(std::pow(nd, 1.2) * static_cast<double>(r) * std::log10(nd)));
}

std::size_t degrees_of_freedom(std::size_t m, std::size_t n, std::size_t r) {
  return r * (m + n - r);
}

std::vector<TrialRecord> run_trials(const ProblemSpec& spec, std::span<const Algorithm> algorithms,
                                    const ExperimentOptions& options) {
  spec.validate();
  const std::uint64_t hash = spec_hash(spec);
  const std::size_t per_trial = algorithms.size();
  std::vector<TrialRecord> records(options.trials * per_trial);
  parallel_for(records.size(), options.threads, [&](std::size_t k) {
    records[k] = solve_trial(spec, hash, k / per_trial, algorithms[k % per_trial], options);
  });
  return records;
}

Sweep<Table1Row> run_table1(std::span<const std::size_t> n_list, const ExperimentOptions& options,
                            std::size_t r, double noisy_snr_db) {
  Sweep<Table1Row> sweep;
  const Algorithm algorithms[] = {Algorithm::admira};
  for (const std::size_t n : n_list) {
    const std::size_t p = std::min(table1_measurements(n, r), n * n);
    ProblemSpec clean = square_sampling(n, r, p, options.seed);
    ProblemSpec noisy = clean;
    noisy.snr_meas_db = noisy_snr_db;
    auto clean_trials = run_trials(clean, algorithms, options);
    auto noisy_trials = run_trials(noisy, algorithms, options);
    const Summary c = summarize(clean_trials, Algorithm::admira);
    const Summary z = summarize(noisy_trials, Algorithm::admira);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    sweep.rows.push_back({spec_hash(clean), n, p, static_cast<double>(p) / nn,
                          static_cast<double>(p) / static_cast<double>(degrees_of_freedom(n, n, r)),
                          c.mean_snr, c.mean_iterations, z.mean_snr, z.mean_iterations});
    append(sweep.trials, std::move(clean_trials));
    append(sweep.trials, std::move(noisy_trials));
  }
  return sweep;
}

Sweep<Table2Row> run_table2(std::size_t n, std::span<const std::size_t> r_list,
                            std::span<const double> density_list,
                            const ExperimentOptions& options) {
  Sweep<Table2Row> sweep;
  const Algorithm algorithms[] = {Algorithm::admira, Algorithm::svt};
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  for (const std::size_t r : r_list) {
    for (const double density : density_list) {
      if (!(density > 0.0 && density <= 1.0)) {
        throw InvalidArgument("table2: densities must lie in (0, 1]");
      }
      const auto p = static_cast<std::size_t>(std::llround(density * nn));
      const ProblemSpec spec = square_sampling(n, r, p, options.seed);
      auto trials = run_trials(spec, algorithms, options);
      const Summary a = summarize(trials, Algorithm::admira);
      const Summary s = summarize(trials, Algorithm::svt);
      const double per_dof =
          static_cast<double>(p) / static_cast<double>(degrees_of_freedom(n, n, r));
      sweep.rows.push_back({spec_hash(spec), r, density, p, per_dof, a.mean_snr, a.mean_iterations,
                            a.successes, s.mean_snr, s.mean_iterations, s.successes});
      append(sweep.trials, std::move(trials));
    }
  }
  return sweep;
}

Sweep<PhaseRow> run_phase(std::size_t n, std::span<const std::size_t> p_grid,
                          std::span<const std::size_t> r_grid,
                          std::span<const Algorithm> algorithms, OperatorKind kind,
                          const ExperimentOptions& options) {
  Sweep<PhaseRow> sweep;
  for (const std::size_t r : r_grid) {
    for (const std::size_t p : p_grid) {
      if (kind == OperatorKind::sampling && p > n * n) continue;
      ProblemSpec spec = square_sampling(n, r, p, options.seed);
      spec.kind = kind;
      auto trials = run_trials(spec, algorithms, options);
      for (const Algorithm algorithm : algorithms) {
        const Summary s = summarize(trials, algorithm);
        sweep.rows.push_back(
            {spec_hash(spec), n, r, p,
             static_cast<double>(p) / static_cast<double>(degrees_of_freedom(n, n, r)), algorithm,
             s.successes, options.trials, s.mean_snr, s.mean_iterations});
      }
      append(sweep.trials, std::move(trials));
    }
  }
  return sweep;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path, std::string_view tag) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + "." + std::string(tag) + path.extension().string());
  return out;
}

void write_csv(const std::filesystem::path& path, const Sweep<Table1Row>& sweep) {
  auto out = open_append(path,
                         "spec_hash,n,p,p_over_n2,p_over_dr,snr_noiseless_db,iters_noiseless,"
                         "snr_20db_db,iters_20db");
  for (const auto& r : sweep.rows) {
    out << format_hash(r.spec_hash) << ',' << r.n << ',' << r.p << ','
        << format_double(r.p_over_n2) << ',' << format_double(r.p_over_dr) << ','
        << format_double(r.snr_noiseless) << ',' << format_double(r.iterations_noiseless) << ','
        << format_double(r.snr_noisy) << ',' << format_double(r.iterations_noisy) << '\n';
  }
  write_trials(path, sweep.trials);
}

void write_csv(const std::filesystem::path& path, const Sweep<Table2Row>& sweep) {
  auto out = open_append(path,
                         "spec_hash,r,p_over_n2,p,p_over_dr,admira_snr_db,admira_iters,"
                         "admira_successes,svt_snr_db,svt_iters,svt_successes");
  for (const auto& r : sweep.rows) {
    out << format_hash(r.spec_hash) << ',' << r.r << ',' << format_double(r.p_over_n2) << ','
        << r.p << ',' << format_double(r.p_over_dr) << ',' << format_double(r.admira_snr) << ','
        << format_double(r.admira_iterations) << ',' << r.admira_successes << ','
        << format_double(r.svt_snr) << ',' << format_double(r.svt_iterations) << ','
        << r.svt_successes << '\n';
  }
  write_trials(path, sweep.trials);
}

void write_csv(const std::filesystem::path& path, const Sweep<PhaseRow>& sweep) {
  auto out = open_append(
      path, "spec_hash,n,r,p,p_over_dr,algorithm,successes,trials,mean_snr_db,mean_iters");
  for (const auto& r : sweep.rows) {
    out << format_hash(r.spec_hash) << ',' << r.n << ',' << r.r << ',' << r.p << ','
        << format_double(r.p_over_dr) << ',' << to_string(r.algorithm) << ',' << r.successes
        << ',' << r.trials << ',' << format_double(r.mean_snr) << ','
        << format_double(r.mean_iterations) << '\n';
  }
  write_trials(path, sweep.trials);
}

}  // namespace admira
