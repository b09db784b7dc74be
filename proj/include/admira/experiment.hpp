#pragma once

// Seeded problem generation and trial sweeps with CSV output.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "admira/linalg.hpp"
#include "admira/operators.hpp"
#include "admira/solver.hpp"
#include "admira/svt.hpp"

namespace admira {

enum class OperatorKind { gaussian, sampling };
enum class Algorithm { admira, svt };

std::string_view to_string(OperatorKind kind);
std::string_view to_string(Algorithm algorithm);
OperatorKind parse_operator_kind(std::string_view name);
Algorithm parse_algorithm(std::string_view name);

/// Reconstructions at or above this SNR count as successful.
inline constexpr double kSuccessDb = 70.0;

struct ProblemSpec {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t r_true = 0;
  OperatorKind kind = OperatorKind::sampling;
  std::size_t p = 0;
  /// Absent means noiseless.
  std::optional<double> snr_meas_db;
  std::uint64_t seed = 0;

  void validate() const;
};

/// FNV-1a over a canonical text rendering of every field.
std::uint64_t spec_hash(const ProblemSpec& spec);
std::string format_hash(std::uint64_t hash);

struct Problem {
  std::unique_ptr<MeasurementOperator> op;
  std::vector<double> b;
  std::vector<double> b_clean;
  std::vector<double> noise;
  DenseMatrix x0;
};

/// X0 = Y_L Y_R^T with i.i.d. N(0, 1) factors. The noise is a Gaussian
/// direction scaled so that |b_clean| / |noise| matches snr_meas_db exactly.
Problem generate_problem(const ProblemSpec& spec);

/// p = 10 ceil(n^1.2 r log10 n).
std::size_t table1_measurements(std::size_t n, std::size_t r);
/// r (m + n - r).
std::size_t degrees_of_freedom(std::size_t m, std::size_t n, std::size_t r);

struct TrialRecord {
  std::uint64_t spec_hash = 0;
  std::size_t trial = 0;
  Algorithm algorithm = Algorithm::admira;
  double snr_recon_db = 0.0;
  std::size_t iterations = 0;
  /// tol, monotone_break, max_iter, diverged or error.
  std::string stop_reason;
  double wall_time = 0.0;

  bool success() const { return snr_recon_db >= kSuccessDb; }
};

struct ExperimentOptions {
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  /// target_rank is overwritten with the true rank of each problem.
  SolverConfig admira;
  SvtConfig svt;
  /// On noisy problems, also stop once |b - A X| <= |noise| (the constraint
  /// radius of the noisy formulation) instead of only at the fixed tolerance.
  bool stop_at_noise_level = true;
};

/// Trial t solves generate_problem(spec with seed mix_seed(spec.seed, t)).
/// Solver failures are recorded in the row, never thrown. Results are in
/// trial order and do not depend on `threads`.
std::vector<TrialRecord> run_trials(const ProblemSpec& spec, std::span<const Algorithm> algorithms,
                                    const ExperimentOptions& options);

struct Table1Row {
  std::uint64_t spec_hash = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  double p_over_n2 = 0.0;
  double p_over_dr = 0.0;
  double snr_noiseless = 0.0;
  double iterations_noiseless = 0.0;
  double snr_noisy = 0.0;
  double iterations_noisy = 0.0;
};

struct Table2Row {
  std::uint64_t spec_hash = 0;
  std::size_t r = 0;
  double p_over_n2 = 0.0;
  std::size_t p = 0;
  double p_over_dr = 0.0;
  double admira_snr = 0.0;
  double admira_iterations = 0.0;
  std::size_t admira_successes = 0;
  double svt_snr = 0.0;
  double svt_iterations = 0.0;
  std::size_t svt_successes = 0;
};

struct PhaseRow {
  std::uint64_t spec_hash = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t p = 0;
  double p_over_dr = 0.0;
  Algorithm algorithm = Algorithm::admira;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double mean_snr = 0.0;
  double mean_iterations = 0.0;
};

template <typename Row>
struct Sweep {
  std::vector<Row> rows;
  std::vector<TrialRecord> trials;
};

/// Square n x n sampling problems with r = 2 (or `r`), noiseless and at
/// `noisy_snr_db`.
Sweep<Table1Row> run_table1(std::span<const std::size_t> n_list, const ExperimentOptions& options,
                            std::size_t r = 2, double noisy_snr_db = 20.0);

/// Noiseless n x n sampling problems, p = round(density n^2).
Sweep<Table2Row> run_table2(std::size_t n, std::span<const std::size_t> r_list,
                            std::span<const double> density_list,
                            const ExperimentOptions& options);

/// Success counts per (p, r) cell. Cells with p > n^2 (sampling) are skipped.
Sweep<PhaseRow> run_phase(std::size_t n, std::span<const std::size_t> p_grid,
                          std::span<const std::size_t> r_grid,
                          std::span<const Algorithm> algorithms, OperatorKind kind,
                          const ExperimentOptions& options);

/// Appends rows to `path`, writing the header only when the file is new or
/// empty. The trial sidecar `<stem>.trials.csv` holds per-trial rows and
/// `<stem>.timing.csv` their wall times, so the main and trial files stay
/// reproducible.
void write_csv(const std::filesystem::path& path, const Sweep<Table1Row>& sweep);
void write_csv(const std::filesystem::path& path, const Sweep<Table2Row>& sweep);
void write_csv(const std::filesystem::path& path, const Sweep<PhaseRow>& sweep);

std::filesystem::path sidecar_path(const std::filesystem::path& path, std::string_view tag);

}  // namespace admira
