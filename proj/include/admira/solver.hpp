#pragma once

// ADMiRA: greedy atomic-decomposition recovery of a rank-r matrix from
// linear measurements b = A X0 + noise.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "admira/linalg.hpp"
#include "admira/operators.hpp"

namespace admira {

enum class LeastSquaresMethod { automatic, qr, cg, richardson };
enum class StopReason { tolerance, monotone_break, max_iter };

std::string_view to_string(LeastSquaresMethod method);
std::string_view to_string(StopReason reason);
LeastSquaresMethod parse_least_squares_method(std::string_view name);

struct LeastSquaresOptions {
  LeastSquaresMethod method = LeastSquaresMethod::automatic;
  /// Iterative methods stop when |G^T (b - G a)| <= tolerance * |G^T b|.
  double tolerance = 1e-12;
  /// 0 picks a per-method default.
  std::size_t max_iter = 0;
  /// Rank-revealing QR drops pivots below drop_tolerance * (largest pivot).
  double drop_tolerance = 1e-10;
  /// automatic uses QR when p * |atoms| is at most this many values.
  double qr_value_limit = 1e8;
};

/// argmin |b - A X|_2 over X in span(atoms); the minimum-norm coefficient
/// vector when the images A(u_k v_k^T) are linearly dependent. Returned as
/// (|alpha_k|, +-u_k, v_k) triplets, not orthonormal.
FactoredMatrix least_squares_on_span(const MeasurementOperator& op, std::span<const double> b,
                                     const AtomSet& atoms, const LeastSquaresOptions& options = {});

struct SolverConfig {
  std::size_t target_rank = 1;
  double residual_tol = 1e-4;
  std::size_t max_iter = 500;
  /// Caps the iteration count at 6 (r + 1), the bound that holds under the
  /// isometry assumption.
  bool cap_at_theoretical_bound = false;
  LeastSquaresOptions least_squares;
  SvdOptions svd;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolverReport {
  FactoredMatrix solution;
  std::size_t iterations = 0;
  /// |b - A X_k| / |b| after each accepted iteration.
  std::vector<double> residual_trace;
  /// |X0 - X_k|_F after each accepted iteration (empty without ground truth).
  std::vector<double> error_trace;
  StopReason stop_reason = StopReason::max_iter;
};

/// Starts from X = 0. Each iteration selects the 2r leading singular
/// triplets of the proxy A*(b - A X), merges them with the current r atoms,
/// fits by least squares on the merged span and truncates to rank r.
/// Stops when the residual ratio drops below residual_tol, when it strictly
/// increases (the previous iterate is returned), or at max_iter.
SolverReport admira_solve(const MeasurementOperator& op, std::span<const double> b,
                          const SolverConfig& config,
                          const DenseMatrix* ground_truth = nullptr);

enum class RankSearchMode { incremental, bisection };

struct RankSearchResult {
  bool feasible = false;
  /// Smallest feasible rank, or r_max when infeasible.
  std::size_t rank = 0;
  /// Residual ratio of `report.solution`.
  double residual_ratio = 1.0;
  SolverReport report;
  /// (rank, residual ratio) for every solve performed, in order.
  std::vector<std::pair<std::size_t, double>> probes;
};

/// Smallest r in [1, r_max] whose ADMiRA solution reaches
/// |b - A X| <= eta |b|. Bisection assumes the achieved residual is
/// nonincreasing in r.
RankSearchResult rank_search(const MeasurementOperator& op, std::span<const double> b,
                             std::size_t r_max, double eta, RankSearchMode mode,
                             const SolverConfig& config);

double residual_ratio(const MeasurementOperator& op, std::span<const double> b,
                      const FactoredMatrix& x);

}  // namespace admira
