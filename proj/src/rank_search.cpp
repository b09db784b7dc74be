#include <string>

#include "admira/error.hpp"
#include "admira/solver.hpp"

namespace admira {

RankSearchResult rank_search(const MeasurementOperator& op, std::span<const double> b,
                             std::size_t r_max, double eta, RankSearchMode mode,
                             const SolverConfig& config) {
  if (r_max == 0) throw InvalidArgument("rank_search: r_max must be >= 1");
  if (!(eta >= 0.0)) throw InvalidArgument("rank_search: eta must be nonnegative");

  std::vector<std::pair<std::size_t, double>> probes;
  auto solve_at = [&](std::size_t rank) {
    SolverConfig cfg = config;
    cfg.target_rank = rank;
    SolverReport report = admira_solve(op, b, cfg);
    const double ratio = residual_ratio(op, b, report.solution);
    probes.emplace_back(rank, ratio);
    return std::pair{std::move(report), ratio};
  };

  if (mode == RankSearchMode::incremental) {
    for (std::size_t rank = 1; rank <= r_max; ++rank) {
      auto [report, ratio] = solve_at(rank);
      if (ratio <= eta || rank == r_max) {
        return RankSearchResult{ratio <= eta, rank, ratio, std::move(report), std::move(probes)};
      }
    }
  }

  // Bisection on the smallest feasible rank in [lo, hi], hi known feasible.
  auto [best_report, best_ratio] = solve_at(r_max);
  if (best_ratio > eta) {
    return RankSearchResult{false, r_max, best_ratio, std::move(best_report), std::move(probes)};
  }
  std::size_t lo = 1;
  std::size_t hi = r_max;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    auto [report, ratio] = solve_at(mid);
    if (ratio <= eta) {
      hi = mid;
      best_report = std::move(report);
      best_ratio = ratio;
    } else {
      lo = mid + 1;
    }
  }
  return RankSearchResult{true, hi, best_ratio, std::move(best_report), std::move(probes)};
}

}  // namespace admira
