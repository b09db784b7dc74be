#include <algorithm>
#include <cmath>
#include <string>

#include "admira/error.hpp"
#include "admira/kernels.hpp"
#include "admira/random.hpp"
#include "admira/solver.hpp"

namespace admira {
namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
}

std::vector<double> residual_of(const MeasurementOperator& op, std::span<const double> b,
                                const FactoredMatrix& x) {
  std::vector<double> r(b.begin(), b.end());
  if (x.rank() == 0) return r;
  const std::vector<double> ax = op.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
  return r;
}

}  // namespace

std::string_view to_string(LeastSquaresMethod method) {
  switch (method) {
    case LeastSquaresMethod::automatic: return "auto";
    case LeastSquaresMethod::qr: return "qr";
    case LeastSquaresMethod::cg: return "cg";
    case LeastSquaresMethod::richardson: return "richardson";
  }
  return "?";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::tolerance: return "tol";
    case StopReason::monotone_break: return "monotone_break";
    case StopReason::max_iter: return "max_iter";
  }
  return "?";
}

LeastSquaresMethod parse_least_squares_method(std::string_view name) {
  if (name == "auto") return LeastSquaresMethod::automatic;
  if (name == "qr") return LeastSquaresMethod::qr;
  if (name == "cg") return LeastSquaresMethod::cg;
  if (name == "richardson") return LeastSquaresMethod::richardson;
  throw InvalidArgument("unknown least-squares method '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (target_rank == 0) throw InvalidArgument("SolverConfig: target rank must be >= 1");
  if (!(residual_tol > 0.0)) throw InvalidArgument("SolverConfig: residual_tol must be positive");
  if (!(least_squares.tolerance > 0.0)) {
    throw InvalidArgument("SolverConfig: ls_tol must be positive");
  }
  if (!(svd.tolerance > 0.0)) throw InvalidArgument("SolverConfig: svd tolerance must be positive");
}

double residual_ratio(const MeasurementOperator& op, std::span<const double> b,
                      const FactoredMatrix& x) {
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return 0.0;
  return norm2(residual_of(op, b, x)) / bnorm;
}

SolverReport admira_solve(const MeasurementOperator& op, std::span<const double> b,
                          const SolverConfig& config, const DenseMatrix* ground_truth) {
  config.validate();
  if (b.size() != op.measurements()) {
    throw DimensionError("admira_solve: b has " + std::to_string(b.size()) +
                         " entries, operator has " + std::to_string(op.measurements()));
  }
  if (ground_truth != nullptr &&
      (ground_truth->rows() != op.rows() || ground_truth->cols() != op.cols())) {
    throw DimensionError("admira_solve: ground truth dimensions");
  }
  for (double x : b) {
    if (!std::isfinite(x)) throw InvalidArgument("admira_solve: b must be finite");
  }

  const std::size_t r = config.target_rank;
  SolverReport report{FactoredMatrix(op.rows(), op.cols()), 0, {}, {}, StopReason::max_iter};
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    report.stop_reason = StopReason::tolerance;
    return report;
  }

  std::size_t max_iter = config.max_iter;
  if (config.cap_at_theoretical_bound) max_iter = std::min(max_iter, 6 * (r + 1));

  std::vector<double> residual(b.begin(), b.end());
  double previous_ratio = 1.0;

  for (std::size_t it = 0; it < max_iter; ++it) {
    // Proxy A*(b - A X) stays matrix-free; only its leading 2r triplets are formed.
    const auto proxy = op.adjoint(residual);
    SvdOptions svd = config.svd;
    svd.seed = mix_seed(config.seed ^ svd.seed, it);
    const FactoredMatrix selected = truncated_svd(*proxy, 2 * r, svd);

    const AtomSet merged = AtomSet::merge(selected.atoms(), report.solution.atoms());
    const FactoredMatrix fitted = least_squares_on_span(op, b, merged, config.least_squares);
    FactoredMatrix candidate = best_rank_r(svd_of_factored(fitted), r);

    std::vector<double> candidate_residual = residual_of(op, b, candidate);
    const double ratio = norm2(candidate_residual) / bnorm;
    if (ratio > previous_ratio) {
      report.stop_reason = StopReason::monotone_break;
      return report;
    }

    report.solution = std::move(candidate);
    residual = std::move(candidate_residual);
    previous_ratio = ratio;
    ++report.iterations;
    report.residual_trace.push_back(ratio);
    if (ground_truth != nullptr) {
      report.error_trace.push_back(frobenius_distance(*ground_truth, report.solution));
    }
    if (ratio < config.residual_tol) {
      report.stop_reason = StopReason::tolerance;
      return report;
    }
  }
  report.stop_reason = StopReason::max_iter;
  return report;
}

}  // namespace admira
