#include "admira/svt.hpp"

#include <cmath>
#include <string>

#include "admira/error.hpp"
#include "admira/kernels.hpp"

namespace admira {
namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
}

}  // namespace

double SvtConfig::tau_for(std::size_t rows, std::size_t cols) const {
  return tau.value_or(5.0 * std::sqrt(static_cast<double>(rows) * static_cast<double>(cols)));
}

double SvtConfig::step_for(std::size_t rows, std::size_t cols, std::size_t measurements) const {
  return step.value_or(1.2 * static_cast<double>(rows) * static_cast<double>(cols) /
                       static_cast<double>(measurements));
}

FactoredMatrix soft_threshold(const FactoredMatrix& x, double tau) {
  if (!x.is_orthonormal()) throw InvalidArgument("soft_threshold: input must be an SVD");
  AtomSet atoms(x.rows(), x.cols());
  std::vector<double> sigmas;
  for (std::size_t k = 0; k < x.rank() && x.sigma(k) > tau; ++k) {
    atoms.push_back(x.u(k), x.v(k));
    sigmas.push_back(x.sigma(k) - tau);
  }
  return FactoredMatrix(std::move(atoms), std::move(sigmas), true);
}

SolverReport svt_solve(const SamplingOperator& op, std::span<const double> b,
                       const SvtConfig& config, const DenseMatrix* ground_truth,
                       double noise_bound) {
  if (noise_bound > 0.0) {
    throw InvalidArgument(
        "svt_solve: only the noiseless (affine constraint) case is supported");
  }
  if (b.size() != op.measurements()) throw DimensionError("svt_solve: |b| != p");
  const double tau = config.tau_for(op.rows(), op.cols());
  const double step = config.step_for(op.rows(), op.cols(), op.measurements());
  if (!(tau > 0.0) || !(step > 0.0)) throw InvalidArgument("svt_solve: tau and step must be > 0");
  if (config.rank_increment == 0) throw InvalidArgument("svt_solve: rank_increment must be > 0");

  SolverReport report{FactoredMatrix(op.rows(), op.cols()), 0, {}, {}, StopReason::max_iter};
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    report.stop_reason = StopReason::tolerance;
    return report;
  }

  const std::size_t full_rank = std::min(op.rows(), op.cols());
  std::vector<double> y(op.measurements(), 0.0);
  bool y_is_zero = true;
  std::size_t previous_rank = 0;

  for (std::size_t it = 0; it < config.max_iter; ++it) {
    FactoredMatrix x(op.rows(), op.cols());
    if (!y_is_zero) {
      const auto map = op.adjoint(y);
      std::size_t request = std::min(previous_rank + 1, full_rank);
      for (;;) {
        FactoredMatrix partial = truncated_svd(*map, request, config.svd);
        const bool exhausted = partial.rank() < request || request == full_rank;
        if (exhausted || partial.sigma(request - 1) <= tau) {
          x = soft_threshold(partial, tau);
          break;
        }
        request = std::min(request + config.rank_increment, full_rank);
      }
    }
    previous_rank = x.rank();

    const std::vector<double> ax = op.apply(x);
    std::vector<double> residual(b.begin(), b.end());
    for (std::size_t s = 0; s < residual.size(); ++s) residual[s] -= ax[s];
    const double rnorm = norm2(residual);
    const double ratio = rnorm / bnorm;

    report.solution = std::move(x);
    ++report.iterations;
    report.residual_trace.push_back(ratio);
    if (ground_truth != nullptr) {
      report.error_trace.push_back(frobenius_distance(*ground_truth, report.solution));
    }
    if (ratio < config.residual_tol) {
      report.stop_reason = StopReason::tolerance;
      return report;
    }
    if (rnorm > config.divergence_factor * bnorm) {
      throw DivergenceError("svt_solve: residual grew to " + std::to_string(ratio) +
                                " times |b| at iteration " + std::to_string(it + 1),
                            it + 1);
    }
    kernels::axpy(step, residual.data(), y.data(), y.size());
    y_is_zero = false;
  }
  report.stop_reason = StopReason::max_iter;
  return report;
}

}  // namespace admira
