#pragma once

// Singular value thresholding baseline for noiseless matrix completion.

#include <cstddef>
#include <optional>
#include <span>

#include "admira/operators.hpp"
#include "admira/solver.hpp"

namespace admira {

struct SvtConfig {
  /// Threshold; defaults to 5 sqrt(m n).
  std::optional<double> tau;
  /// Step size; defaults to 1.2 m n / p.
  std::optional<double> step;
  double residual_tol = 1e-4;
  std::size_t max_iter = 500;
  /// Divergence is declared once |b - A X_k| exceeds this multiple of |b|.
  double divergence_factor = 1e3;
  /// Extra singular values requested each time the partial SVD still ends above tau.
  std::size_t rank_increment = 5;
  SvdOptions svd;

  double tau_for(std::size_t rows, std::size_t cols) const;
  double step_for(std::size_t rows, std::size_t cols, std::size_t measurements) const;
};

/// Y_0 = 0; X_k = D_tau(Y_{k-1}) (soft-thresholded singular values);
/// Y_k = Y_{k-1} + step A*(b - A X_k). Y stays supported on the sampled
/// entries, so every partial SVD runs on a sparse matrix.
///
/// `noise_bound` is the radius of an ellipsoidal data constraint; SVT only
/// handles the affine (noiseless) case and rejects any positive value.
SolverReport svt_solve(const SamplingOperator& op, std::span<const double> b,
                       const SvtConfig& config, const DenseMatrix* ground_truth = nullptr,
                       double noise_bound = 0.0);

/// D_tau: keeps sigma_k - tau for sigma_k > tau.
FactoredMatrix soft_threshold(const FactoredMatrix& x, double tau);

}  // namespace admira
