#pragma once

// Guarantee-side quantities: unrecoverable energy, atomic bands and profile,
// iteration bounds, SNR metrics and Monte Carlo consistency checks of the
// isometry inequalities.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "admira/linalg.hpp"
#include "admira/operators.hpp"

namespace admira {

/// epsilon = frob_tail + nuc_tail / sqrt(r) + noise.
struct ErrorBudget {
  double frob_tail = 0.0;
  double nuc_tail = 0.0;
  double noise = 0.0;
  double epsilon = 0.0;
};

ErrorBudget unrecoverable_energy(const DenseMatrix& x0, std::size_t r, double noise_norm);

/// Atoms grouped by octave of their normalized energy sigma_k^2 / |X|_F^2:
/// band j holds 2^-(j+1) < sigma_k^2 / |X|_F^2 <= 2^-j.
struct BandProfile {
  std::map<int, std::size_t> bands;
  /// Number of nonempty bands.
  std::size_t profile = 0;
  std::size_t rank = 0;
};

BandProfile profile(const DenseMatrix& x);
BandProfile profile(const FactoredMatrix& x);
BandProfile profile_from_singular_values(std::span<const double> sigmas);

/// t log_{4/3}(1 + 4.3 sqrt(r / t)) + 6, requires 1 <= t <= r.
double iteration_bound(std::size_t r, std::size_t t);

inline constexpr double kSnrCapDb = 300.0;

/// 20 log10(|X0|_F / |X0 - Xhat|_F), capped at kSnrCapDb.
double snr_recon(const DenseMatrix& x0, const FactoredMatrix& xhat);
double snr_recon(const DenseMatrix& x0, const DenseMatrix& xhat);
/// 20 log10(|b| / |nu|), capped at kSnrCapDb.
double snr_meas(std::span<const double> b, std::span<const double> noise);

double nuclear_norm(const DenseMatrix& x);

/// |P_Psi A* y|_F, the norm of the orthogonal projection of A* y onto the span
/// of the (not necessarily orthogonal) atoms.
double projected_adjoint_norm(const MeasurementOperator& op, std::span<const double> y,
                              const AtomSet& atoms);

/// One evaluated inequality. `rhs` uses the Monte Carlo delta estimate;
/// `rhs_conservative` uses delta = 1.
struct PropositionCheck {
  std::string name;
  std::size_t trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_conservative = 0.0;
  /// lhs <= rhs. A false value means the delta estimate is too low, not
  /// that the inequality fails.
  bool consistent = true;
};

struct PropositionReport {
  std::vector<RipEstimate> estimates;  // ranks 1..r, same seed
  std::vector<PropositionCheck> checks;
  std::size_t inconsistent = 0;
};

/// Evaluates, per trial, the projected-adjoint bound
///   |P_Psi A* b|_F <= sqrt(1 + delta_r) |b|            (|Psi| <= r)
/// and the nuclear-norm energy bound
///   |A X| <= sqrt(1 + delta_r) (|X|_F + |X|_* / sqrt(r))
/// for a full-rank and a rank-r X, plus monotonicity of the delta estimates
/// in r. Checks are evidence of consistency, never verification.
PropositionReport check_proposition_inequalities(const MeasurementOperator& op, std::size_t r,
                                                 std::size_t trials, std::uint64_t seed);

}  // namespace admira
