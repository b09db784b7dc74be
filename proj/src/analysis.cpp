#include "admira/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "admira/error.hpp"
#include "admira/random.hpp"

namespace admira {
namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

double capped_db(double signal, double error) {
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 20.0 * std::log10(signal / error));
}

AtomSet random_atoms(std::size_t rows, std::size_t cols, std::size_t count, Rng& rng) {
  AtomSet atoms(rows, cols);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> u = rng.normal_vector(rows);
    std::vector<double> v = rng.normal_vector(cols);
    const double nu = norm2(u);
    const double nv = norm2(v);
    for (double& x : u) x /= nu;
    for (double& x : v) x /= nv;
    atoms.push_back(u, v);
  }
  return atoms;
}

}  // namespace

ErrorBudget unrecoverable_energy(const DenseMatrix& x0, std::size_t r, double noise_norm) {
  if (r == 0) throw InvalidArgument("unrecoverable_energy: r must be >= 1");
  if (noise_norm < 0.0) throw InvalidArgument("unrecoverable_energy: noise norm is negative");
  const FactoredMatrix svd = full_svd(x0);
  ErrorBudget budget;
  double tail_sq = 0.0;
  const double floor = svd.rank() > 0 ? kRankTolerance * svd.sigma(0) : 0.0;
  for (std::size_t k = r; k < svd.rank() && svd.sigma(k) > floor; ++k) {
    tail_sq += svd.sigma(k) * svd.sigma(k);
    budget.nuc_tail += svd.sigma(k);
  }
  budget.frob_tail = std::sqrt(tail_sq);
  budget.noise = noise_norm;
  budget.epsilon =
      budget.frob_tail + budget.nuc_tail / std::sqrt(static_cast<double>(r)) + budget.noise;
  return budget;
}

BandProfile profile_from_singular_values(std::span<const double> sigmas) {
  double total = 0.0;
  for (double s : sigmas) total += s * s;
  if (total == 0.0) throw InvalidArgument("profile: undefined for the zero matrix");
  const double largest = *std::max_element(sigmas.begin(), sigmas.end());
  BandProfile out;
  for (double s : sigmas) {
    if (s <= kRankTolerance * largest) continue;
    const double energy = std::min(1.0, s * s / total);
    int j = static_cast<int>(std::floor(-std::log2(energy)));
    while (j > 0 && energy > std::ldexp(1.0, -j)) --j;
    while (energy <= std::ldexp(1.0, -(j + 1))) ++j;
    ++out.bands[j];
    ++out.rank;
  }
  out.profile = out.bands.size();
  return out;
}

BandProfile profile(const DenseMatrix& x) {
  const FactoredMatrix svd = full_svd(x);
  return profile_from_singular_values(svd.sigmas());
}

BandProfile profile(const FactoredMatrix& x) {
  if (!x.is_orthonormal()) return profile(svd_of_factored(x));
  if (x.rank() == 0) throw InvalidArgument("profile: undefined for the zero matrix");
  return profile_from_singular_values(x.sigmas());
}

double iteration_bound(std::size_t r, std::size_t t) {
  if (t == 0 || t > r) throw InvalidArgument("iteration_bound: requires 1 <= t <= r");
  const double rt = static_cast<double>(r) / static_cast<double>(t);
  return static_cast<double>(t) * std::log(1.0 + 4.3 * std::sqrt(rt)) / std::log(4.0 / 3.0) + 6.0;
}

double snr_recon(const DenseMatrix& x0, const FactoredMatrix& xhat) {
  if (xhat.rank() == 0) return snr_recon(x0, DenseMatrix(x0.rows(), x0.cols()));
  const double signal = x0.frobenius_norm();
  if (signal == 0.0) throw InvalidArgument("snr_recon: ground truth is zero");
  return capped_db(signal, frobenius_distance(x0, xhat));
}

double snr_recon(const DenseMatrix& x0, const DenseMatrix& xhat) {
  if (x0.rows() != xhat.rows() || x0.cols() != xhat.cols()) throw DimensionError("snr_recon");
  double signal = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const double d = x0.values()[i] - xhat.values()[i];
    signal += x0.values()[i] * x0.values()[i];
    err += d * d;
  }
  if (signal == 0.0) throw InvalidArgument("snr_recon: ground truth is zero");
  return capped_db(std::sqrt(signal), std::sqrt(err));
}

double snr_meas(std::span<const double> b, std::span<const double> noise) {
  const double signal = norm2(b);
  if (signal == 0.0) throw InvalidArgument("snr_meas: measurement vector is zero");
  return capped_db(signal, norm2(noise));
}

double nuclear_norm(const DenseMatrix& x) {
  const FactoredMatrix svd = full_svd(x);
  return std::accumulate(svd.sigmas().begin(), svd.sigmas().end(), 0.0);
}

double projected_adjoint_norm(const MeasurementOperator& op, std::span<const double> y,
                              const AtomSet& atoms) {
  if (atoms.empty()) return 0.0;
  const std::vector<double> c = op.adjoint_on_atoms(y, atoms);
  const Eigen::MatrixXd u = atoms.left_matrix();
  const Eigen::MatrixXd v = atoms.right_matrix();
  const Eigen::MatrixXd gram = (u.transpose() * u).cwiseProduct(v.transpose() * v);
  const Eigen::Map<const Eigen::VectorXd> rhs(c.data(), static_cast<Eigen::Index>(c.size()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
  cod.setThreshold(1e-12);
  const Eigen::VectorXd alpha = cod.solve(rhs);
  return std::sqrt(std::max(0.0, rhs.dot(alpha)));
}

PropositionReport check_proposition_inequalities(const MeasurementOperator& op, std::size_t r,
                                                 std::size_t trials, std::uint64_t seed) {
  if (r == 0 || r > std::min(op.rows(), op.cols())) {
    throw InvalidArgument("check_proposition_inequalities: rank must be in [1, min(m, n)]");
  }
  PropositionReport report;
  for (std::size_t q = 1; q <= r; ++q) report.estimates.push_back(estimate_delta(op, q, trials, seed));
  const double delta = report.estimates.back().delta_lower;
  const double sqrt_r = std::sqrt(static_cast<double>(r));
  constexpr double kRoundoff = 1e-12;

  auto record = [&](std::string name, std::size_t trial, double lhs, double rhs, double rhs_cons) {
    const bool ok = lhs <= rhs * (1.0 + kRoundoff);
    report.checks.push_back({std::move(name), trial, lhs, rhs, rhs_cons, ok});
    if (!ok) ++report.inconsistent;
  };

  for (std::size_t q = 1; q < report.estimates.size(); ++q) {
    record("delta_nondecreasing_in_r", q, report.estimates[q - 1].delta_lower,
           report.estimates[q].delta_lower, report.estimates[q].delta_lower);
  }

  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed ^ 0x70726f70ULL, t));

    const AtomSet atoms = random_atoms(op.rows(), op.cols(), 1 + rng.below(r), rng);
    const std::vector<double> b = rng.normal_vector(op.measurements());
    const double bnorm = norm2(b);
    record("projected_adjoint_bound", t, projected_adjoint_norm(op, b, atoms),
           std::sqrt(1.0 + delta) * bnorm, std::sqrt(2.0) * bnorm);

    DenseMatrix x(op.rows(), op.cols(), rng.normal_vector(op.rows() * op.cols()));
    const double energy_rhs = x.frobenius_norm() + nuclear_norm(x) / sqrt_r;
    record("nuclear_energy_bound_full_rank", t, norm2(op.apply(x)),
           std::sqrt(1.0 + delta) * energy_rhs, std::sqrt(2.0) * energy_rhs);

    const FactoredMatrix low = random_unit_low_rank(op.rows(), op.cols(), r, rng.below(1ULL << 62));
    double low_nuclear = 0.0;
    for (double s : low.sigmas()) low_nuclear += s;
    const double low_rhs = low.frobenius_norm() + low_nuclear / sqrt_r;
    record("nuclear_energy_bound_rank_r", t, norm2(op.apply(low)),
           std::sqrt(1.0 + delta) * low_rhs, std::sqrt(2.0) * low_rhs);
  }
  return report;
}

}  // namespace admira
