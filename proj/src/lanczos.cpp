#include <algorithm>
#include <cmath>
#include <string>

#include "admira/error.hpp"
#include "admira/linalg.hpp"
#include "admira/random.hpp"

namespace admira {
namespace {

// Two passes of classical Gram-Schmidt against the first `count` columns of
// `basis`. Returns the accumulated projection coefficients.
Eigen::VectorXd orthogonalize(Eigen::Ref<Eigen::VectorXd> x, const Eigen::MatrixXd& basis,
                              Eigen::Index count) {
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(count);
  if (count == 0) return coeffs;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd c = basis.leftCols(count).transpose() * x;
    x.noalias() -= basis.leftCols(count) * c;
    coeffs += c;
  }
  return coeffs;
}

// Random unit vector orthogonal to the first `count` columns of `basis`.
Eigen::VectorXd random_orthogonal(Rng& rng, const Eigen::MatrixXd& basis, Eigen::Index count) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::VectorXd x(basis.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    orthogonalize(x, basis, count);
    const double norm = x.norm();
    if (norm > 1e-8) return x / norm;
  }
  return Eigen::VectorXd::Zero(basis.rows());
}

}  // namespace

FactoredMatrix lanczos_svd(const LinearMap& a, std::size_t k, const SvdOptions& options) {
  if (k == 0) throw InvalidArgument("lanczos_svd: k must be positive");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t full = std::min(m, n);
  k = std::min(k, full);

  const auto work = static_cast<Eigen::Index>(std::min(full, 2 * k + 20));
  const auto wanted = static_cast<Eigen::Index>(k);
  const Eigen::Index keep = std::min<Eigen::Index>(work - 1, wanted + (work - wanted) / 2);
  const std::size_t max_restarts = options.max_restarts > 0 ? options.max_restarts : 10 * k;

  Rng rng(options.seed);
  Eigen::MatrixXd v_basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), work);
  Eigen::MatrixXd w_basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), work);
  Eigen::MatrixXd bidiag = Eigen::MatrixXd::Zero(work, work);
  Eigen::VectorXd residual(static_cast<Eigen::Index>(n));
  double residual_norm = 0.0;
  double anorm = 0.0;

  v_basis.col(0) = random_orthogonal(rng, v_basis, 0);

  Eigen::VectorXd wcol(static_cast<Eigen::Index>(m));
  Eigen::VectorXd fcol(static_cast<Eigen::Index>(n));
  Eigen::Index start = 0;
  std::size_t converged = 0;

  for (std::size_t restart = 0;; ++restart) {
    for (Eigen::Index j = start; j < work; ++j) {
      a.multiply(std::span<const double>(v_basis.col(j).data(), n),
                 std::span<double>(wcol.data(), m));
      const Eigen::VectorXd coeffs = orthogonalize(wcol, w_basis, j);
      bidiag.col(j).head(j) = coeffs;
      double s = wcol.norm();
      anorm = std::max(anorm, s);
      if (s <= 1e-14 * anorm || s == 0.0) {
        wcol = random_orthogonal(rng, w_basis, j);
        s = 0.0;
      } else {
        wcol /= s;
      }
      w_basis.col(j) = wcol;
      bidiag(j, j) = s;

      a.multiply_transposed(std::span<const double>(w_basis.col(j).data(), m),
                            std::span<double>(fcol.data(), n));
      orthogonalize(fcol, v_basis, j + 1);
      double r = fcol.norm();
      anorm = std::max(anorm, r);
      if (j + 1 < work) {
        if (r <= 1e-14 * anorm || r == 0.0) {
          fcol = random_orthogonal(rng, v_basis, j + 1);
          r = 0.0;
        } else {
          fcol /= r;
        }
        v_basis.col(j + 1) = fcol;
        bidiag(j, j + 1) = r;
      } else {
        residual = fcol;
        residual_norm = r;
      }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bidiag, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sig = svd.singularValues();
    const Eigen::MatrixXd& left = svd.matrixU();
    const Eigen::MatrixXd& right = svd.matrixV();
    if (sig(0) <= 0.0) return FactoredMatrix(m, n);

    converged = 0;
    for (Eigen::Index i = 0; i < wanted; ++i) {
      const double res = residual_norm * std::abs(left(work - 1, i));
      if (res > options.tolerance * sig(0) && sig(i) > kRankTolerance * sig(0)) break;
      ++converged;
    }

    if (converged == k || restart >= max_restarts) {
      if (converged < k) {
        throw ConvergenceError("lanczos_svd: " + std::to_string(converged) + " of " +
                                   std::to_string(k) + " triplets converged after " +
                                   std::to_string(restart) + " restarts",
                               converged, restart);
      }
      const Eigen::MatrixXd u = w_basis * left.leftCols(wanted);
      const Eigen::MatrixXd v = v_basis * right.leftCols(wanted);
      AtomSet atoms(m, n);
      std::vector<double> sigmas;
      std::vector<double> uk(m);
      std::vector<double> vk(n);
      for (Eigen::Index i = 0; i < wanted; ++i) {
        if (sig(i) <= kRankTolerance * sig(0)) break;
        Eigen::Map<Eigen::VectorXd>(uk.data(), static_cast<Eigen::Index>(m)) = u.col(i).normalized();
        Eigen::Map<Eigen::VectorXd>(vk.data(), static_cast<Eigen::Index>(n)) = v.col(i).normalized();
        normalize_sign(uk, vk);
        atoms.push_back(uk, vk);
        sigmas.push_back(sig(i));
      }
      return FactoredMatrix(std::move(atoms), std::move(sigmas), true);
    }

    // Thick restart: keep the leading Ritz vectors, continue from the residual.
    const Eigen::MatrixXd v_keep = v_basis * right.leftCols(keep);
    const Eigen::MatrixXd w_keep = w_basis * left.leftCols(keep);
    v_basis.leftCols(keep) = v_keep;
    w_basis.leftCols(keep) = w_keep;
    bidiag.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) bidiag(i, i) = sig(i);
    if (residual_norm <= 1e-14 * anorm || residual_norm == 0.0) {
      v_basis.col(keep) = random_orthogonal(rng, v_basis, keep);
    } else {
      v_basis.col(keep) = residual / residual_norm;
      orthogonalize(v_basis.col(keep), v_basis, keep);
      v_basis.col(keep).normalize();
    }
    start = keep;
  }
}

}  // namespace admira
