#include <algorithm>
#include <cmath>

#include "admira/error.hpp"
#include "admira/linalg.hpp"

namespace admira {
namespace {

// Builds an orthonormal FactoredMatrix from the leading columns of U, S, V,
// dropping values at or below the rank tolerance when `truncate` is set.
FactoredMatrix assemble(std::size_t rows, std::size_t cols, const Eigen::MatrixXd& u,
                        const Eigen::VectorXd& s, const Eigen::MatrixXd& v, std::size_t limit,
                        bool truncate) {
  AtomSet atoms(rows, cols);
  std::vector<double> sigmas;
  const double cutoff = s.size() > 0 ? kRankTolerance * s(0) : 0.0;
  std::vector<double> uk(rows);
  std::vector<double> vk(cols);
  const auto count = std::min<std::size_t>(limit, static_cast<std::size_t>(s.size()));
  for (std::size_t k = 0; k < count; ++k) {
    const double sigma = s(static_cast<Eigen::Index>(k));
    if (truncate && (sigma <= cutoff || sigma <= 0.0)) break;
    Eigen::Map<Eigen::VectorXd>(uk.data(), static_cast<Eigen::Index>(rows)) =
        u.col(static_cast<Eigen::Index>(k)).normalized();
    Eigen::Map<Eigen::VectorXd>(vk.data(), static_cast<Eigen::Index>(cols)) =
        v.col(static_cast<Eigen::Index>(k)).normalized();
    normalize_sign(uk, vk);
    atoms.push_back(uk, vk);
    sigmas.push_back(std::max(sigma, 0.0));
  }
  return FactoredMatrix(std::move(atoms), std::move(sigmas), true);
}

}  // namespace

void normalize_sign(std::span<double> u, std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (std::abs(u[i]) > std::abs(u[best])) best = i;
  }
  if (!u.empty() && u[best] < 0.0) {
    for (double& x : u) x = -x;
    for (double& x : v) x = -x;
  }
}

FactoredMatrix full_svd(const DenseMatrix& m) {
  const Eigen::MatrixXd a = m.eigen();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return assemble(m.rows(), m.cols(), svd.matrixU(), svd.singularValues(), svd.matrixV(),
                  std::min(m.rows(), m.cols()), false);
}

FactoredMatrix truncated_svd(const DenseMatrix& m, std::size_t k, const SvdOptions& options) {
  if (k == 0) throw InvalidArgument("truncated_svd: k must be positive");
  const bool dense = options.mode == SvdMode::dense ||
                     (options.mode == SvdMode::automatic &&
                      std::min(m.rows(), m.cols()) <= options.dense_threshold);
  if (!dense) return lanczos_svd(DenseLinearMap(m), k, options);
  const Eigen::MatrixXd a = m.eigen();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return assemble(m.rows(), m.cols(), svd.matrixU(), svd.singularValues(), svd.matrixV(), k, true);
}

FactoredMatrix truncated_svd(const LinearMap& m, std::size_t k, const SvdOptions& options) {
  if (k == 0) throw InvalidArgument("truncated_svd: k must be positive");
  const bool dense = options.mode == SvdMode::dense ||
                     (options.mode == SvdMode::automatic &&
                      std::min(m.rows(), m.cols()) <= options.dense_threshold);
  if (dense) {
    SvdOptions forced = options;
    forced.mode = SvdMode::dense;
    return truncated_svd(m.to_dense(), k, forced);
  }
  return lanczos_svd(m, k, options);
}

FactoredMatrix svd_of_factored(const FactoredMatrix& x) {
  if (x.rank() == 0) return FactoredMatrix(x.rows(), x.cols());
  const auto k = static_cast<Eigen::Index>(x.rank());
  const Eigen::MatrixXd u = x.atoms().left_matrix();
  const Eigen::MatrixXd v = x.atoms().right_matrix();
  const Eigen::Map<const Eigen::VectorXd> s(x.sigmas().data(), k);

  // More triplets than rows (or columns) is allowed: the thin factors are
  // then square and R is wide.
  const Eigen::Index ku = std::min<Eigen::Index>(u.rows(), k);
  const Eigen::Index kv = std::min<Eigen::Index>(v.rows(), k);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_u(u);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_v(v);
  const Eigen::MatrixXd q_u = qr_u.householderQ() * Eigen::MatrixXd::Identity(u.rows(), ku);
  const Eigen::MatrixXd q_v = qr_v.householderQ() * Eigen::MatrixXd::Identity(v.rows(), kv);
  const Eigen::MatrixXd r_u = qr_u.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_v = qr_v.matrixQR().topRows(kv).triangularView<Eigen::Upper>();

  const Eigen::MatrixXd core = r_u * s.asDiagonal() * r_v.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return assemble(x.rows(), x.cols(), q_u * svd.matrixU(), svd.singularValues(),
                  q_v * svd.matrixV(), static_cast<std::size_t>(std::min(ku, kv)), true);
}

FactoredMatrix best_rank_r(const FactoredMatrix& x, std::size_t r) {
  if (!x.is_orthonormal()) return best_rank_r(svd_of_factored(x), r);
  if (r >= x.rank()) return x;
  AtomSet atoms(x.rows(), x.cols());
  for (std::size_t k = 0; k < r; ++k) atoms.push_back(x.u(k), x.v(k));
  return FactoredMatrix(std::move(atoms),
                        std::vector<double>(x.sigmas().begin(), x.sigmas().begin() + r), true);
}

}  // namespace admira
