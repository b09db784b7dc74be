#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "admira/error.hpp"
#include "admira/kernels.hpp"
#include "admira/linalg.hpp"

namespace admira {
namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
}

}  // namespace

AtomSet::AtomSet(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw InvalidArgument("AtomSet: dimensions must be positive");
}

void AtomSet::push_back(std::span<const double> u, std::span<const double> v) {
  if (u.size() != rows_ || v.size() != cols_) {
    throw DimensionError("AtomSet::push_back: atom is " + std::to_string(u.size()) + "x" +
                         std::to_string(v.size()) + ", set is " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
  if (std::abs(norm2(u) - 1.0) > kUnitTolerance || std::abs(norm2(v) - 1.0) > kUnitTolerance) {
    throw InvalidArgument("AtomSet::push_back: atom vectors must have unit norm");
  }
  left_.insert(left_.end(), u.begin(), u.end());
  right_.insert(right_.end(), v.begin(), v.end());
  ++count_;
}

AtomSet AtomSet::merge(const AtomSet& a, const AtomSet& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("AtomSet::merge");
  AtomSet out = a;
  out.left_.insert(out.left_.end(), b.left_.begin(), b.left_.end());
  out.right_.insert(out.right_.end(), b.right_.begin(), b.right_.end());
  out.count_ += b.count_;
  return out;
}

Eigen::MatrixXd AtomSet::left_matrix() const {
  return Eigen::Map<const Eigen::MatrixXd>(left_.data(), static_cast<Eigen::Index>(rows_),
                                           static_cast<Eigen::Index>(count_));
}

Eigen::MatrixXd AtomSet::right_matrix() const {
  return Eigen::Map<const Eigen::MatrixXd>(right_.data(), static_cast<Eigen::Index>(cols_),
                                           static_cast<Eigen::Index>(count_));
}

FactoredMatrix::FactoredMatrix(std::size_t rows, std::size_t cols) : atoms_(rows, cols) {}

FactoredMatrix::FactoredMatrix(AtomSet atoms, std::vector<double> sigmas, bool orthonormal)
    : atoms_(std::move(atoms)), sigmas_(std::move(sigmas)), orthonormal_(orthonormal) {
  if (sigmas_.size() != atoms_.size()) {
    throw DimensionError("FactoredMatrix: " + std::to_string(sigmas_.size()) + " sigmas for " +
                         std::to_string(atoms_.size()) + " atoms");
  }
  for (std::size_t k = 0; k < sigmas_.size(); ++k) {
    if (!std::isfinite(sigmas_[k]) || sigmas_[k] < 0.0) {
      throw InvalidArgument("FactoredMatrix: sigmas must be finite and nonnegative");
    }
    if (k > 0 && sigmas_[k] > sigmas_[k - 1]) {
      throw InvalidArgument("FactoredMatrix: sigmas must be nonincreasing");
    }
  }
  if (orthonormal_ && !atoms_.empty()) {
    const Eigen::MatrixXd u = atoms_.left_matrix();
    const Eigen::MatrixXd v = atoms_.right_matrix();
    const auto k = static_cast<Eigen::Index>(atoms_.size());
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
    if ((u.transpose() * u - eye).cwiseAbs().maxCoeff() > kOrthonormalTolerance ||
        (v.transpose() * v - eye).cwiseAbs().maxCoeff() > kOrthonormalTolerance) {
      throw InvalidArgument("FactoredMatrix: triplets flagged orthonormal are not");
    }
  }
}

FactoredMatrix FactoredMatrix::from_coefficients(const AtomSet& atoms,
                                                 std::span<const double> coeffs) {
  if (coeffs.size() != atoms.size()) throw DimensionError("FactoredMatrix::from_coefficients");
  std::vector<std::size_t> order(coeffs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(coeffs[a]) > std::abs(coeffs[b]);
  });
  AtomSet sorted(atoms.rows(), atoms.cols());
  std::vector<double> sigmas;
  std::vector<double> u(atoms.rows());
  for (std::size_t k : order) {
    const double c = coeffs[k];
    if (c == 0.0) continue;
    const auto src = atoms.u(k);
    if (c < 0.0) {
      std::transform(src.begin(), src.end(), u.begin(), [](double x) { return -x; });
    } else {
      std::copy(src.begin(), src.end(), u.begin());
    }
    sorted.push_back(u, atoms.v(k));
    sigmas.push_back(std::abs(c));
  }
  return FactoredMatrix(std::move(sorted), std::move(sigmas), false);
}

DenseMatrix FactoredMatrix::to_dense() const {
  DenseMatrix out(rows(), cols());
  auto values = out.values();
  for (std::size_t k = 0; k < rank(); ++k) {
    const auto uk = u(k);
    const auto vk = v(k);
    for (std::size_t i = 0; i < rows(); ++i) {
      const double scale = sigmas_[k] * uk[i];
      if (scale != 0.0) kernels::axpy(scale, vk.data(), values.data() + i * cols(), cols());
    }
  }
  return out;
}

double FactoredMatrix::frobenius_norm() const {
  if (rank() == 0) return 0.0;
  const Eigen::Map<const Eigen::VectorXd> s(sigmas_.data(), static_cast<Eigen::Index>(rank()));
  if (orthonormal_) return s.norm();
  const Eigen::MatrixXd u = atoms_.left_matrix();
  const Eigen::MatrixXd v = atoms_.right_matrix();
  const Eigen::MatrixXd gram = (u.transpose() * u).cwiseProduct(v.transpose() * v);
  return std::sqrt(std::max(0.0, s.dot(gram * s)));
}

double frobenius_distance(const DenseMatrix& a, const FactoredMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("frobenius_distance");
  const std::size_t k = b.rank();
  std::vector<double> left(k);
  std::vector<double> row(a.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto arow = a.row(i);
    std::copy(arow.begin(), arow.end(), row.begin());
    for (std::size_t l = 0; l < k; ++l) {
      const double scale = b.sigma(l) * b.u(l)[i];
      if (scale != 0.0) kernels::axpy(-scale, b.v(l).data(), row.data(), row.size());
    }
    sum += kernels::dot(row.data(), row.data(), row.size());
  }
  return std::sqrt(sum);
}

}  // namespace admira
