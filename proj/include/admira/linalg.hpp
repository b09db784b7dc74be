#pragma once

// Dense and factored real matrices, the matrix-free LinearMap interface, and
// the SVD family (full, truncated, factored-form recombination).

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace admira {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Real m x n matrix, row-major. Entries must be finite at construction.
class DenseMatrix {
 public:
  /// Zero matrix. Both dimensions must be positive.
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix from_eigen(const Eigen::Ref<const Eigen::MatrixXd>& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols_, cols_);
  }

  Eigen::Map<const RowMajorMatrix> eigen() const {
    return {values_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_)};
  }
  Eigen::Map<RowMajorMatrix> eigen() {
    return {values_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_)};
  }

  double frobenius_norm() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Ordered list of rank-one atoms u v^T with unit-norm u (length m) and v
/// (length n). Vectors are stored atom-major: u_k occupies
/// left_data()[k*m, (k+1)*m).
class AtomSet {
 public:
  static constexpr double kUnitTolerance = 1e-10;

  AtomSet(std::size_t rows, std::size_t cols);

  /// Appends the atom u v^T; throws unless |u| = |v| = 1 within kUnitTolerance.
  void push_back(std::span<const double> u, std::span<const double> v);

  /// Concatenation a followed by b (no deduplication).
  static AtomSet merge(const AtomSet& a, const AtomSet& b);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  std::span<const double> u(std::size_t k) const {
    return std::span<const double>(left_).subspan(k * rows_, rows_);
  }
  std::span<const double> v(std::size_t k) const {
    return std::span<const double>(right_).subspan(k * cols_, cols_);
  }

  std::span<const double> left_data() const noexcept { return left_; }
  std::span<const double> right_data() const noexcept { return right_; }

  /// m x k matrix whose columns are u_0..u_{k-1}.
  Eigen::MatrixXd left_matrix() const;
  Eigen::MatrixXd right_matrix() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t count_ = 0;
  std::vector<double> left_;
  std::vector<double> right_;
};

/// Atomic decomposition X = sum_k sigma_k u_k v_k^T with sigma nonincreasing
/// and nonnegative. SVD outputs are flagged orthonormal; generic spans of
/// merged atoms are not.
class FactoredMatrix {
 public:
  static constexpr double kOrthonormalTolerance = 1e-8;

  /// The zero matrix (no triplets).
  FactoredMatrix(std::size_t rows, std::size_t cols);

  /// Validates ordering, nonnegativity and, when `orthonormal`, mutual
  /// orthogonality of the u's and of the v's.
  FactoredMatrix(AtomSet atoms, std::vector<double> sigmas, bool orthonormal);

  /// sum_k coeffs[k] u_k v_k^T for arbitrary real coefficients. Negative
  /// coefficients are folded into u_k; triplets are sorted by magnitude
  /// (stable) and zero coefficients dropped.
  static FactoredMatrix from_coefficients(const AtomSet& atoms, std::span<const double> coeffs);

  std::size_t rows() const noexcept { return atoms_.rows(); }
  std::size_t cols() const noexcept { return atoms_.cols(); }
  std::size_t rank() const noexcept { return sigmas_.size(); }
  bool is_orthonormal() const noexcept { return orthonormal_; }

  double sigma(std::size_t k) const { return sigmas_[k]; }
  std::span<const double> sigmas() const noexcept { return sigmas_; }
  std::span<const double> u(std::size_t k) const { return atoms_.u(k); }
  std::span<const double> v(std::size_t k) const { return atoms_.v(k); }
  const AtomSet& atoms() const noexcept { return atoms_; }

  DenseMatrix to_dense() const;

  /// Exact for any triplets; uses the k x k Gram matrices when not orthonormal.
  double frobenius_norm() const;

 private:
  AtomSet atoms_;
  std::vector<double> sigmas_;
  bool orthonormal_ = true;
};

/// Matrix-free m x n real linear map.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;

  /// y = M x  (x has cols() entries, y has rows()).
  virtual void multiply(std::span<const double> x, std::span<double> y) const = 0;
  /// y = M^T x  (x has rows() entries, y has cols()).
  virtual void multiply_transposed(std::span<const double> x, std::span<double> y) const = 0;

  virtual DenseMatrix to_dense() const = 0;
};

/// LinearMap backed by an owned dense matrix.
class DenseLinearMap final : public LinearMap {
 public:
  explicit DenseLinearMap(DenseMatrix matrix) : matrix_(std::move(matrix)) {}

  std::size_t rows() const override { return matrix_.rows(); }
  std::size_t cols() const override { return matrix_.cols(); }
  void multiply(std::span<const double> x, std::span<double> y) const override;
  void multiply_transposed(std::span<const double> x, std::span<double> y) const override;
  DenseMatrix to_dense() const override { return matrix_; }

  const DenseMatrix& matrix() const noexcept { return matrix_; }

 private:
  DenseMatrix matrix_;
};

enum class SvdMode { automatic, dense, lanczos };

struct SvdOptions {
  SvdMode mode = SvdMode::automatic;
  /// automatic mode uses the dense path when min(m, n) <= this.
  std::size_t dense_threshold = 400;
  /// Lanczos: Ritz residual norms must fall below tolerance * sigma_1.
  double tolerance = 1e-10;
  /// Lanczos: 0 means 10 * k.
  std::size_t max_restarts = 0;
  /// Lanczos: seeds the starting vector.
  std::uint64_t seed = 0x5eed;
};

/// Singular values at or below kRankTolerance * sigma_1 are treated as zero by
/// the truncated routines.
inline constexpr double kRankTolerance = 1e-12;

/// Complete thin SVD, min(m, n) triplets including zero singular values.
FactoredMatrix full_svd(const DenseMatrix& m);

/// Leading min(k, numerical rank) singular triplets.
FactoredMatrix truncated_svd(const DenseMatrix& m, std::size_t k, const SvdOptions& options = {});
FactoredMatrix truncated_svd(const LinearMap& m, std::size_t k, const SvdOptions& options = {});

/// Thick-restarted Golub-Kahan-Lanczos bidiagonalization with full
/// reorthogonalization. Throws ConvergenceError after max_restarts.
FactoredMatrix lanczos_svd(const LinearMap& m, std::size_t k, const SvdOptions& options = {});

/// Orthonormal SVD of a factored matrix via QR of the factors and an SVD of
/// the small k x k core. Never forms the m x n product.
FactoredMatrix svd_of_factored(const FactoredMatrix& x);

/// Keeps the r leading triplets (input must be orthonormal).
FactoredMatrix best_rank_r(const FactoredMatrix& x, std::size_t r);

/// |a - b|_F computed entrywise (no cancellation from expanding the square).
double frobenius_distance(const DenseMatrix& a, const FactoredMatrix& b);

/// Flips (u_k, v_k) so the largest-magnitude entry of u_k is positive.
void normalize_sign(std::span<double> u, std::span<double> v);

}  // namespace admira
