#pragma once

// Linear measurement maps A: R^{m x n} -> R^p and their adjoints.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "admira/linalg.hpp"
#include "admira/sparse_matrix.hpp"

namespace admira {

class MeasurementOperator {
 public:
  MeasurementOperator(std::size_t rows, std::size_t cols, std::size_t measurements);
  virtual ~MeasurementOperator() = default;

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t measurements() const noexcept { return measurements_; }

  std::vector<double> apply(const DenseMatrix& x) const;
  std::vector<double> apply(const FactoredMatrix& x) const;

  /// A(sum_k coeffs[k] u_k v_k^T).
  std::vector<double> apply_combination(const AtomSet& atoms, std::span<const double> coeffs) const;

  /// A* y as a matrix-free map; supports densification and matvecs.
  std::unique_ptr<LinearMap> adjoint(std::span<const double> y) const;

  /// p x k matrix whose k-th column is A(u_k v_k^T).
  virtual Eigen::MatrixXd atom_images(const AtomSet& atoms) const;

  /// <A* y, u_k v_k^T> = u_k^T (A* y) v_k for every atom.
  std::vector<double> adjoint_on_atoms(std::span<const double> y, const AtomSet& atoms) const;

 protected:
  virtual std::vector<double> apply_dense(const DenseMatrix& x) const = 0;
  virtual std::vector<double> apply_atoms(const AtomSet& atoms,
                                          std::span<const double> coeffs) const = 0;
  virtual std::unique_ptr<LinearMap> adjoint_map(std::span<const double> y) const = 0;

  void check_atoms(const AtomSet& atoms) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t measurements_;
};

/// (A X)_k = <X, Z_k> with p dense frames of i.i.d. N(0, 1/p) entries, so that
/// E |A X|^2 = |X|_F^2.
class GaussianOperator final : public MeasurementOperator {
 public:
  GaussianOperator(std::size_t rows, std::size_t cols, std::size_t measurements,
                   std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  /// Frame k as a row-major m x n block.
  std::span<const double> frame(std::size_t k) const;

 protected:
  std::vector<double> apply_dense(const DenseMatrix& x) const override;
  std::vector<double> apply_atoms(const AtomSet& atoms,
                                  std::span<const double> coeffs) const override;
  std::unique_ptr<LinearMap> adjoint_map(std::span<const double> y) const override;

 private:
  std::uint64_t seed_;
  std::vector<double> frames_;
};

/// Entry sampling (matrix completion): b_s = X[i_s, j_s] over distinct positions.
class SamplingOperator final : public MeasurementOperator {
 public:
  using Index = std::pair<std::uint32_t, std::uint32_t>;

  /// Zero-based positions; must be distinct and in range.
  SamplingOperator(std::size_t rows, std::size_t cols, std::span<const Index> positions,
                   std::uint64_t seed = 0);

  /// p positions drawn uniformly without replacement, sorted row-major.
  static SamplingOperator random(std::size_t rows, std::size_t cols, std::size_t measurements,
                                 std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  Index position(std::size_t s) const {
    return {pattern_->row_index()[s], pattern_->col_index()[s]};
  }
  const SparsePattern& pattern() const noexcept { return *pattern_; }

  Eigen::MatrixXd atom_images(const AtomSet& atoms) const override;

 protected:
  std::vector<double> apply_dense(const DenseMatrix& x) const override;
  std::vector<double> apply_atoms(const AtomSet& atoms,
                                  std::span<const double> coeffs) const override;
  std::unique_ptr<LinearMap> adjoint_map(std::span<const double> y) const override;

 private:
  std::uint64_t seed_;
  std::shared_ptr<const SparsePattern> pattern_;
};

/// Row-major vectorization, p = m n. An exact isometry (delta_r = 0).
class IdentityOperator final : public MeasurementOperator {
 public:
  IdentityOperator(std::size_t rows, std::size_t cols);

 protected:
  std::vector<double> apply_dense(const DenseMatrix& x) const override;
  std::vector<double> apply_atoms(const AtomSet& atoms,
                                  std::span<const double> coeffs) const override;
  std::unique_ptr<LinearMap> adjoint_map(std::span<const double> y) const override;
};

/// Monte Carlo lower bound on the rank-restricted isometry constant.
struct RipEstimate {
  std::size_t rank = 0;
  /// max |(|A X|^2 - 1)| over the sampled unit-Frobenius X of rank <= rank.
  /// A lower bound on delta_rank, never a certificate.
  double delta_lower = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Samples are nested: the rank-q sample of a trial extends its rank-(q-1)
/// sample by one orthogonal triplet, and every prefix is evaluated, so the
/// estimate is nondecreasing in `rank` for a fixed seed.
RipEstimate estimate_delta(const MeasurementOperator& op, std::size_t rank, std::size_t trials,
                           std::uint64_t seed, std::size_t threads = 1);

/// Random rank-`rank` matrix with orthonormal factors and unit Frobenius norm,
/// built by the same nested construction estimate_delta uses.
FactoredMatrix random_unit_low_rank(std::size_t rows, std::size_t cols, std::size_t rank,
                                    std::uint64_t seed);

}  // namespace admira
