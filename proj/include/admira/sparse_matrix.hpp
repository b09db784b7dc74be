#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "admira/linalg.hpp"

namespace admira {

/// Coordinate list of nonzero positions with row- and column-compressed views.
/// Built once per sampling operator and shared by every adjoint image.
class SparsePattern {
 public:
  SparsePattern(std::size_t rows, std::size_t cols, std::vector<std::uint32_t> row_index,
                std::vector<std::uint32_t> col_index);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return row_index_.size(); }

  std::span<const std::uint32_t> row_index() const noexcept { return row_index_; }
  std::span<const std::uint32_t> col_index() const noexcept { return col_index_; }

  // Row-compressed: entries of row i are [row_ptr[i], row_ptr[i+1]); their
  // columns are csr_col and their positions in the coordinate list csr_source.
  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::uint32_t> csr_col() const noexcept { return csr_col_; }
  std::span<const std::uint32_t> csr_source() const noexcept { return csr_source_; }

  std::span<const std::size_t> col_ptr() const noexcept { return col_ptr_; }
  std::span<const std::uint32_t> csc_row() const noexcept { return csc_row_; }
  std::span<const std::uint32_t> csc_source() const noexcept { return csc_source_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> row_index_;
  std::vector<std::uint32_t> col_index_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> csr_col_;
  std::vector<std::uint32_t> csr_source_;
  std::vector<std::size_t> col_ptr_;
  std::vector<std::uint32_t> csc_row_;
  std::vector<std::uint32_t> csc_source_;
};

/// Sparse matrix with values on a shared pattern; duplicates sum.
class SparseMatrix final : public LinearMap {
 public:
  /// `values[s]` sits at (row_index[s], col_index[s]) of the pattern.
  SparseMatrix(std::shared_ptr<const SparsePattern> pattern, std::span<const double> values);

  std::size_t rows() const override { return pattern_->rows(); }
  std::size_t cols() const override { return pattern_->cols(); }
  void multiply(std::span<const double> x, std::span<double> y) const override;
  void multiply_transposed(std::span<const double> x, std::span<double> y) const override;
  DenseMatrix to_dense() const override;

  const SparsePattern& pattern() const noexcept { return *pattern_; }

 private:
  std::shared_ptr<const SparsePattern> pattern_;
  std::vector<double> csr_values_;
  std::vector<double> csc_values_;
};

}  // namespace admira
