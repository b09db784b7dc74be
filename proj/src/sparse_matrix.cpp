#include "admira/sparse_matrix.hpp"

#include <limits>

#include "admira/error.hpp"
#include "admira/kernels.hpp"

namespace admira {
namespace {

// Counting sort of coordinate positions by `key`.
void compress(std::size_t extent, std::span<const std::uint32_t> key,
              std::span<const std::uint32_t> other, std::vector<std::size_t>& ptr,
              std::vector<std::uint32_t>& minor, std::vector<std::uint32_t>& source) {
  ptr.assign(extent + 1, 0);
  for (std::uint32_t k : key) ++ptr[k + 1];
  for (std::size_t i = 0; i < extent; ++i) ptr[i + 1] += ptr[i];
  std::vector<std::size_t> cursor(ptr.begin(), ptr.end() - 1);
  minor.resize(key.size());
  source.resize(key.size());
  for (std::size_t s = 0; s < key.size(); ++s) {
    const std::size_t slot = cursor[key[s]]++;
    minor[slot] = other[s];
    source[slot] = static_cast<std::uint32_t>(s);
  }
}

}  // namespace

SparsePattern::SparsePattern(std::size_t rows, std::size_t cols,
                             std::vector<std::uint32_t> row_index,
                             std::vector<std::uint32_t> col_index)
    : rows_(rows), cols_(cols), row_index_(std::move(row_index)), col_index_(std::move(col_index)) {
  if (row_index_.size() != col_index_.size()) throw DimensionError("SparsePattern: index lengths");
  if (row_index_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("SparsePattern: too many entries");
  }
  for (std::size_t s = 0; s < row_index_.size(); ++s) {
    if (row_index_[s] >= rows_ || col_index_[s] >= cols_) {
      throw InvalidArgument("SparsePattern: index out of range");
    }
  }
  compress(rows_, row_index_, col_index_, row_ptr_, csr_col_, csr_source_);
  compress(cols_, col_index_, row_index_, col_ptr_, csc_row_, csc_source_);
}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsePattern> pattern,
                           std::span<const double> values)
    : pattern_(std::move(pattern)) {
  if (values.size() != pattern_->nonzeros()) throw DimensionError("SparseMatrix: value count");
  const auto csr = pattern_->csr_source();
  const auto csc = pattern_->csc_source();
  csr_values_.resize(values.size());
  csc_values_.resize(values.size());
  for (std::size_t s = 0; s < values.size(); ++s) {
    csr_values_[s] = values[csr[s]];
    csc_values_[s] = values[csc[s]];
  }
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols() || y.size() != rows()) throw DimensionError("SparseMatrix::multiply");
  const auto ptr = pattern_->row_ptr();
  const auto col = pattern_->csr_col();
  for (std::size_t i = 0; i < rows(); ++i) {
    y[i] = kernels::gather_dot(csr_values_.data() + ptr[i], col.data() + ptr[i], x.data(),
                               ptr[i + 1] - ptr[i]);
  }
}

void SparseMatrix::multiply_transposed(std::span<const double> x, std::span<double> y) const {
  if (x.size() != rows() || y.size() != cols()) {
    throw DimensionError("SparseMatrix::multiply_transposed");
  }
  const auto ptr = pattern_->col_ptr();
  const auto row = pattern_->csc_row();
  for (std::size_t j = 0; j < cols(); ++j) {
    y[j] = kernels::gather_dot(csc_values_.data() + ptr[j], row.data() + ptr[j], x.data(),
                               ptr[j + 1] - ptr[j]);
  }
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows(), cols());
  const auto ptr = pattern_->row_ptr();
  const auto col = pattern_->csr_col();
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t s = ptr[i]; s < ptr[i + 1]; ++s) out(i, col[s]) += csr_values_[s];
  }
  return out;
}

}  // namespace admira
