#include <cmath>
#include <string>

#include "admira/error.hpp"
#include "admira/kernels.hpp"
#include "admira/linalg.hpp"

namespace admira {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw InvalidArgument("DenseMatrix: dimensions must be positive");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows == 0 || cols == 0) throw InvalidArgument("DenseMatrix: dimensions must be positive");
  if (values_.size() != rows * cols) {
    throw DimensionError("DenseMatrix: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(values_.size()));
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw InvalidArgument("DenseMatrix: non-finite entry");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::from_eigen(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::vector<double> values(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMajorMatrix>(values.data(), m.rows(), m.cols()) = m;
  return DenseMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                     std::move(values));
}

double DenseMatrix::frobenius_norm() const {
  return std::sqrt(kernels::dot(values_.data(), values_.data(), values_.size()));
}

void DenseLinearMap::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols() || y.size() != rows()) throw DimensionError("DenseLinearMap::multiply");
  for (std::size_t i = 0; i < rows(); ++i) {
    y[i] = kernels::dot(matrix_.row(i).data(), x.data(), cols());
  }
}

void DenseLinearMap::multiply_transposed(std::span<const double> x, std::span<double> y) const {
  if (x.size() != rows() || y.size() != cols()) {
    throw DimensionError("DenseLinearMap::multiply_transposed");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i) {
    if (x[i] != 0.0) kernels::axpy(x[i], matrix_.row(i).data(), y.data(), cols());
  }
}

}  // namespace admira
