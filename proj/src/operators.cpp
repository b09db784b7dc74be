#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "admira/error.hpp"
#include "admira/kernels.hpp"
#include "admira/operators.hpp"
#include "admira/random.hpp"

namespace admira {
namespace {

std::shared_ptr<const SparsePattern> make_pattern(std::size_t rows, std::size_t cols,
                                                  std::span<const SamplingOperator::Index> pos) {
  std::vector<std::uint32_t> r(pos.size());
  std::vector<std::uint32_t> c(pos.size());
  for (std::size_t s = 0; s < pos.size(); ++s) {
    r[s] = pos[s].first;
    c[s] = pos[s].second;
  }
  return std::make_shared<const SparsePattern>(rows, cols, std::move(r), std::move(c));
}

}  // namespace

MeasurementOperator::MeasurementOperator(std::size_t rows, std::size_t cols,
                                         std::size_t measurements)
    : rows_(rows), cols_(cols), measurements_(measurements) {
  if (rows == 0 || cols == 0 || measurements == 0) {
    throw InvalidArgument("MeasurementOperator: dimensions must be positive");
  }
}

std::vector<double> MeasurementOperator::apply(const DenseMatrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw DimensionError("apply: matrix is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", operator expects " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  return apply_dense(x);
}

std::vector<double> MeasurementOperator::apply(const FactoredMatrix& x) const {
  return apply_combination(x.atoms(), x.sigmas());
}

std::vector<double> MeasurementOperator::apply_combination(const AtomSet& atoms,
                                                           std::span<const double> coeffs) const {
  check_atoms(atoms);
  if (coeffs.size() != atoms.size()) throw DimensionError("apply_combination: coefficient count");
  if (atoms.empty()) return std::vector<double>(measurements_, 0.0);
  return apply_atoms(atoms, coeffs);
}

std::unique_ptr<LinearMap> MeasurementOperator::adjoint(std::span<const double> y) const {
  if (y.size() != measurements_) {
    throw DimensionError("adjoint: vector has " + std::to_string(y.size()) +
                         " entries, operator has " + std::to_string(measurements_));
  }
  return adjoint_map(y);
}

Eigen::MatrixXd MeasurementOperator::atom_images(const AtomSet& atoms) const {
  check_atoms(atoms);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(measurements_),
                      static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    AtomSet single(rows_, cols_);
    single.push_back(atoms.u(k), atoms.v(k));
    const double one = 1.0;
    const auto image = apply_atoms(single, std::span<const double>(&one, 1));
    out.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(image.data(), static_cast<Eigen::Index>(image.size()));
  }
  return out;
}

std::vector<double> MeasurementOperator::adjoint_on_atoms(std::span<const double> y,
                                                          const AtomSet& atoms) const {
  check_atoms(atoms);
  const auto map = adjoint(y);
  std::vector<double> out(atoms.size());
  std::vector<double> mv(rows_);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    map->multiply(atoms.v(k), mv);
    out[k] = kernels::dot(atoms.u(k).data(), mv.data(), rows_);
  }
  return out;
}

void MeasurementOperator::check_atoms(const AtomSet& atoms) const {
  if (atoms.rows() != rows_ || atoms.cols() != cols_) {
    throw DimensionError("atoms are " + std::to_string(atoms.rows()) + "x" +
                         std::to_string(atoms.cols()) + ", operator expects " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

// ---------------------------------------------------------------------------

GaussianOperator::GaussianOperator(std::size_t rows, std::size_t cols, std::size_t measurements,
                                   std::uint64_t seed)
    : MeasurementOperator(rows, cols, measurements), seed_(seed) {
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(measurements));
  frames_.resize(measurements * rows * cols);
  for (double& z : frames_) z = scale * rng.normal();
}

std::span<const double> GaussianOperator::frame(std::size_t k) const {
  const std::size_t len = rows() * cols();
  return std::span<const double>(frames_).subspan(k * len, len);
}

std::vector<double> GaussianOperator::apply_dense(const DenseMatrix& x) const {
  std::vector<double> out(measurements());
  const std::size_t len = rows() * cols();
  for (std::size_t k = 0; k < measurements(); ++k) {
    out[k] = kernels::dot(frames_.data() + k * len, x.values().data(), len);
  }
  return out;
}

// Dense frames make every <Z_k, u v^T> an O(mn) contraction anyway, so the
// combination is densified once and then contracted against each frame.
std::vector<double> GaussianOperator::apply_atoms(const AtomSet& atoms,
                                                  std::span<const double> coeffs) const {
  DenseMatrix sum(rows(), cols());
  auto values = sum.values();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto u = atoms.u(k);
    const auto v = atoms.v(k);
    for (std::size_t i = 0; i < rows(); ++i) {
      const double scale = coeffs[k] * u[i];
      if (scale != 0.0) kernels::axpy(scale, v.data(), values.data() + i * cols(), cols());
    }
  }
  return apply_dense(sum);
}

std::unique_ptr<LinearMap> GaussianOperator::adjoint_map(std::span<const double> y) const {
  DenseMatrix out(rows(), cols());
  const std::size_t len = rows() * cols();
  for (std::size_t k = 0; k < measurements(); ++k) {
    if (y[k] != 0.0) kernels::axpy(y[k], frames_.data() + k * len, out.values().data(), len);
  }
  return std::make_unique<DenseLinearMap>(std::move(out));
}

// ---------------------------------------------------------------------------

SamplingOperator::SamplingOperator(std::size_t rows, std::size_t cols,
                                   std::span<const Index> positions, std::uint64_t seed)
    : MeasurementOperator(rows, cols, positions.size()), seed_(seed) {
  std::vector<std::uint64_t> keys;
  keys.reserve(positions.size());
  for (const auto& [i, j] : positions) {
    if (i >= rows || j >= cols) {
      throw InvalidArgument("SamplingOperator: position (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") out of range");
    }
    keys.push_back(static_cast<std::uint64_t>(i) * cols + j);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw InvalidArgument("SamplingOperator: positions must be distinct");
  }
  pattern_ = make_pattern(rows, cols, positions);
}

SamplingOperator SamplingOperator::random(std::size_t rows, std::size_t cols,
                                          std::size_t measurements, std::uint64_t seed) {
  const std::uint64_t total = static_cast<std::uint64_t>(rows) * cols;
  if (measurements > total) {
    throw InvalidArgument("SamplingOperator::random: p = " + std::to_string(measurements) +
                          " exceeds m n = " + std::to_string(total));
  }
  // Partial Fisher-Yates over the virtual array 0..mn-1; only displaced slots
  // are stored.
  Rng rng(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> displaced;
  displaced.reserve(2 * measurements);
  std::vector<std::uint64_t> chosen(measurements);
  auto slot = [&](std::uint64_t i) {
    const auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  for (std::uint64_t s = 0; s < measurements; ++s) {
    const std::uint64_t pick = s + rng.below(total - s);
    const std::uint64_t at_pick = slot(pick);
    displaced[pick] = slot(s);
    chosen[s] = at_pick;
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Index> positions(measurements);
  for (std::size_t s = 0; s < measurements; ++s) {
    positions[s] = {static_cast<std::uint32_t>(chosen[s] / cols),
                    static_cast<std::uint32_t>(chosen[s] % cols)};
  }
  return SamplingOperator(rows, cols, positions, seed);
}

std::vector<double> SamplingOperator::apply_dense(const DenseMatrix& x) const {
  std::vector<double> out(measurements());
  const auto r = pattern_->row_index();
  const auto c = pattern_->col_index();
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = x(r[s], c[s]);
  return out;
}

std::vector<double> SamplingOperator::apply_atoms(const AtomSet& atoms,
                                                  std::span<const double> coeffs) const {
  const std::size_t k = atoms.size();
  std::vector<double> left(rows() * k);
  std::vector<double> right(cols() * k);
  for (std::size_t l = 0; l < k; ++l) {
    const auto u = atoms.u(l);
    const auto v = atoms.v(l);
    for (std::size_t i = 0; i < rows(); ++i) left[i * k + l] = coeffs[l] * u[i];
    for (std::size_t j = 0; j < cols(); ++j) right[j * k + l] = v[j];
  }
  std::vector<double> out(measurements());
  kernels::sampled_product(left.data(), right.data(), k, pattern_->row_index().data(),
                           pattern_->col_index().data(), out.data(), out.size());
  return out;
}

Eigen::MatrixXd SamplingOperator::atom_images(const AtomSet& atoms) const {
  check_atoms(atoms);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(measurements()),
                      static_cast<Eigen::Index>(atoms.size()));
  const auto r = pattern_->row_index();
  const auto c = pattern_->col_index();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto u = atoms.u(k);
    const auto v = atoms.v(k);
    double* col = out.col(static_cast<Eigen::Index>(k)).data();
    for (std::size_t s = 0; s < measurements(); ++s) col[s] = u[r[s]] * v[c[s]];
  }
  return out;
}

std::unique_ptr<LinearMap> SamplingOperator::adjoint_map(std::span<const double> y) const {
  return std::make_unique<SparseMatrix>(pattern_, y);
}

// ---------------------------------------------------------------------------

IdentityOperator::IdentityOperator(std::size_t rows, std::size_t cols)
    : MeasurementOperator(rows, cols, rows * cols) {}

std::vector<double> IdentityOperator::apply_dense(const DenseMatrix& x) const {
  return std::vector<double>(x.values().begin(), x.values().end());
}

std::vector<double> IdentityOperator::apply_atoms(const AtomSet& atoms,
                                                  std::span<const double> coeffs) const {
  std::vector<double> out(measurements(), 0.0);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto u = atoms.u(k);
    const auto v = atoms.v(k);
    for (std::size_t i = 0; i < rows(); ++i) {
      const double scale = coeffs[k] * u[i];
      if (scale != 0.0) kernels::axpy(scale, v.data(), out.data() + i * cols(), cols());
    }
  }
  return out;
}

std::unique_ptr<LinearMap> IdentityOperator::adjoint_map(std::span<const double> y) const {
  return std::make_unique<DenseLinearMap>(
      DenseMatrix(rows(), cols(), std::vector<double>(y.begin(), y.end())));
}

}  // namespace admira
