#include <algorithm>
#include <cmath>
#include <numeric>

#include "admira/error.hpp"
#include "admira/operators.hpp"
#include "admira/parallel.hpp"
#include "admira/random.hpp"

namespace admira {
namespace {

struct NestedSample {
  AtomSet atoms;
  std::vector<double> weights;
};

// Draws `rank` orthonormal u's and v's one triplet at a time. The first q
// triplets only depend on the seed, never on `rank`.
NestedSample draw_nested(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd us(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rank));
  Eigen::MatrixXd vs(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(rank));
  NestedSample sample{AtomSet(rows, cols), {}};
  auto extend = [&rng](Eigen::MatrixXd& basis, Eigen::Index l) {
    Eigen::VectorXd x(basis.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = basis.leftCols(l).transpose() * x;
      x -= basis.leftCols(l) * c;
    }
    basis.col(l) = x.normalized();
  };
  for (std::size_t l = 0; l < rank; ++l) {
    const auto col = static_cast<Eigen::Index>(l);
    extend(us, col);
    extend(vs, col);
    sample.atoms.push_back(std::span<const double>(us.col(col).data(), rows),
                           std::span<const double>(vs.col(col).data(), cols));
    sample.weights.push_back(0.25 + rng.uniform());
  }
  return sample;
}

}  // namespace

FactoredMatrix random_unit_low_rank(std::size_t rows, std::size_t cols, std::size_t rank,
                                    std::uint64_t seed) {
  if (rank > std::min(rows, cols)) throw InvalidArgument("random_unit_low_rank: rank too large");
  NestedSample sample = draw_nested(rows, cols, rank, seed);
  const double norm = std::sqrt(std::inner_product(sample.weights.begin(), sample.weights.end(),
                                                   sample.weights.begin(), 0.0));
  std::vector<std::size_t> order(rank);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample.weights[a] > sample.weights[b];
  });
  AtomSet atoms(rows, cols);
  std::vector<double> sigmas;
  for (std::size_t k : order) {
    atoms.push_back(sample.atoms.u(k), sample.atoms.v(k));
    sigmas.push_back(sample.weights[k] / norm);
  }
  return FactoredMatrix(std::move(atoms), std::move(sigmas), true);
}

RipEstimate estimate_delta(const MeasurementOperator& op, std::size_t rank, std::size_t trials,
                           std::uint64_t seed, std::size_t threads) {
  if (trials == 0) throw InvalidArgument("estimate_delta: trials must be positive");
  if (rank == 0 || rank > std::min(op.rows(), op.cols())) {
    throw InvalidArgument("estimate_delta: rank must be in [1, min(m, n)]");
  }
  std::vector<double> worst(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const NestedSample sample = draw_nested(op.rows(), op.cols(), rank, mix_seed(seed, t));
    AtomSet prefix(op.rows(), op.cols());
    std::vector<double> coeffs;
    double weight_sq = 0.0;
    for (std::size_t q = 0; q < rank; ++q) {
      prefix.push_back(sample.atoms.u(q), sample.atoms.v(q));
      coeffs.push_back(sample.weights[q]);
      weight_sq += sample.weights[q] * sample.weights[q];
      const std::vector<double> image = op.apply_combination(prefix, coeffs);
      const double energy =
          std::inner_product(image.begin(), image.end(), image.begin(), 0.0) / weight_sq;
      worst[t] = std::max(worst[t], std::abs(energy - 1.0));
    }
  });
  return RipEstimate{rank, *std::max_element(worst.begin(), worst.end()), trials, seed};
}

}  // namespace admira
