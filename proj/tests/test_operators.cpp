#include <cmath>
#include <random>

#include "admira/error.hpp"
#include "admira/operators.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace admira;

namespace {

AtomSet random_atoms(std::size_t m, std::size_t n, std::size_t k, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  AtomSet atoms(m, n);
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<double> u(m), v(n);
    for (double& x : u) x = normal(gen);
    for (double& x : v) x = normal(gen);
    const double nu = oracle::norm(u), nv = oracle::norm(v);
    for (double& x : u) x /= nu;
    for (double& x : v) x /= nv;
    atoms.push_back(u, v);
  }
  return atoms;
}

std::unique_ptr<MeasurementOperator> make_operator(int kind, std::size_t m, std::size_t n,
                                                   std::uint64_t seed) {
  const std::size_t p = std::max<std::size_t>(1, m * n / 2);
  switch (kind) {
    case 0: return std::make_unique<GaussianOperator>(m, n, p, seed);
    case 1: return std::make_unique<SamplingOperator>(SamplingOperator::random(m, n, p, seed));
    default: return std::make_unique<IdentityOperator>(m, n);
  }
}

}  // namespace

TEST_CASE("operators match their explicit matrices") {
  std::mt19937_64 gen(21);
  for (int kind = 0; kind < 3; ++kind) {
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t m = 2 + gen() % 6, n = 2 + gen() % 6;
      const auto op = make_operator(kind, m, n, gen());
      const oracle::Mat a = oracle::operator_matrix(*op);
      const DenseMatrix x = oracle::to_dense(oracle::random_matrix(m, n, gen));

      const auto ax = op->apply(x);
      for (std::size_t s = 0; s < op->measurements(); ++s) {
        double e = 0.0;
        for (std::size_t c = 0; c < m * n; ++c) e += a(s, c) * x.values()[c];
        CHECK(ax[s] == doctest::Approx(e).epsilon(1e-12));
      }

      std::vector<double> y(op->measurements());
      std::normal_distribution<double> normal;
      for (double& v : y) v = normal(gen);
      const DenseMatrix aty = op->adjoint(y)->to_dense();
      for (std::size_t c = 0; c < m * n; ++c) {
        double e = 0.0;
        for (std::size_t s = 0; s < y.size(); ++s) e += a(s, c) * y[s];
        CHECK(aty.values()[c] == doctest::Approx(e).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adjoint identity <A X, y> = <X, A* y>") {
  std::mt19937_64 gen(22);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 120; ++trial) {
    const int kind = trial % 3;
    const std::size_t m = 2 + gen() % 15, n = 2 + gen() % 15;
    const auto op = make_operator(kind, m, n, gen());
    const DenseMatrix x = oracle::to_dense(oracle::random_matrix(m, n, gen));
    std::vector<double> y(op->measurements());
    for (double& v : y) v = normal(gen);
    const auto ax = op->apply(x);
    const DenseMatrix aty = op->adjoint(y)->to_dense();
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t s = 0; s < y.size(); ++s) lhs += ax[s] * y[s];
    for (std::size_t c = 0; c < x.size(); ++c) rhs += x.values()[c] * aty.values()[c];
    const double scale = oracle::norm(ax) * oracle::norm(y) + 1e-300;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
  }
}

TEST_CASE("adjoint map products match the dense adjoint") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> normal;
  for (int kind = 0; kind < 3; ++kind) {
    const auto op = make_operator(kind, 9, 7, 5);
    std::vector<double> y(op->measurements());
    for (double& v : y) v = normal(gen);
    const auto map = op->adjoint(y);
    const DenseMatrix d = map->to_dense();
    std::vector<double> x(7), out(9);
    for (double& v : x) v = normal(gen);
    map->multiply(x, out);
    for (std::size_t i = 0; i < 9; ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < 7; ++j) e += d(i, j) * x[j];
      CHECK(out[i] == doctest::Approx(e).epsilon(1e-12));
    }
  }
}

TEST_CASE("factored and atom paths agree with the dense path") {
  std::mt19937_64 gen(24);
  std::normal_distribution<double> normal;
  for (int kind = 0; kind < 3; ++kind) {
    const std::size_t m = 11, n = 8;
    const auto op = make_operator(kind, m, n, 77);
    const AtomSet atoms = random_atoms(m, n, 5, gen);
    std::vector<double> coeffs(5);
    for (double& c : coeffs) c = normal(gen);
    const FactoredMatrix f = FactoredMatrix::from_coefficients(atoms, coeffs);
    const auto dense = op->apply(f.to_dense());
    CHECK(oracle::max_abs_diff(op->apply(f), dense) <= 1e-12 * (1.0 + oracle::norm(dense)));
    CHECK(oracle::max_abs_diff(op->apply_combination(atoms, coeffs), dense) <=
          1e-12 * (1.0 + oracle::norm(dense)));

    const Eigen::MatrixXd images = op->atom_images(atoms);
    std::vector<double> y(op->measurements());
    for (double& v : y) v = normal(gen);
    const auto on_atoms = op->adjoint_on_atoms(y, atoms);
    const DenseMatrix aty = op->adjoint(y)->to_dense();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      std::vector<double> e(atoms.size(), 0.0);
      e[k] = 1.0;
      const auto col = op->apply_combination(atoms, e);
      for (std::size_t s = 0; s < col.size(); ++s) CHECK(images(s, k) == doctest::Approx(col[s]));
      double expect = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) expect += atoms.u(k)[i] * aty(i, j) * atoms.v(k)[j];
      CHECK(on_atoms[k] == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("sampling operator: A A* is the identity on R^p") {
  std::mt19937_64 gen(25);
  std::normal_distribution<double> normal;
  const auto op = SamplingOperator::random(20, 30, 150, 9);
  std::vector<double> y(150);
  for (double& v : y) v = normal(gen);
  const auto back = op.apply(op.adjoint(y)->to_dense());
  CHECK(oracle::max_abs_diff(back, y) == 0.0);
}

TEST_CASE("sampling positions are distinct, sorted and seed-determined") {
  const auto a = SamplingOperator::random(40, 50, 900, 3);
  const auto b = SamplingOperator::random(40, 50, 900, 3);
  const auto c = SamplingOperator::random(40, 50, 900, 4);
  bool differs = false;
  for (std::size_t s = 0; s < 900; ++s) {
    CHECK(a.position(s) == b.position(s));
    if (s > 0) CHECK(a.position(s - 1) < a.position(s));
    if (a.position(s) != c.position(s)) differs = true;
  }
  CHECK(differs);
  const auto full = SamplingOperator::random(3, 4, 12, 1);
  CHECK(full.position(11) == SamplingOperator::Index{2, 3});
  CHECK_THROWS_AS(SamplingOperator::random(3, 4, 13, 1), InvalidArgument);
  const std::vector<SamplingOperator::Index> dup{{0, 0}, {0, 0}};
  CHECK_THROWS_AS(SamplingOperator(3, 3, dup), InvalidArgument);
}

TEST_CASE("gaussian frames have variance 1/p") {
  const std::size_t m = 10, n = 10, p = 400;
  const GaussianOperator op(m, n, p, 5);
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < p; ++k)
    for (double v : op.frame(k)) {
      sum += v;
      sq += v * v;
    }
  const double count = static_cast<double>(p * m * n);
  CHECK(std::abs(sum / count) < 5.0 / std::sqrt(count * p));
  CHECK(sq / count == doctest::Approx(1.0 / p).epsilon(0.02));
  const GaussianOperator same(m, n, p, 5);
  CHECK(std::equal(op.frame(7).begin(), op.frame(7).end(), same.frame(7).begin()));
}

TEST_CASE("identity operator is an exact isometry") {
  const IdentityOperator op(6, 5);
  const RipEstimate est = estimate_delta(op, 3, 30, 1);
  CHECK(est.delta_lower <= 1e-12);
}

TEST_CASE("estimate_delta is a lower bound and nested-monotone in rank") {
  const std::size_t m = 6, n = 5, p = 20;
  const GaussianOperator op(m, n, p, 8);
  // delta over all matrices: the extreme eigenvalues of A^T A, from power
  // iteration on the explicit operator matrix. p < mn, so lambda_min = 0.
  const oracle::Mat a = oracle::operator_matrix(op);
  const oracle::Mat ata = oracle::multiply(oracle::transpose(a), a);
  std::vector<double> x(m * n, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> y(m * n, 0.0);
    for (std::size_t j = 0; j < m * n; ++j)
      for (std::size_t i = 0; i < m * n; ++i) y[i] += ata(i, j) * x[j];
    lambda = oracle::norm(y);
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / lambda;
  }
  const double delta_full = std::max(lambda - 1.0, 1.0);

  double previous = 0.0;
  for (std::size_t r = 1; r <= 5; ++r) {
    const RipEstimate est = estimate_delta(op, r, 40, 99);
    CHECK(est.rank == r);
    CHECK(est.delta_lower >= previous);
    CHECK(est.delta_lower <= delta_full + 1e-9);
    previous = est.delta_lower;
  }
  const RipEstimate threaded = estimate_delta(op, 3, 40, 99, 4);
  CHECK(threaded.delta_lower == estimate_delta(op, 3, 40, 99).delta_lower);
}

TEST_CASE("random_unit_low_rank has unit norm and orthonormal factors") {
  const FactoredMatrix x = random_unit_low_rank(9, 7, 3, 4);
  CHECK(x.rank() == 3);
  CHECK(x.is_orthonormal());
  CHECK(x.frobenius_norm() == doctest::Approx(1.0).epsilon(1e-12));
}
