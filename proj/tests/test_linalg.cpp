#include <cmath>
#include <random>

#include "admira/error.hpp"
#include "admira/linalg.hpp"
#include "admira/sparse_matrix.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace admira;

namespace {

double max_sigma_diff(const FactoredMatrix& f, const std::vector<double>& sigma, std::size_t k) {
  double d = 0.0;
  for (std::size_t i = 0; i < k; ++i) d = std::max(d, std::abs(f.sigma(i) - sigma[i]));
  return d;
}

double orthonormality_defect(const Eigen::MatrixXd& q) {
  return (q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("dense matrix construction") {
  CHECK_THROWS_AS(DenseMatrix(0, 3), InvalidArgument);
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, NAN}), InvalidArgument);
  const DenseMatrix d = DenseMatrix::diagonal(std::vector<double>{3.0, 2.0, 1.0});
  CHECK(d(0, 0) == 3.0);
  CHECK(d(1, 2) == 0.0);
  CHECK(d.frobenius_norm() == doctest::Approx(std::sqrt(14.0)));
}

TEST_CASE("atom set rejects non-unit vectors") {
  AtomSet atoms(2, 2);
  const std::vector<double> unit{1.0, 0.0};
  const std::vector<double> longer{1.0, 1.0};
  CHECK_THROWS_AS(atoms.push_back(longer, unit), InvalidArgument);
  atoms.push_back(unit, unit);
  CHECK(atoms.size() == 1);
  CHECK_THROWS_AS(atoms.push_back(std::vector<double>{1.0}, unit), DimensionError);
}

TEST_CASE("full svd matches the Jacobi oracle") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + gen() % 12;
    const std::size_t n = 1 + gen() % 12;
    const auto x = oracle::random_matrix(m, n, gen);
    const auto ref = oracle::jacobi_svd(x);
    const FactoredMatrix f = full_svd(oracle::to_dense(x));
    REQUIRE(f.rank() == std::min(m, n));
    CHECK(max_sigma_diff(f, ref.sigma, f.rank()) <= 1e-10 * ref.sigma[0]);
    CHECK(oracle::distance(x, f.to_dense()) <= 1e-10 * ref.sigma[0]);
    CHECK(orthonormality_defect(f.atoms().left_matrix()) <= 1e-10);
    CHECK(orthonormality_defect(f.atoms().right_matrix()) <= 1e-10);
  }
}

TEST_CASE("sign convention puts a positive largest entry in u") {
  std::mt19937_64 gen(12);
  const auto f = full_svd(oracle::to_dense(oracle::random_matrix(6, 5, gen)));
  for (std::size_t k = 0; k < f.rank(); ++k) {
    const auto u = f.u(k);
    const auto it = std::max_element(u.begin(), u.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    CHECK(*it > 0.0);
  }
}

TEST_CASE("truncated svd agrees with the full svd on both paths") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 20 + gen() % 40;
    const std::size_t n = 20 + gen() % 40;
    const std::size_t k = 1 + gen() % 6;
    const DenseMatrix x = oracle::to_dense(oracle::random_matrix(m, n, gen));
    const auto ref = oracle::jacobi_svd(oracle::from(x));
    for (const SvdMode mode : {SvdMode::dense, SvdMode::lanczos}) {
      SvdOptions options;
      options.mode = mode;
      options.seed = trial;
      const FactoredMatrix t = truncated_svd(x, k, options);
      REQUIRE(t.rank() == k);
      CHECK(max_sigma_diff(t, ref.sigma, k) <= 1e-8 * ref.sigma[0]);
      CHECK(oracle::distance(oracle::truncate(ref, k), t.to_dense()) <= 1e-7 * ref.sigma[0]);
    }
  }
}

TEST_CASE("truncated svd stops at the numerical rank") {
  std::mt19937_64 gen(14);
  const DenseMatrix x = oracle::to_dense(oracle::random_low_rank(30, 25, 3, gen));
  for (const SvdMode mode : {SvdMode::dense, SvdMode::lanczos}) {
    SvdOptions options;
    options.mode = mode;
    const FactoredMatrix t = truncated_svd(x, 6, options);
    CHECK(t.rank() == 3);
    CHECK(frobenius_distance(x, t) <= 1e-9 * x.frobenius_norm());
  }
  CHECK(truncated_svd(DenseMatrix(4, 4), 2).rank() == 0);
}

TEST_CASE("lanczos on a sparse map") {
  std::mt19937_64 gen(15);
  const std::size_t m = 200, n = 150, nnz = 3000;
  std::vector<std::uint32_t> rows(nnz), cols(nnz);
  std::vector<double> values(nnz);
  std::normal_distribution<double> normal;
  for (std::size_t s = 0; s < nnz; ++s) {
    rows[s] = static_cast<std::uint32_t>(gen() % m);
    cols[s] = static_cast<std::uint32_t>(gen() % n);
    values[s] = normal(gen);
  }
  auto pattern = std::make_shared<SparsePattern>(m, n, rows, cols);
  const SparseMatrix sparse(pattern, values);
  const DenseMatrix dense = sparse.to_dense();
  const auto ref = oracle::jacobi_svd(oracle::from(dense));
  SvdOptions options;
  options.mode = SvdMode::lanczos;
  const FactoredMatrix t = truncated_svd(sparse, 8, options);
  CHECK(max_sigma_diff(t, ref.sigma, 8) <= 1e-8 * ref.sigma[0]);
}

TEST_CASE("sparse matrix products match the densified matrix") {
  std::mt19937_64 gen(16);
  const std::size_t m = 13, n = 9;
  std::vector<std::uint32_t> rows{0, 3, 3, 12, 5, 0};
  std::vector<std::uint32_t> cols{0, 8, 8, 1, 4, 7};
  std::vector<double> values{1.0, 2.0, -1.0, 4.0, 0.5, 3.0};
  const SparseMatrix s(std::make_shared<SparsePattern>(m, n, rows, cols), values);
  const DenseMatrix d = s.to_dense();
  CHECK(d(3, 8) == 1.0);
  std::vector<double> x(n), y(m), xt(m), yt(n);
  for (double& v : x) v = static_cast<double>(gen() % 7) - 3.0;
  for (double& v : xt) v = static_cast<double>(gen() % 5) - 2.0;
  s.multiply(x, y);
  s.multiply_transposed(xt, yt);
  for (std::size_t i = 0; i < m; ++i) {
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e += d(i, j) * x[j];
    CHECK(y[i] == doctest::Approx(e));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double e = 0.0;
    for (std::size_t i = 0; i < m; ++i) e += d(i, j) * xt[i];
    CHECK(yt[j] == doctest::Approx(e));
  }
}

TEST_CASE("svd of a factored matrix equals the svd of its densification") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 3 + gen() % 20;
    const std::size_t n = 3 + gen() % 20;
    const std::size_t k = 1 + gen() % 8;
    AtomSet atoms(m, n);
    std::vector<double> coeffs;
    std::normal_distribution<double> normal;
    for (std::size_t a = 0; a < k; ++a) {
      std::vector<double> u(m), v(n);
      for (double& x : u) x = normal(gen);
      for (double& x : v) x = normal(gen);
      const double nu = oracle::norm(u), nv = oracle::norm(v);
      for (double& x : u) x /= nu;
      for (double& x : v) x /= nv;
      atoms.push_back(u, v);
      coeffs.push_back(normal(gen));
    }
    const FactoredMatrix f = FactoredMatrix::from_coefficients(atoms, coeffs);
    const DenseMatrix dense = f.to_dense();
    const auto ref = oracle::jacobi_svd(oracle::from(dense));
    const FactoredMatrix s = svd_of_factored(f);
    CHECK(s.is_orthonormal());
    const std::size_t r = s.rank();
    CHECK(r <= std::min({m, n, k}));
    CHECK(max_sigma_diff(s, ref.sigma, r) <= 1e-10 * ref.sigma[0]);
    for (std::size_t i = r; i < ref.sigma.size(); ++i) CHECK(ref.sigma[i] <= 1e-10 * ref.sigma[0]);
    CHECK(frobenius_distance(dense, s) <= 1e-10 * ref.sigma[0]);
    CHECK(f.frobenius_norm() == doctest::Approx(dense.frobenius_norm()).epsilon(1e-10));
  }
}

TEST_CASE("best rank-r approximation beats random rank-r competitors") {
  std::mt19937_64 gen(18);
  const DenseMatrix x = oracle::to_dense(oracle::random_matrix(12, 10, gen));
  const FactoredMatrix svd = full_svd(x);
  for (std::size_t r = 1; r <= 4; ++r) {
    const FactoredMatrix best = best_rank_r(svd, r);
    CHECK(best.rank() == r);
    const double err = frobenius_distance(x, best);
    double tail = 0.0;
    for (std::size_t k = r; k < svd.rank(); ++k) tail += svd.sigma(k) * svd.sigma(k);
    CHECK(err == doctest::Approx(std::sqrt(tail)).epsilon(1e-10));
    CHECK(err * err + best.frobenius_norm() * best.frobenius_norm() ==
          doctest::Approx(x.frobenius_norm() * x.frobenius_norm()).epsilon(1e-10));
    CHECK(best_rank_r(best, r).to_dense() == best.to_dense());
    for (int c = 0; c < 50; ++c) {
      const DenseMatrix competitor = oracle::to_dense(oracle::random_low_rank(12, 10, r, gen));
      CHECK(oracle::dense_distance(x, competitor) >= err);
    }
  }
}

TEST_CASE("from_coefficients folds signs and drops zeros") {
  AtomSet atoms(2, 2);
  atoms.push_back(std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0});
  atoms.push_back(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0});
  atoms.push_back(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0});
  const std::vector<double> coeffs{-1.0, 3.0, 0.0};
  const FactoredMatrix f = FactoredMatrix::from_coefficients(atoms, coeffs);
  CHECK(f.rank() == 2);
  CHECK(f.sigma(0) == 3.0);
  CHECK(f.sigma(1) == 1.0);
  const DenseMatrix d = f.to_dense();
  CHECK(d(0, 0) == -1.0);
  CHECK(d(1, 1) == 3.0);
  CHECK(d(0, 1) == 0.0);
}
