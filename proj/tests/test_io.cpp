#include <sstream>

#include "admira/error.hpp"
#include "admira/text_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace admira;

TEST_CASE("matrix round trip is exact") {
  std::mt19937_64 gen(61);
  const DenseMatrix x = oracle::to_dense(oracle::random_matrix(4, 3, gen));
  std::stringstream s;
  s.precision(17);
  write_matrix(s, x);
  CHECK(read_matrix(s) == x);
}

TEST_CASE("factored round trip preserves triplets") {
  const FactoredMatrix x = random_unit_low_rank(6, 5, 3, 2);
  std::stringstream s;
  s.precision(17);
  write_factored(s, x);
  const FactoredMatrix y = read_factored(s);
  CHECK(y.rank() == 3);
  CHECK(y.is_orthonormal());
  CHECK(y.to_dense() == x.to_dense());
}

TEST_CASE("vector round trip") {
  const std::vector<double> v{1.5, -2.25, 1e-300};
  std::stringstream s;
  s.precision(17);
  write_vector(s, v);
  CHECK(read_vector(s) == v);
}

TEST_CASE("operator files") {
  const auto op = SamplingOperator::random(7, 9, 20, 4);
  std::stringstream s;
  write_operator(s, op);
  const std::string text = s.str();
  CHECK(text.rfind("7 9 20\n", 0) == 0);
  const auto back = read_operator(s);
  const auto* sampling = dynamic_cast<const SamplingOperator*>(back.get());
  REQUIRE(sampling != nullptr);
  for (std::size_t k = 0; k < 20; ++k) CHECK(sampling->position(k) == op.position(k));

  const GaussianOperator g(4, 5, 6, 99);
  std::stringstream gs;
  write_operator(gs, g);
  CHECK(gs.str() == "4 5 6 99\n");
  const auto gback = read_operator(gs);
  const DenseMatrix x = DenseMatrix::identity(4);
  CHECK_THROWS(g.apply(x));
  const DenseMatrix y(4, 5, std::vector<double>(20, 1.0));
  CHECK(gback->apply(y) == g.apply(y));

  std::stringstream identity;
  CHECK_THROWS_AS(write_operator(identity, IdentityOperator(2, 2)), InvalidArgument);
}

TEST_CASE("malformed input") {
  std::stringstream truncated("2 2\n1 2 3\n");
  CHECK_THROWS_AS(read_matrix(truncated), InvalidArgument);
  std::stringstream zero_index("3 3 1\n0 1\n");
  CHECK_THROWS_AS(read_operator(zero_index), InvalidArgument);
  std::stringstream header("3 3\n");
  CHECK_THROWS_AS(read_operator(header), InvalidArgument);
  CHECK_THROWS_AS(load_matrix("/nonexistent/x.txt"), InvalidArgument);
}
