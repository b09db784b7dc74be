#include <algorithm>
#include <cmath>
#include <random>

#include "admira/analysis.hpp"
#include "admira/error.hpp"
#include "admira/experiment.hpp"
#include "admira/solver.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace admira;

TEST_CASE("identity operator: one iteration yields the best rank-r approximation") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 4 + gen() % 12, n = 4 + gen() % 12;
    const std::size_t r = 1 + gen() % 3;
    const oracle::Mat x = oracle::random_matrix(m, n, gen);
    const IdentityOperator op(m, n);
    const auto b = op.apply(oracle::to_dense(x));
    SolverConfig config;
    config.target_rank = r;
    config.max_iter = 1;
    const SolverReport report = admira_solve(op, b, config);
    REQUIRE(report.iterations == 1);
    const auto ref = oracle::jacobi_svd(x);
    const oracle::Mat expect = oracle::truncate(ref, r);
    CHECK(oracle::distance(expect, report.solution.to_dense()) <= 1e-8 * ref.sigma[0]);
  }
}

TEST_CASE("zero measurements give the zero matrix") {
  const GaussianOperator op(5, 5, 20, 1);
  const std::vector<double> b(20, 0.0);
  SolverConfig config;
  config.target_rank = 2;
  const SolverReport report = admira_solve(op, b, config);
  CHECK(report.solution.rank() == 0);
  CHECK(report.iterations == 0);
  CHECK(report.stop_reason == StopReason::tolerance);
}

TEST_CASE("invalid configuration and shapes are rejected") {
  const GaussianOperator op(5, 5, 20, 1);
  SolverConfig config;
  config.target_rank = 0;
  CHECK_THROWS_AS(admira_solve(op, std::vector<double>(20, 1.0), config), InvalidArgument);
  config.target_rank = 1;
  CHECK_THROWS_AS(admira_solve(op, std::vector<double>(19, 1.0), config), DimensionError);
  std::vector<double> bad(20, 1.0);
  bad[3] = NAN;
  CHECK_THROWS_AS(admira_solve(op, bad, config), InvalidArgument);
}

TEST_CASE("gaussian recovery converges with a monotone residual") {
  ProblemSpec spec;
  spec.m = 30;
  spec.n = 30;
  spec.r_true = 2;
  spec.kind = OperatorKind::gaussian;
  spec.p = 8 * degrees_of_freedom(30, 30, 2);
  spec.seed = 5;
  const Problem problem = generate_problem(spec);
  SolverConfig config;
  config.target_rank = 2;
  const SolverReport report = admira_solve(*problem.op, problem.b, config, &problem.x0);
  CHECK(report.stop_reason == StopReason::tolerance);
  CHECK(snr_recon(problem.x0, report.solution) >= 70.0);
  CHECK(report.error_trace.size() == report.iterations);
  CHECK(std::is_sorted(report.residual_trace.rbegin(), report.residual_trace.rend()));
  CHECK(report.residual_trace.back() < 1e-4);
}

TEST_CASE("solves are deterministic for a fixed seed") {
  ProblemSpec spec;
  spec.m = 40;
  spec.n = 35;
  spec.r_true = 3;
  spec.p = 800;
  spec.seed = 8;
  const Problem problem = generate_problem(spec);
  SolverConfig config;
  config.target_rank = 3;
  const SolverReport a = admira_solve(*problem.op, problem.b, config);
  const SolverReport b = admira_solve(*problem.op, problem.b, config);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual_trace == b.residual_trace);
  CHECK(a.solution.to_dense() == b.solution.to_dense());
}

TEST_CASE("least-squares method choice does not change the recovery") {
  ProblemSpec spec;
  spec.m = 30;
  spec.n = 30;
  spec.r_true = 2;
  spec.p = 500;
  spec.seed = 12;
  const Problem problem = generate_problem(spec);
  for (const auto method : {LeastSquaresMethod::qr, LeastSquaresMethod::cg}) {
    SolverConfig config;
    config.target_rank = 2;
    config.least_squares.method = method;
    const SolverReport report = admira_solve(*problem.op, problem.b, config);
    CHECK(snr_recon(problem.x0, report.solution) >= 70.0);
  }
}

TEST_CASE("iteration cap at 6(r+1)") {
  ProblemSpec spec;
  spec.m = 30;
  spec.n = 30;
  spec.r_true = 3;
  spec.p = 300;
  spec.snr_meas_db = 10.0;
  spec.seed = 2;
  const Problem problem = generate_problem(spec);
  SolverConfig config;
  config.target_rank = 3;
  config.cap_at_theoretical_bound = true;
  config.residual_tol = 1e-12;
  const SolverReport report = admira_solve(*problem.op, problem.b, config);
  CHECK(report.iterations <= 24);
}

TEST_CASE("rank search: incremental and bisection agree") {
  for (std::size_t r_true = 1; r_true <= 5; ++r_true) {
    ProblemSpec spec;
    spec.m = 40;
    spec.n = 40;
    spec.r_true = r_true;
    spec.kind = OperatorKind::gaussian;
    spec.p = 1500;
    spec.seed = 30 + r_true;
    const Problem problem = generate_problem(spec);
    SolverConfig config;
    config.max_iter = 60;
    const auto inc =
        rank_search(*problem.op, problem.b, 6, 1e-3, RankSearchMode::incremental, config);
    const auto bis =
        rank_search(*problem.op, problem.b, 6, 1e-3, RankSearchMode::bisection, config);
    CHECK(inc.feasible);
    CHECK(bis.feasible);
    CHECK(inc.rank == r_true);
    CHECK(bis.rank == r_true);
    CHECK(inc.residual_ratio <= 1e-3);
    CHECK(bis.residual_ratio <= 1e-3);
    CHECK(bis.probes.size() <= 4);
  }
}

TEST_CASE("rank search reports infeasibility") {
  ProblemSpec spec;
  spec.m = 20;
  spec.n = 20;
  spec.r_true = 6;
  spec.kind = OperatorKind::gaussian;
  spec.p = 350;
  spec.seed = 3;
  const Problem problem = generate_problem(spec);
  const auto result =
      rank_search(*problem.op, problem.b, 2, 1e-6, RankSearchMode::bisection, SolverConfig{});
  CHECK_FALSE(result.feasible);
  CHECK(result.rank == 2);
  CHECK(result.residual_ratio > 1e-6);
  CHECK_THROWS_AS(rank_search(*problem.op, problem.b, 0, 0.1, RankSearchMode::incremental, {}),
                  InvalidArgument);
}
