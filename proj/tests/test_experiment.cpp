#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "admira/analysis.hpp"
#include "admira/error.hpp"
#include "admira/experiment.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace admira;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "admira_test_experiment";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::filesystem::remove(path);
  std::filesystem::remove(sidecar_path(path, "trials"));
  std::filesystem::remove(sidecar_path(path, "timing"));
  return path;
}

}  // namespace

TEST_CASE("generated problems have the requested rank") {
  ProblemSpec spec;
  spec.m = 20;
  spec.n = 15;
  spec.r_true = 2;
  spec.p = 100;
  spec.seed = 1;
  const Problem problem = generate_problem(spec);
  const auto svd = oracle::jacobi_svd(oracle::from(problem.x0));
  CHECK(svd.sigma[1] > 1e-6 * svd.sigma[0]);
  CHECK(svd.sigma[2] <= 1e-10 * svd.sigma[0]);
  CHECK(problem.b.size() == 100);
  CHECK(problem.b == problem.b_clean);
}

TEST_CASE("measurement noise hits the requested SNR") {
  for (const double db : {0.0, 20.0, 37.5}) {
    ProblemSpec spec;
    spec.m = 30;
    spec.n = 30;
    spec.r_true = 3;
    spec.p = 400;
    spec.snr_meas_db = db;
    spec.seed = 9;
    const Problem problem = generate_problem(spec);
    CHECK(std::abs(snr_meas(problem.b_clean, problem.noise) - db) <= 1e-9);
    for (std::size_t s = 0; s < problem.b.size(); ++s)
      CHECK(problem.b[s] == problem.b_clean[s] + problem.noise[s]);
  }
}

TEST_CASE("generation is seed-determined") {
  ProblemSpec spec;
  spec.m = 12;
  spec.n = 10;
  spec.r_true = 2;
  spec.kind = OperatorKind::gaussian;
  spec.p = 60;
  spec.snr_meas_db = 15.0;
  spec.seed = 4;
  const Problem a = generate_problem(spec);
  const Problem b = generate_problem(spec);
  CHECK(a.b == b.b);
  CHECK(a.x0 == b.x0);
  spec.seed = 5;
  CHECK(generate_problem(spec).b != a.b);
}

TEST_CASE("spec validation and hashing") {
  ProblemSpec spec;
  spec.m = 4;
  spec.n = 4;
  spec.r_true = 5;
  spec.p = 10;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.r_true = 2;
  spec.p = 17;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.kind = OperatorKind::gaussian;
  CHECK_NOTHROW(spec.validate());
  const auto h = spec_hash(spec);
  CHECK(h == spec_hash(spec));
  spec.snr_meas_db = 20.0;
  CHECK(h != spec_hash(spec));
  CHECK(format_hash(0x1234).size() == 16);
  CHECK(parse_algorithm("svt") == Algorithm::svt);
  CHECK_THROWS_AS(parse_algorithm("nuclear"), InvalidArgument);
  CHECK_THROWS_AS(parse_operator_kind("fourier"), InvalidArgument);
}

TEST_CASE("table formulas") {
  CHECK(table1_measurements(500, 2) ==
        10 * static_cast<std::size_t>(std::ceil(std::pow(500.0, 1.2) * 2.0 * std::log10(500.0))));
  CHECK(std::llround(static_cast<double>(table1_measurements(500, 2)) /
                     static_cast<double>(degrees_of_freedom(500, 500, 2))) == 47);
  CHECK(degrees_of_freedom(100, 100, 2) == 396);
}

TEST_CASE("trials are independent of the thread count") {
  ProblemSpec spec;
  spec.m = 30;
  spec.n = 30;
  spec.r_true = 2;
  spec.p = 400;
  spec.seed = 3;
  ExperimentOptions options;
  options.trials = 6;
  const Algorithm algorithms[] = {Algorithm::admira, Algorithm::svt};
  options.threads = 1;
  const auto serial = run_trials(spec, algorithms, options);
  options.threads = 3;
  const auto threaded = run_trials(spec, algorithms, options);
  REQUIRE(serial.size() == 12);
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK(serial[k].trial == threaded[k].trial);
    CHECK(serial[k].algorithm == threaded[k].algorithm);
    CHECK(serial[k].snr_recon_db == threaded[k].snr_recon_db);
    CHECK(serial[k].iterations == threaded[k].iterations);
    CHECK(serial[k].stop_reason == threaded[k].stop_reason);
  }
}

TEST_CASE("noisy trials stop at the noise level unless told otherwise") {
  ProblemSpec spec;
  spec.m = 40;
  spec.n = 40;
  spec.r_true = 2;
  spec.p = 1500;
  spec.snr_meas_db = 20.0;
  spec.seed = 12;
  ExperimentOptions options;
  options.trials = 3;
  const Algorithm admira[] = {Algorithm::admira};
  const auto adaptive = run_trials(spec, admira, options);
  options.stop_at_noise_level = false;
  const auto fixed = run_trials(spec, admira, options);
  for (std::size_t k = 0; k < adaptive.size(); ++k) {
    CHECK(adaptive[k].stop_reason == "tol");
    CHECK(adaptive[k].iterations <= fixed[k].iterations);
    CHECK(std::abs(adaptive[k].snr_recon_db - fixed[k].snr_recon_db) < 3.0);
  }
}

TEST_CASE("failures are recorded rather than thrown") {
  ProblemSpec spec;
  spec.m = 10;
  spec.n = 10;
  spec.r_true = 2;
  spec.kind = OperatorKind::gaussian;
  spec.p = 60;
  spec.seed = 1;
  ExperimentOptions options;
  options.trials = 2;
  const Algorithm svt[] = {Algorithm::svt};
  const auto records = run_trials(spec, svt, options);
  for (const auto& r : records) {
    CHECK(r.stop_reason == "error");
    CHECK_FALSE(r.success());
  }
}

TEST_CASE("csv output is append-safe and reproducible") {
  const auto a = scratch("phase_a.csv");
  const auto b = scratch("phase_b.csv");
  ExperimentOptions options;
  options.trials = 3;
  const std::size_t p_grid[] = {150, 900};
  const std::size_t r_grid[] = {2};
  const Algorithm algorithms[] = {Algorithm::admira};
  options.threads = 1;
  write_csv(a, run_phase(30, p_grid, r_grid, algorithms, OperatorKind::sampling, options));
  options.threads = 2;
  write_csv(b, run_phase(30, p_grid, r_grid, algorithms, OperatorKind::sampling, options));
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(sidecar_path(a, "trials")) == slurp(sidecar_path(b, "trials")));

  const std::string once = slurp(a);
  write_csv(a, run_phase(30, p_grid, r_grid, algorithms, OperatorKind::sampling, options));
  const std::string twice = slurp(a);
  const auto header_end = once.find('\n');
  CHECK(twice == once + once.substr(header_end + 1));
  CHECK(once.rfind("spec_hash,", 0) == 0);

  std::istringstream lines(once);
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2);
  CHECK(sidecar_path("out/t.csv", "timing") == std::filesystem::path("out/t.timing.csv"));
}

TEST_CASE("table sweeps produce one row per cell") {
  ExperimentOptions options;
  options.trials = 2;
  const std::size_t ns[] = {40};
  const auto t1 = run_table1(ns, options);
  REQUIRE(t1.rows.size() == 1);
  CHECK(t1.rows[0].p == std::min<std::size_t>(table1_measurements(40, 2), 1600));
  CHECK(t1.trials.size() == 4);
  CHECK(t1.rows[0].snr_noisy < t1.rows[0].snr_noiseless);

  const std::size_t rs[] = {1, 2};
  const double densities[] = {0.3};
  const auto t2 = run_table2(40, rs, densities, options);
  CHECK(t2.rows.size() == 2);
  CHECK(t2.trials.size() == 8);
  CHECK(t2.rows[0].p == 480);
}
