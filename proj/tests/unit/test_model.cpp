#include "ampnnspl/model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>

using namespace ampnnspl;

TEST_CASE("generate_matrix: 1x1 is a unit scalar") {
  for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
    Rng rng(seed);
    const Matrix a = generate_matrix(1, 1, rng);
    REQUIRE(std::abs(std::abs(a(0, 0)) - 1.0) < 1e-15);
  }
}

TEST_CASE("generate_matrix: columns are unit norm") {
  Rng rng(2024);
  const Matrix a = generate_matrix(3, 5, rng);
  for (int c = 0; c < 5; ++c) {
    REQUIRE(std::abs(a.col(c).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("generate_matrix: entries look standard normal before scaling") {
  // Column normalization preserves the sign pattern and, at M=50, leaves
  // the empirical mean of sqrt(M)-scaled entries near zero.
  Rng rng(7);
  const int m = 50, n = 100;
  const Matrix a = generate_matrix(m, n, rng);
  // Undo the per-column scale to recover the raw draws up to a constant.
  double mean = 0.0;
  for (int c = 0; c < n; ++c) {
    mean += a.col(c).sum();
  }
  mean *= std::sqrt(static_cast<double>(m)) / (m * n);
  REQUIRE(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(m) * n));
}

TEST_CASE("generate_matrix: deterministic in the seed") {
  Rng r1(123), r2(123), r3(124);
  const Matrix a = generate_matrix(8, 13, r1);
  const Matrix b = generate_matrix(8, 13, r2);
  const Matrix c = generate_matrix(8, 13, r3);
  REQUIRE(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
  REQUIRE(std::memcmp(a.data(), c.data(), sizeof(double) * a.size()) != 0);
}

TEST_CASE("generate_matrix: rejects empty dimensions") {
  Rng rng(1);
  REQUIRE_THROWS_AS(generate_matrix(0, 3, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_matrix(3, 0, rng), std::invalid_argument);
}

TEST_CASE("measure: identity and noiseless is exact") {
  Rng rng(5);
  Matrix a = Matrix::Identity(2, 2);
  Vector x(2);
  x << 1.0, 2.0;
  const Vector y = measure(a, x, 0.0, rng);
  REQUIRE(y[0] == 1.0);
  REQUIRE(y[1] == 2.0);
  REQUIRE((y - a * x).norm() == 0.0);
}

TEST_CASE("measure: zero matrix annihilates") {
  Rng rng(5);
  const Matrix a = Matrix::Zero(3, 4);
  const Vector x = Vector::Constant(4, 2.5);
  const Vector y = measure(a, x, 0.0, rng);
  REQUIRE(y.norm() == 0.0);
}

TEST_CASE("measure: noise variance matches delta") {
  // Monte-Carlo oracle: the sample variance of y - Ax over many repetitions
  // should sit within 5% of the requested variance.
  Rng rng(11);
  const Matrix a = generate_matrix(4, 8, rng);
  Vector x(8);
  x << 1, -1, 2, 0, 0, 3, -2, 1;
  const Vector clean = a * x;
  const double delta = 0.01;
  const int reps = 10000;
  double sum = 0.0, sum2 = 0.0;
  long count = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const Vector y = measure(a, x, delta, rng);
    for (int i = 0; i < 4; ++i) {
      const double w = y[i] - clean[i];
      sum += w;
      sum2 += w * w;
      ++count;
    }
  }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  REQUIRE(std::abs(var - delta) < 0.05 * delta);
}

TEST_CASE("measure: rejects non-finite inputs and bad dimensions") {
  Rng rng(3);
  Matrix a = Matrix::Identity(2, 2);
  Vector x(2);
  x << 1.0, 2.0;
  REQUIRE_THROWS_AS(measure(a, Vector::Ones(3), 0.0, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(measure(a, x, -1.0, rng), std::invalid_argument);
  Vector bad = x;
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(measure(a, bad, 0.0, rng), std::invalid_argument);
  a(1, 1) = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(measure(a, x, 0.0, rng), std::invalid_argument);
}

TEST_CASE("MeasurementModel and Hyperparams validation") {
  MeasurementModel mm;
  mm.A = Matrix::Identity(2, 2);
  mm.y = Vector::Ones(2);
  REQUIRE_NOTHROW(mm.validate());
  mm.y = Vector::Ones(3);
  REQUIRE_THROWS_AS(mm.validate(), std::invalid_argument);

  Hyperparams hp;
  hp.mu0 = 0.0;
  hp.tau0 = 1.0;
  hp.delta0 = 1.0;
  hp.lambda = Vector::Constant(4, 0.5);
  REQUIRE_NOTHROW(hp.validate(4));
  hp.lambda[2] = 0.0;  // below the clamp floor
  REQUIRE_THROWS_AS(hp.validate(4), std::invalid_argument);
  hp.lambda[2] = 0.5;
  hp.tau0 = 0.0;
  REQUIRE_THROWS_AS(hp.validate(4), std::invalid_argument);
}

TEST_CASE("SolverConfig validation and topology construction") {
  SolverConfig cfg;
  REQUIRE_NOTHROW(cfg.validate());
  cfg.damping = 0.0;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.damping = 1.0;

  cfg.topology_kind = TopologyKind::Grid2D;
  cfg.grid_rows = 2;
  cfg.grid_cols = 3;
  REQUIRE(cfg.make_topology(6).kind() == TopologyKind::Grid2D);
  REQUIRE_THROWS_AS(cfg.make_topology(7), std::invalid_argument);
}
