#include "ampnnspl/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace ampnnspl;

TEST_CASE("nmse_db: exact recovery reports the sentinel") {
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  REQUIRE(nmse_db(x, x) == kNmseExactDb);
}

TEST_CASE("nmse_db: zero estimate is 0 dB") {
  Vector x(4);
  x << 1.0, 2.0, -1.0, 0.5;
  REQUIRE(nmse_db(Vector::Zero(4), x) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("nmse_db: scalar scaling") {
  Vector x(5);
  x << 1.0, -3.0, 2.0, 0.0, 4.0;
  const Vector xhat = 1.1 * x;
  REQUIRE(nmse_db(xhat, x) == Catch::Approx(-20.0).margin(1e-9));
}

TEST_CASE("nmse_db: zero reference signal is an excluded trial") {
  REQUIRE_THROWS_AS(nmse_db(Vector::Ones(3), Vector::Zero(3)), excluded_trial_error);
  REQUIRE_THROWS_AS(nmse_db(Vector::Ones(3), Vector::Zero(4)), std::invalid_argument);
}

TEST_CASE("pattern_match: identical supports") {
  Vector x(6);
  x << 0.0, 1.5, 0.0, -2.0, 0.0, 3.0;
  REQUIRE(pattern_match(x, x));
}

TEST_CASE("pattern_match: dropping one support coordinate fails") {
  Vector x(6);
  x << 0.0, 1.5, 0.0, -2.0, 0.0, 3.0;
  Vector xhat = x;
  xhat[3] = 0.0;
  REQUIRE_FALSE(pattern_match(xhat, x));
}

TEST_CASE("pattern_match: sub-threshold noise leaves the decision unchanged") {
  const double tol = 1e-4;
  Vector x(6);
  x << 0.0, 1.5, 0.0, -2.0, 0.0, 3.0;
  Vector xhat = x;
  for (int i = 0; i < 6; ++i) {
    if (x[i] == 0.0) xhat[i] = 0.5 * tol;
  }
  REQUIRE(pattern_match(xhat, x, tol));
  // At the threshold the entry counts as support.
  xhat[0] = tol;
  REQUIRE_FALSE(pattern_match(xhat, x, tol));
}
