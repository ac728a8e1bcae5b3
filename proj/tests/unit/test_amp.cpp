#include "ampnnspl/amp.hpp"

#include "ampnnspl/metrics.hpp"
#include "ampnnspl/signals.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

using namespace ampnnspl;

namespace {

// Shared 2x3 fixture; expected values frozen from an independent
// evaluation of the update formulas.
struct Fixture {
  MeasurementModel mm;
  Hyperparams hp;
  AmpState state;

  Fixture() {
    mm.A.resize(2, 3);
    mm.A << 0.6, -0.8, 0.2, 0.3, 0.5, -0.7;
    mm.y.resize(2);
    mm.y << 0.9, -0.4;
    hp.mu0 = 0.0;
    hp.tau0 = 1.0;
    hp.delta0 = 0.05;
    hp.lambda = Vector::Constant(3, 0.5);
    state.xhat.resize(3);
    state.xhat << 1.0, -2.0, 0.5;
    state.nu.resize(3);
    state.nu << 0.5, 0.25, 1.0;
    state.V.resize(2);
    state.V << 0.8, 0.3;
    state.Z.resize(2);
    state.Z << 0.2, 0.1;
    state.Sigma = Vector::Ones(3);
    state.R = Vector::Zero(3);
    state.pi = Vector::Constant(3, 0.5);
    state.m_post = Vector::Zero(3);
    state.v_post = Vector::Ones(3);
  }
};

MeasurementModel random_instance(int m, int n, std::uint64_t seed, Vector* x_out,
                                 const BlockSparseSpec& spec) {
  Rng rng(seed);
  MeasurementModel mm;
  mm.A = generate_matrix(m, n, rng);
  const Vector x = generate_block_sparse(spec, rng);
  mm.y = mm.A * x;
  if (x_out) *x_out = x;
  return mm;
}

}  // namespace

TEST_CASE("init_state: zero-mean prior gives zero estimate") {
  MeasurementModel mm;
  mm.A = Matrix::Identity(4, 4);
  mm.y = Vector::Ones(4);
  Hyperparams hp;
  hp.mu0 = 0.0;
  hp.tau0 = 1.0;
  hp.delta0 = 0.1;
  hp.lambda = Vector::Constant(4, 0.5);
  const AmpState s = AmpSolver(mm, SolverConfig{}).init_state(hp);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(s.xhat[i] == 0.0);
    REQUIRE(s.nu[i] == Catch::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("init_state: prior moments for an offset slab") {
  // lambda (mu0^2+tau0) - (lambda mu0)^2 = 0.5*10 - 2.25 = 2.75; also
  // checked by Monte-Carlo sampling of the prior below.
  MeasurementModel mm;
  mm.A = Matrix::Identity(2, 2);
  mm.y = Vector::Ones(2);
  Hyperparams hp;
  hp.mu0 = 3.0;
  hp.tau0 = 1.0;
  hp.delta0 = 0.1;
  hp.lambda = Vector::Constant(2, 0.5);
  const AmpState s = AmpSolver(mm, SolverConfig{}).init_state(hp);
  REQUIRE(s.xhat[0] == Catch::Approx(1.5).epsilon(1e-15));
  REQUIRE(s.nu[0] == Catch::Approx(2.75).epsilon(1e-15));

  Rng rng(6);
  double sum = 0.0, sum2 = 0.0;
  const int reps = 200000;
  for (int i = 0; i < reps; ++i) {
    const double x = rng.uniform01() < 0.5 ? rng.normal(3.0, 1.0) : 0.0;
    sum += x;
    sum2 += x * x;
  }
  const double mc_mean = sum / reps;
  const double mc_var = sum2 / reps - mc_mean * mc_mean;
  REQUIRE(std::abs(mc_mean - s.xhat[0]) < 0.02);
  REQUIRE(std::abs(mc_var - s.nu[0]) < 0.05);
}

TEST_CASE("init_state: V starts at one and Z at y, bit-exact") {
  Fixture f;
  const AmpState s = AmpSolver(f.mm, SolverConfig{}).init_state(f.hp);
  REQUIRE(s.t == 1);
  for (int a = 0; a < 2; ++a) {
    REQUIRE(s.V[a] == 1.0);
    REQUIRE(s.Z[a] == f.mm.y[a]);
  }
}

TEST_CASE("factor_update: first iteration correction vanishes") {
  Fixture f;
  const AmpSolver solver(f.mm, SolverConfig{});
  AmpState s = solver.init_state(f.hp);
  solver.factor_update(s, f.hp);
  const Vector expected = f.mm.A * s.xhat;
  for (int a = 0; a < 2; ++a) REQUIRE(s.Z[a] == Catch::Approx(expected[a]).margin(1e-15));
}

TEST_CASE("factor_update: zero variance kills both terms") {
  Fixture f;
  f.state.nu.setZero();
  const AmpSolver solver(f.mm, SolverConfig{});
  solver.factor_update(f.state, f.hp);
  const Vector expected = f.mm.A * f.state.xhat;
  for (int a = 0; a < 2; ++a) {
    REQUIRE(f.state.V[a] == 0.0);
    REQUIRE(f.state.Z[a] == Catch::Approx(expected[a]).margin(1e-15));
  }
}

TEST_CASE("factor_update: hand-evaluated fixture") {
  Fixture f;
  const AmpSolver solver(f.mm, SolverConfig{});
  solver.factor_update(f.state, f.hp);
  REQUIRE(f.state.V[0] == Catch::Approx(0.38).epsilon(1e-14));
  REQUIRE(f.state.V[1] == Catch::Approx(0.5974999999999999).epsilon(1e-14));
  REQUIRE(f.state.Z[0] == Catch::Approx(1.987058823529412).epsilon(1e-14));
  REQUIRE(f.state.Z[1] == Catch::Approx(-0.19642857142857129).epsilon(1e-12));
}

TEST_CASE("variable_update: scalar reduction") {
  MeasurementModel mm;
  mm.A = Matrix::Identity(1, 1);
  mm.y = Vector::Constant(1, 2.0);
  Hyperparams hp;
  hp.mu0 = 0.0;
  hp.tau0 = 1.0;
  hp.delta0 = 0.6;
  hp.lambda = Vector::Constant(1, 0.5);
  AmpState s;
  s.xhat = Vector::Constant(1, 0.3);
  s.nu = Vector::Constant(1, 0.0);
  s.V = Vector::Constant(1, 0.4);  // delta0 + V = 1
  s.Z = Vector::Constant(1, 0.5);
  const AmpSolver solver(mm, SolverConfig{});
  solver.variable_update(s, hp);
  REQUIRE(s.Sigma[0] == Catch::Approx(1.0).epsilon(1e-15));
  REQUIRE(s.R[0] == Catch::Approx(0.3 + (2.0 - 0.5)).epsilon(1e-15));
}

TEST_CASE("variable_update: zero residual leaves R at xhat") {
  Fixture f;
  const AmpSolver solver(f.mm, SolverConfig{});
  f.state.Z = f.mm.y;
  solver.variable_update(f.state, f.hp);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(f.state.R[i] == Catch::Approx(f.state.xhat[i]).margin(1e-15));
  }
}

TEST_CASE("variable_update: hand-evaluated fixture") {
  Fixture f;
  const AmpSolver solver(f.mm, SolverConfig{});
  // Continue from the factor fixture values.
  f.state.V.resize(2);
  f.state.V << 0.38, 0.5974999999999999;
  f.state.Z.resize(2);
  f.state.Z << 1.987058823529412, -0.19642857142857129;
  solver.variable_update(f.state, f.hp);
  REQUIRE(f.state.Sigma[0] == Catch::Approx(1.024374540103017).epsilon(1e-13));
  REQUIRE(f.state.Sigma[1] == Catch::Approx(0.5334834259436674).epsilon(1e-13));
  REQUIRE(f.state.Sigma[2] == Catch::Approx(1.176775147928994).epsilon(1e-13));
  REQUIRE(f.state.R[0] == Catch::Approx(-0.6504159942122554).epsilon(1e-12));
  REQUIRE(f.state.R[1] == Catch::Approx(-1.0049269717467362).epsilon(1e-12));
  REQUIRE(f.state.R[2] == Catch::Approx(0.16399358559992044).epsilon(1e-12));
}

TEST_CASE("variable_update: zero column is a degenerate-matrix error") {
  MeasurementModel mm;
  mm.A = Matrix::Zero(2, 2);
  mm.A(0, 0) = 1.0;
  mm.A(1, 0) = 1.0;  // column 1 is all zero
  mm.y = Vector::Ones(2);
  Hyperparams hp;
  hp.mu0 = 0.0;
  hp.tau0 = 1.0;
  hp.delta0 = 0.1;
  hp.lambda = Vector::Constant(2, 0.5);
  const AmpSolver solver(mm, SolverConfig{});
  AmpState s = solver.init_state(hp);
  solver.factor_update(s, hp);
  REQUIRE_THROWS_AS(solver.variable_update(s, hp), std::domain_error);
}

TEST_CASE("iterate_once: equals the composition of the step operations") {
  Fixture f;
  SolverConfig cfg;
  const AmpSolver solver(f.mm, cfg);
  const auto topo = NeighborTopology::chain_1d(3);

  AmpState manual = f.state;
  Hyperparams hp_manual = f.hp;
  solver.factor_update(manual, hp_manual);
  solver.variable_update(manual, hp_manual);
  const PosteriorBatch post = posterior_batch(manual.R, manual.Sigma, hp_manual);
  const Vector lambda_next = update_lambda(post.pi, topo, cfg.lambda_eps);
  const auto [mu_next, tau_next] =
      update_slab(post.pi, post.m, post.v, hp_manual.mu0, hp_manual.tau0);
  const double delta_next = update_noise(f.mm.y, manual.Z, manual.V, hp_manual.delta0);

  AmpState s = f.state;
  Hyperparams hp = f.hp;
  solver.iterate_once(s, hp, topo);

  REQUIRE(s.t == f.state.t + 1);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(s.xhat[i] == post.ga[i]);
    REQUIRE(s.nu[i] == post.gc[i]);
    REQUIRE(hp.lambda[i] == lambda_next[i]);
  }
  REQUIRE(hp.mu0 == mu_next);
  REQUIRE(hp.tau0 == tau_next);
  REQUIRE(hp.delta0 == delta_next);
}

TEST_CASE("iterate_once: beta = 1 equals the undamped posterior output") {
  Fixture f;
  SolverConfig cfg;
  cfg.damping = 1.0;
  const AmpSolver solver(f.mm, cfg);
  const auto topo = NeighborTopology::chain_1d(3);
  AmpState s = f.state;
  Hyperparams hp = f.hp;
  solver.iterate_once(s, hp, topo);
  const PosteriorBatch post = posterior_batch(s.R, s.Sigma, f.hp);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(s.xhat[i] == post.ga[i]);
    REQUIRE(s.nu[i] == post.gc[i]);
  }
}

TEST_CASE("iterate_once: damping blends toward the previous iterate") {
  Fixture f;
  SolverConfig cfg_plain;
  SolverConfig cfg_damped;
  cfg_damped.damping = 0.25;
  const auto topo = NeighborTopology::chain_1d(3);

  AmpState plain = f.state;
  Hyperparams hp_plain = f.hp;
  AmpSolver(f.mm, cfg_plain).iterate_once(plain, hp_plain, topo);

  AmpState damped = f.state;
  Hyperparams hp_damped = f.hp;
  AmpSolver(f.mm, cfg_damped).iterate_once(damped, hp_damped, topo);

  for (int i = 0; i < 3; ++i) {
    const double expected = 0.25 * plain.xhat[i] + 0.75 * f.state.xhat[i];
    REQUIRE(damped.xhat[i] == Catch::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("iterate_once: full-set topology makes lambda constant") {
  Fixture f;
  SolverConfig cfg;
  const AmpSolver solver(f.mm, cfg);
  const auto topo = NeighborTopology::full_set(3);
  AmpState s = f.state;
  Hyperparams hp = f.hp;
  solver.iterate_once(s, hp, topo);
  REQUIRE(hp.lambda[0] == hp.lambda[1]);
  REQUIRE(hp.lambda[1] == hp.lambda[2]);
  REQUIRE(hp.lambda[0] == Catch::Approx(s.pi.mean()).epsilon(1e-15));
}

TEST_CASE("iterate_once: huge noise variance shrinks toward the prior mean") {
  Fixture f;
  f.hp.mu0 = 2.0;
  f.hp.delta0 = 1e9;  // >> ||y||^2
  SolverConfig cfg;
  const AmpSolver solver(f.mm, cfg);
  AmpState s = solver.init_state(f.hp);
  solver.factor_update(s, f.hp);
  solver.variable_update(s, f.hp);
  const PosteriorBatch post = posterior_batch(s.R, s.Sigma, f.hp);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(std::abs(post.ga[i] - f.hp.lambda[i] * f.hp.mu0) < 1e-3);
  }
}

TEST_CASE("solve: zero measurements converge to zero") {
  MeasurementModel mm;
  Rng rng(3);
  mm.A = generate_matrix(6, 10, rng);
  mm.y = Vector::Zero(6);
  SolverConfig cfg;
  const SolveResult res = AmpSolver(mm, cfg).solve();
  REQUIRE(res.status == SolveStatus::Converged);
  REQUIRE(res.xhat.norm() == 0.0);
}

TEST_CASE("solve: seeded block-sparse instance recovers") {
  BlockSparseSpec spec;
  Vector x;
  const MeasurementModel mm = random_instance(60, 100, 20240131, &x, spec);
  SolverConfig cfg;
  cfg.topology_kind = TopologyKind::Chain1D;
  const SolveResult res = AmpSolver(mm, cfg).solve();
  REQUIRE(res.status == SolveStatus::Converged);
  REQUIRE(nmse_db(res.xhat, x) < -60.0);
  REQUIRE(res.iterations <= cfg.t_max);
}

TEST_CASE("solve: deterministic given the instance") {
  BlockSparseSpec spec;
  Vector x;
  const MeasurementModel mm = random_instance(50, 100, 77, &x, spec);
  SolverConfig cfg;
  const SolveResult a = AmpSolver(mm, cfg).solve();
  const SolveResult b = AmpSolver(mm, cfg).solve();
  REQUIRE(a.status == b.status);
  REQUIRE(a.iterations == b.iterations);
  REQUIRE(std::memcmp(a.xhat.data(), b.xhat.data(), sizeof(double) * a.xhat.size()) == 0);
  REQUIRE(a.hp_final.delta0 == b.hp_final.delta0);
}

TEST_CASE("solve: trajectory logging is off by default and bounded") {
  BlockSparseSpec spec;
  Vector x;
  const MeasurementModel mm = random_instance(50, 100, 5150, &x, spec);
  SolverConfig cfg;
  const SolveResult quiet = AmpSolver(mm, cfg).solve();
  REQUIRE(quiet.trajectory.empty());
  cfg.log_trajectory = true;
  const SolveResult logged = AmpSolver(mm, cfg).solve();
  REQUIRE(logged.trajectory.size() == static_cast<std::size_t>(logged.iterations));
  REQUIRE(logged.iterations <= cfg.t_max);
}
