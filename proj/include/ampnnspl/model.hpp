#ifndef AMPNNSPL_MODEL_HPP
#define AMPNNSPL_MODEL_HPP

#include "ampnnspl/common.hpp"
#include "ampnnspl/rng.hpp"
#include "ampnnspl/topology.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ampnnspl {

/// The pair (A, y): M x N sensing matrix and length-M observations of
/// y = A x + w with w ~ N(0, delta0 I).
struct MeasurementModel {
  Matrix A;
  Vector y;

  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.cols()); }

  void validate() const {
    if (A.rows() < 1 || A.cols() < 1) {
      throw std::invalid_argument("MeasurementModel: empty matrix");
    }
    if (y.size() != A.rows()) {
      throw std::invalid_argument(
          "MeasurementModel: y has length " + std::to_string(y.size()) +
          ", expected " + std::to_string(A.rows()));
    }
    if (!all_finite(A) || !all_finite(y)) {
      throw std::invalid_argument("MeasurementModel: non-finite entries");
    }
  }
};

/// Learned prior and noise parameters: spike-and-slab with per-element
/// sparse ratios lambda_i, slab N(mu0, tau0), noise variance delta0.
struct Hyperparams {
  double mu0 = 0.0;
  double tau0 = 1.0;
  double delta0 = 1.0;
  Vector lambda;

  void validate(int n, double lambda_eps = kLambdaEps) const {
    if (!(tau0 >= kVarFloor) || !(delta0 >= kVarFloor)) {
      throw std::invalid_argument("Hyperparams: variance below floor");
    }
    if (lambda.size() != n) {
      throw std::invalid_argument("Hyperparams: lambda has length " +
                                  std::to_string(lambda.size()) + ", expected " +
                                  std::to_string(n));
    }
    for (int i = 0; i < n; ++i) {
      const double l = lambda[i];
      if (!(l >= lambda_eps && l <= 1.0 - lambda_eps)) {
        throw std::invalid_argument("Hyperparams: lambda[" + std::to_string(i) +
                                    "] outside clamp range");
      }
    }
  }
};

/// Solver knobs. Defaults follow the reference protocol: t_max = 200,
/// eps_toc = 1e-6, initialization SNR guess 100, no damping.
struct SolverConfig {
  int t_max = 200;
  double eps_toc = 1e-6;
  double snr0 = 100.0;
  double damping = 1.0;  // in (0, 1]; 1 = plain updates
  double lambda_eps = kLambdaEps;

  TopologyKind topology_kind = TopologyKind::Chain1D;
  int grid_rows = 0;  // Grid2D only
  int grid_cols = 0;
  std::vector<std::vector<int>> custom_adjacency;  // Custom only

  bool log_trajectory = false;

  void validate() const {
    if (t_max < 1) throw std::invalid_argument("SolverConfig: t_max must be >= 1");
    if (!(eps_toc > 0.0)) throw std::invalid_argument("SolverConfig: eps_toc must be > 0");
    if (!(snr0 > 0.0)) throw std::invalid_argument("SolverConfig: snr0 must be > 0");
    if (!(damping > 0.0 && damping <= 1.0)) {
      throw std::invalid_argument("SolverConfig: damping must be in (0, 1]");
    }
    if (!(lambda_eps >= 0.0 && lambda_eps < 0.5)) {
      throw std::invalid_argument("SolverConfig: lambda_eps must be in [0, 0.5)");
    }
  }

  NeighborTopology make_topology(int n) const {
    if (topology_kind == TopologyKind::Custom) {
      auto topo = NeighborTopology::custom(custom_adjacency);
      if (topo.size() != n) {
        throw std::invalid_argument("SolverConfig: custom adjacency has " +
                                    std::to_string(topo.size()) +
                                    " entries, expected " + std::to_string(n));
      }
      return topo;
    }
    return build_topology(topology_kind, n, grid_rows, grid_cols);
  }
};

/// M x N matrix with i.i.d. standard normal entries (row-major draw order)
/// and columns normalized to unit l2 norm. A zero column, should one ever
/// occur, is redrawn.
inline Matrix generate_matrix(int m, int n, Rng& rng) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("generate_matrix: dimensions must be positive");
  }
  Matrix a(m, n);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      a(r, c) = rng.normal();
    }
  }
  for (int c = 0; c < n; ++c) {
    double norm = a.col(c).norm();
    while (norm == 0.0) {
      for (int r = 0; r < m; ++r) a(r, c) = rng.normal();
      norm = a.col(c).norm();
    }
    a.col(c) /= norm;
  }
  return a;
}

/// y = A x + w with w i.i.d. N(0, delta); delta = 0 returns A x exactly.
inline Vector measure(const Matrix& a, const Vector& x, double delta, Rng& rng) {
  if (x.size() != a.cols()) {
    throw std::invalid_argument("measure: x has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(a.cols()));
  }
  if (delta < 0.0 || !std::isfinite(delta) || !all_finite(a) || !all_finite(x)) {
    throw std::invalid_argument("measure: invalid model (non-finite input or delta < 0)");
  }
  Vector y = a * x;
  if (delta > 0.0) {
    const double sd = std::sqrt(delta);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
  }
  return y;
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_MODEL_HPP
