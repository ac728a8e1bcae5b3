#ifndef AMPNNSPL_AMP_HPP
#define AMPNNSPL_AMP_HPP

#include "ampnnspl/common.hpp"
#include "ampnnspl/denoiser.hpp"
#include "ampnnspl/learning.hpp"
#include "ampnnspl/model.hpp"
#include "ampnnspl/topology.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ampnnspl {

enum class SolveStatus { Converged, MaxIterations, Diverged };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Diverged: return "Diverged";
  }
  return "?";
}

/// Per-iteration quantities. V and Z hold the factor-side values of the
/// most recent factor update; Sigma, R, pi, m_post, v_post the matching
/// variable-side values.
struct AmpState {
  Vector xhat;    // posterior means, length N
  Vector nu;      // posterior variances, length N
  Vector V;       // factor variances, length M
  Vector Z;       // corrected residual means, length M
  Vector Sigma;   // effective channel variances, length N
  Vector R;       // pseudo-observations, length N
  Vector pi;      // support probabilities, length N
  Vector m_post;  // slab means, length N
  Vector v_post;  // slab variances, length N
  int t = 1;

  bool finite() const {
    return all_finite(xhat) && all_finite(nu) && all_finite(V) && all_finite(Z) &&
           all_finite(Sigma) && all_finite(R) && all_finite(pi) &&
           all_finite(m_post) && all_finite(v_post);
  }
};

struct TrajectoryPoint {
  double rel_change;
  double delta0;
  double mean_lambda;
};

struct SolveResult {
  Vector xhat;
  Hyperparams hp_final;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  std::vector<TrajectoryPoint> trajectory;  // empty unless cfg.log_trajectory
};

/// The AMP loop with EM hyperparameter learning interleaved.
///
/// A solver instance owns a copy of the problem and is single-threaded;
/// run several instances for concurrency.
class AmpSolver {
 public:
  AmpSolver(MeasurementModel mm, SolverConfig cfg)
      : mm_(std::move(mm)), cfg_(std::move(cfg)) {
    mm_.validate();
    cfg_.validate();
  }

  const MeasurementModel& model() const { return mm_; }
  const SolverConfig& config() const { return cfg_; }

  /// x_i = lambda_i mu0, nu_i = lambda_i (mu0^2 + tau0) - (lambda_i mu0)^2
  /// (prior mean and variance), V = 1, Z = y, t = 1.
  AmpState init_state(const Hyperparams& hp) const {
    hp.validate(mm_.n(), cfg_.lambda_eps);
    AmpState s;
    const int n = mm_.n();
    s.xhat.resize(n);
    s.nu.resize(n);
    for (int i = 0; i < n; ++i) {
      const double l = hp.lambda[i];
      const double mean = l * hp.mu0;
      s.xhat[i] = mean;
      s.nu[i] = l * (hp.mu0 * hp.mu0 + hp.tau0) - mean * mean;
    }
    s.V = Vector::Ones(mm_.m());
    s.Z = mm_.y;
    s.Sigma = Vector::Ones(n);
    s.R = Vector::Zero(n);
    s.pi = hp.lambda;
    s.m_post = Vector::Zero(n);
    s.v_post = Vector::Constant(n, hp.tau0);
    s.t = 1;
    return s;
  }

  /// Factor-node update:
  ///   V_a = sum_i A_ai^2 nu_i,
  ///   Z_a = (A xhat)_a - V_a (y_a - Z_a^prev) / (delta0 + V_a^prev).
  /// The correction (Onsager) term uses the previous iteration's V and Z.
  /// Each row of A is streamed once; the squares are formed on the fly
  /// rather than from a materialized A^2.
  void factor_update(AmpState& s, const Hyperparams& hp) const {
    const Eigen::Index m = mm_.A.rows();
    Vector v_new(m);
    Vector z_new(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto row = mm_.A.row(a);
      v_new[a] = row.cwiseAbs2().dot(s.nu);
      z_new[a] = row.dot(s.xhat);
    }
    z_new.array() -=
        v_new.array() * (mm_.y - s.Z).array() / (hp.delta0 + s.V.array());
    s.V = std::move(v_new);
    s.Z = std::move(z_new);
  }

  /// Variable-node update:
  ///   Sigma_i = [ sum_a A_ai^2 / (delta0 + V_a) ]^-1,
  ///   R_i = xhat_i + Sigma_i sum_a A_ai (y_a - Z_a) / (delta0 + V_a).
  /// Both column sums are accumulated in one pass over the rows of A.
  void variable_update(AmpState& s, const Hyperparams& hp) const {
    const Eigen::Index m = mm_.A.rows();
    const Eigen::Index n = mm_.A.cols();
    Vector precision = Vector::Zero(n);
    Vector weighted_resid = Vector::Zero(n);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto row = mm_.A.row(a).transpose();
      const double inv_denom = 1.0 / (hp.delta0 + s.V[a]);
      const double resid_w = (mm_.y[a] - s.Z[a]) * inv_denom;
      precision.noalias() += inv_denom * row.cwiseAbs2();
      weighted_resid.noalias() += resid_w * row;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(precision[i] > 0.0)) {
        throw std::domain_error("variable_update: degenerate matrix, column " +
                                std::to_string(i) + " carries no measurement energy");
      }
    }
    s.Sigma = precision.cwiseInverse();
    s.R = s.xhat + s.Sigma.cwiseProduct(weighted_resid);
  }

  /// One full sweep: factor update, variable update, posterior moments
  /// (with damping beta on xhat and nu), then the EM steps in order --
  /// lambda from the neighbor rule, (mu0, tau0) from the slab update with
  /// the pre-update mu0, delta0 from the residual update with the
  /// pre-update delta0. Advances t.
  void iterate_once(AmpState& s, Hyperparams& hp, const NeighborTopology& topo) const {
    factor_update(s, hp);
    variable_update(s, hp);

    const PosteriorBatch post = posterior_batch(s.R, s.Sigma, hp);
    s.pi = post.pi;
    s.m_post = post.m;
    s.v_post = post.v;
    const double beta = cfg_.damping;
    if (beta == 1.0) {
      s.xhat = post.ga;
      s.nu = post.gc;
    } else {
      s.xhat = beta * post.ga + (1.0 - beta) * s.xhat;
      s.nu = beta * post.gc + (1.0 - beta) * s.nu;
    }

    hp.lambda = update_lambda(s.pi, topo, cfg_.lambda_eps);
    const auto [mu_next, tau_next] =
        update_slab(s.pi, s.m_post, s.v_post, hp.mu0, hp.tau0);
    const double delta_next = update_noise(mm_.y, s.Z, s.V, hp.delta0);
    hp.mu0 = mu_next;
    hp.tau0 = tau_next;
    hp.delta0 = delta_next;

    s.t += 1;
  }

  /// Runs the loop from the standard initialization until the relative
  /// change in xhat drops below eps_toc, t_max sweeps elapse, or the state
  /// stops being finite (Diverged). Degenerate-matrix errors propagate.
  SolveResult solve() const {
    Hyperparams hp = init_hyperparams(mm_, cfg_);
    const NeighborTopology topo = cfg_.make_topology(mm_.n());
    AmpState s = init_state(hp);

    SolveResult out;
    out.status = SolveStatus::MaxIterations;
    Vector x_prev = s.xhat;
    int t = 0;
    for (t = 1; t <= cfg_.t_max; ++t) {
      iterate_once(s, hp, topo);

      if (!s.finite() || !std::isfinite(hp.mu0) || !std::isfinite(hp.tau0) ||
          !std::isfinite(hp.delta0) || s.xhat.norm() > kDivergenceNorm) {
        out.status = SolveStatus::Diverged;
        break;
      }

      const double base = x_prev.norm();
      const double change = (s.xhat - x_prev).norm();
      const double rel = base > 0.0 ? change / base
                                    : (s.xhat.norm() == 0.0 ? 0.0 : 1.0);
      if (cfg_.log_trajectory) {
        out.trajectory.push_back({rel, hp.delta0, hp.lambda.mean()});
      }
      // Zero denominator: treat the criterion as met only when the new
      // iterate is also exactly zero.
      const bool converged = base > 0.0 ? change < cfg_.eps_toc * base
                                        : s.xhat.norm() == 0.0;
      if (converged) {
        out.status = SolveStatus::Converged;
        break;
      }
      x_prev = s.xhat;
    }

    out.xhat = s.xhat;
    out.hp_final = hp;
    out.iterations = t > cfg_.t_max ? cfg_.t_max : t;
    return out;
  }

 private:
  MeasurementModel mm_;
  SolverConfig cfg_;
};

}  // namespace ampnnspl

#endif  // AMPNNSPL_AMP_HPP
