#ifndef AMPNNSPL_LEARNING_HPP
#define AMPNNSPL_LEARNING_HPP

#include "ampnnspl/common.hpp"
#include "ampnnspl/model.hpp"
#include "ampnnspl/topology.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace ampnnspl {

/// Nearest-neighbor sparse-ratio update: each lambda_i becomes the mean of
/// its neighbors' posterior support probabilities, clamped to
/// [lambda_eps, 1 - lambda_eps].
///
/// FullSet assigns the single global mean to every element (the rule then
/// degenerates to a shared Bernoulli-Gaussian ratio); Independent copies
/// pi through unchanged, the plain per-element EM update.
inline Vector update_lambda(const Vector& pi, const NeighborTopology& topo,
                            double lambda_eps = kLambdaEps) {
  const int n = static_cast<int>(pi.size());
  if (topo.size() != n) {
    throw std::invalid_argument("update_lambda: topology size " +
                                std::to_string(topo.size()) + " != pi length " +
                                std::to_string(n));
  }
  Vector lambda(n);
  switch (topo.kind()) {
    case TopologyKind::Independent:
      for (int i = 0; i < n; ++i) {
        lambda[i] = clamp_unit_interval(pi[i], lambda_eps);
      }
      break;
    case TopologyKind::FullSet: {
      // One shared mean, computed once, so every entry is bit-identical.
      const double mean = clamp_unit_interval(pi.mean(), lambda_eps);
      lambda.setConstant(mean);
      break;
    }
    default: {
      const auto& adj = topo.adjacency();
      for (int i = 0; i < n; ++i) {
        const auto& nbrs = adj[i];
        if (nbrs.empty()) {
          throw std::invalid_argument("update_lambda: empty neighbor set at index " +
                                      std::to_string(i));
        }
        double sum = 0.0;
        for (int j : nbrs) sum += pi[j];
        lambda[i] = clamp_unit_interval(sum / static_cast<double>(nbrs.size()),
                                        lambda_eps);
      }
      break;
    }
  }
  return lambda;
}

/// Noise-variance EM update,
///   delta' = mean_a[ (y_a - Z_a)^2 / (1 + V_a/delta)^2
///            + delta V_a / (delta + V_a) ],
/// floored at kVarFloor (noiseless data would otherwise drive it to zero).
inline double update_noise(const Vector& y, const Vector& z, const Vector& v,
                           double delta_prev) {
  const Eigen::Index m = y.size();
  if (z.size() != m || v.size() != m) {
    throw std::invalid_argument("update_noise: length mismatch");
  }
  if (!(delta_prev > 0.0)) {
    throw std::invalid_argument("update_noise: delta_prev must be positive");
  }
  double sum = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    const double resid = y[a] - z[a];
    const double shrink = 1.0 + v[a] / delta_prev;
    sum += resid * resid / (shrink * shrink) + delta_prev * v[a] / (delta_prev + v[a]);
  }
  const double delta_next = sum / static_cast<double>(m);
  return delta_next < kVarFloor ? kVarFloor : delta_next;
}

/// Slab mean/variance EM updates,
///   mu'  = sum_i pi_i m_i / sum_i pi_i,
///   tau' = sum_i pi_i [ (mu - m_i)^2 + V_i ] / sum_i pi_i,
/// where tau' uses the pre-update mu (the incremental form, as printed).
/// If all posterior mass sits on the spike (sum pi == 0) both parameters
/// hold their previous values. tau' is floored at kVarFloor.
inline std::pair<double, double> update_slab(const Vector& pi, const Vector& m_post,
                                             const Vector& v_post, double mu_prev,
                                             double tau_prev) {
  const Eigen::Index n = pi.size();
  if (m_post.size() != n || v_post.size() != n) {
    throw std::invalid_argument("update_slab: length mismatch");
  }
  double pi_sum = 0.0;
  double mu_num = 0.0;
  double tau_num = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = mu_prev - m_post[i];
    pi_sum += pi[i];
    mu_num += pi[i] * m_post[i];
    tau_num += pi[i] * (d * d + v_post[i]);
  }
  if (pi_sum <= 0.0) {
    return {mu_prev, tau_prev};
  }
  const double mu_next = mu_num / pi_sum;
  double tau_next = tau_num / pi_sum;
  if (tau_next < kVarFloor) tau_next = kVarFloor;
  return {mu_next, tau_next};
}

/// Starting hyperparameters:
///   lambda_i = 1/2,
///   delta0 = ||y||^2 / (M (snr0 + 1)),
///   mu0 = 0,
///   tau0 = (||y||^2 - M delta0) / (lambda ||A||_F^2),
/// with both variances floored. y = 0 degenerates to the floors.
inline Hyperparams init_hyperparams(const MeasurementModel& mm,
                                    const SolverConfig& cfg) {
  const double fro2 = mm.A.squaredNorm();
  if (!(fro2 > 0.0)) {
    throw std::invalid_argument("init_hyperparams: matrix has zero Frobenius norm");
  }
  const double y2 = mm.y.squaredNorm();
  const double m = static_cast<double>(mm.m());

  Hyperparams hp;
  hp.lambda = Vector::Constant(mm.n(), 0.5);
  hp.delta0 = y2 / (m * (cfg.snr0 + 1.0));
  if (hp.delta0 < kVarFloor) hp.delta0 = kVarFloor;
  hp.mu0 = 0.0;
  hp.tau0 = (y2 - m * hp.delta0) / (0.5 * fro2);
  if (!(hp.tau0 >= kVarFloor)) hp.tau0 = kVarFloor;
  return hp;
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_LEARNING_HPP
