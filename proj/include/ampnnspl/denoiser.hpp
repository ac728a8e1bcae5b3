#ifndef AMPNNSPL_DENOISER_HPP
#define AMPNNSPL_DENOISER_HPP

#include "ampnnspl/common.hpp"
#include "ampnnspl/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ampnnspl {

/// One decoupled scalar channel R = x + w~ with w~ ~ N(0, sigma).
struct ScalarChannel {
  double r;
  double sigma;
};

/// Posterior of x under the spike-and-slab prior given a scalar Gaussian
/// channel: (1-pi) delta(x) + pi N(x; m, v), plus the first two posterior
/// moments ga (mean) and gc (variance).
struct PosteriorMoments {
  double pi;
  double m;
  double v;
  double ga;
  double gc;
};

namespace detail {

// log(lambda / (1 - lambda))
inline double logit(double lambda) {
  return std::log(lambda) - std::log1p(-lambda);
}

// 1 / (1 + exp(-z)), argument clamped so exp never overflows.
inline double logistic(double z) {
  if (z > 500.0) z = 500.0;
  if (z < -500.0) z = -500.0;
  return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace detail

/// Scalar spike-and-slab posterior.
///
/// Slab moments are the Gaussian product
///   v = tau0 sigma / (sigma + tau0),
///   m = (tau0 r + sigma mu0) / (sigma + tau0),
/// and the support probability comes from the log evidence ratio
///   L = -log1p(tau0/sigma)/2 + r^2/(2 sigma) - (r - mu0)^2/(2 (sigma + tau0)),
///   pi = logistic(logit(lambda) + L).
/// Working in the log domain keeps pi finite where the literal ratio
/// lambda / (lambda + (1-lambda) exp(-L)) would overflow (L grows like
/// r^2 / 2 sigma).
inline PosteriorMoments posterior(ScalarChannel ch, double mu0, double tau0,
                                  double lambda) {
  if (!(ch.sigma > 0.0) || !std::isfinite(ch.sigma) || !std::isfinite(ch.r)) {
    throw std::domain_error("posterior: channel requires finite r and sigma > 0");
  }
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
    throw std::domain_error("posterior: tau0 must be positive and finite");
  }

  const double total = ch.sigma + tau0;
  const double v = tau0 * ch.sigma / total;
  const double m = (tau0 * ch.r + ch.sigma * mu0) / total;
  const double log_evidence = -0.5 * std::log1p(tau0 / ch.sigma) +
                              ch.r * ch.r / (2.0 * ch.sigma) -
                              (ch.r - mu0) * (ch.r - mu0) / (2.0 * total);
  const double pi = detail::logistic(detail::logit(lambda) + log_evidence);

  PosteriorMoments out;
  out.pi = pi;
  out.m = m;
  out.v = v;
  out.ga = pi * m;
  // pi (m^2 + v) - ga^2 rearranged to a sum of nonnegative terms.
  out.gc = pi * (v + (1.0 - pi) * m * m);
  return out;
}

struct PosteriorBatch {
  Vector pi;
  Vector m;
  Vector v;
  Vector ga;
  Vector gc;
};

/// Element-wise posterior over N channels; hp.lambda supplies lambda_i.
inline PosteriorBatch posterior_batch(const Vector& r, const Vector& sigma,
                                      const Hyperparams& hp) {
  const Eigen::Index n = r.size();
  if (sigma.size() != n || hp.lambda.size() != n) {
    throw std::invalid_argument("posterior_batch: length mismatch");
  }
  PosteriorBatch out;
  out.pi.resize(n);
  out.m.resize(n);
  out.v.resize(n);
  out.ga.resize(n);
  out.gc.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      const PosteriorMoments pm =
          posterior({r[i], sigma[i]}, hp.mu0, hp.tau0, hp.lambda[i]);
      out.pi[i] = pm.pi;
      out.m[i] = pm.m;
      out.v[i] = pm.v;
      out.ga[i] = pm.ga;
      out.gc[i] = pm.gc;
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(e.what()) + " (at index " +
                              std::to_string(i) + ")");
    }
  }
  return out;
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_DENOISER_HPP
