#ifndef AMPNNSPL_METRICS_HPP
#define AMPNNSPL_METRICS_HPP

#include "ampnnspl/common.hpp"

#include <cmath>
#include <stdexcept>

namespace ampnnspl {

/// Sentinel for exact recovery, below anything representable by a nonzero
/// double-precision residual ratio.
inline constexpr double kNmseExactDb = -400.0;

/// 20 log10(||xhat - x|| / ||x||). Exact recovery reports kNmseExactDb.
/// Throws excluded_trial_error when ||x|| = 0 (undefined ratio).
inline double nmse_db(const Vector& xhat, const Vector& x) {
  if (xhat.size() != x.size()) {
    throw std::invalid_argument("nmse_db: length mismatch");
  }
  const double base = x.norm();
  if (base == 0.0) {
    throw excluded_trial_error("nmse_db: reference signal is zero; trial excluded");
  }
  const double diff = (xhat - x).norm();
  if (diff == 0.0) return kNmseExactDb;
  return 20.0 * std::log10(diff / base);
}

/// Exact support match under a magnitude threshold: entries with |.| >= tol
/// count as nonzero.
inline bool pattern_match(const Vector& xhat, const Vector& x, double tol = 1e-4) {
  if (xhat.size() != x.size()) {
    throw std::invalid_argument("pattern_match: length mismatch");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((std::abs(xhat[i]) >= tol) != (std::abs(x[i]) >= tol)) return false;
  }
  return true;
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_METRICS_HPP
