#ifndef AMPNNSPL_COMMON_HPP
#define AMPNNSPL_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ampnnspl {

// Dense row-major double-precision storage throughout; measurement matrices
// are small enough (M*N doubles) that anything fancier is not worth it.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Floor applied to every learned variance (tau0, delta0). EM drives the
// noise variance to exact zero on noiseless data, which would poison the
// subsequent logs and divisions.
inline constexpr double kVarFloor = 1e-12;

// Default clamp width for the sparse ratios: lambda in [eps, 1-eps].
// Set lambda_eps = 0 in SolverConfig to recover unclamped updates.
inline constexpr double kLambdaEps = 1e-8;

// Estimates with l2 norm beyond this are declared diverged.
inline constexpr double kDivergenceNorm = 1e12;

/// Thrown when a metric cannot be evaluated because the reference signal is
/// identically zero; the harness records such trials as excluded.
struct excluded_trial_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// File-level failures (open/parse/format). Messages carry path and, where
/// meaningful, a line number.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double clamp_unit_interval(double x, double eps) {
  const double lo = eps;
  const double hi = 1.0 - eps;
  return x < lo ? lo : (x > hi ? hi : x);
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace ampnnspl

#endif  // AMPNNSPL_COMMON_HPP
