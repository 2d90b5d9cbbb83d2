#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace sqe {

/// Normalized Hermite functions phi_0(x) ... phi_{count-1}(x),
///   phi_n(x) = exp(-x^2/2) H_n(x) / sqrt(2^n n! sqrt(pi)),
/// by the three-term recurrence (no factorials, stable for large n).
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> hermite_functions(Eigen::Index count, Real x) {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> out(count);
  if (count == 0) return out;
  using std::exp;
  using std::sqrt;
  const Real pi = std::numbers::pi_v<Real>;
  out(0) = exp(-x * x / Real(2)) / sqrt(sqrt(pi));
  if (count > 1) out(1) = sqrt(Real(2)) * x * out(0);
  for (Eigen::Index n = 2; n < count; ++n) {
    const Real nn = static_cast<Real>(n);
    out(n) = sqrt(Real(2) / nn) * x * out(n - 1) - sqrt((nn - Real(1)) / nn) * out(n - 2);
  }
  return out;
}

/// Gauss-Hermite rule for weight exp(-y^2) with `count` nodes. `scaled_weights`
/// holds w_q * exp(y_q^2) so that sum_q scaled_weights(q) * g(y_q) integrates
/// g(y) = exp(-y^2) * poly(y) exactly for poly degree <= 2*count-1.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd scaled_weights;
};

GaussHermiteRule gauss_hermite(Eigen::Index count);

/// (k)_{1/2} = Gamma(k+1) / Gamma(k+1/2), through log-gamma.
double half_falling_factorial(double k);

/// Third Jacobi theta function theta_3(z, q) = sum_n q^{n^2} e^{2 i n z} for
/// real z and 0 <= q < 1; terms are summed until they drop below 1e-16.
double theta3(double z, double q);

/// Binomial coefficient C(n, j) / 2^n evaluated in log space.
double binomial_over_power_of_two(int n, int j);

}  // namespace sqe
