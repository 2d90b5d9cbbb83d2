#include "sqe/special.hpp"

#include "sqe/error.hpp"

#include <cmath>

namespace sqe {

GaussHermiteRule gauss_hermite(Eigen::Index count) {
  if (count < 1) throw InvalidArgument("gauss_hermite: count must be >= 1");
  // Golub-Welsch: the Jacobi matrix of the orthonormal Hermite functions is the
  // position quadrature in the Fock basis.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (Eigen::Index n = 1; n < count; ++n) {
    jacobi(n - 1, n) = jacobi(n, n - 1) = std::sqrt(static_cast<double>(n) / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes = solver.eigenvalues();
  rule.scaled_weights.resize(count);
  // Christoffel numbers: w_q e^{y_q^2} = 1 / sum_n phi_n(y_q)^2. Using the
  // eigenvector components directly loses all precision at the outer nodes.
  for (Eigen::Index q = 0; q < count; ++q) {
    rule.scaled_weights(q) = 1.0 / hermite_functions<double>(count, rule.nodes(q)).squaredNorm();
  }
  return rule;
}

double half_falling_factorial(double k) {
  if (!(k > -0.5)) throw InvalidArgument("half_falling_factorial: k must exceed -1/2");
  return std::exp(std::lgamma(k + 1.0) - std::lgamma(k + 0.5));
}

double theta3(double z, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw InvalidArgument("theta3: nome must lie in [0, 1)");
  double sum = 1.0;
  for (long n = 1;; ++n) {
    const double nn = static_cast<double>(n);
    const double term = 2.0 * std::pow(q, nn * nn) * std::cos(2.0 * nn * z);
    sum += term;
    if (std::pow(q, nn * nn) < 1e-16) break;
  }
  return sum;
}

double binomial_over_power_of_two(int n, int j) {
  if (j < 0 || j > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) -
                  n * std::log(2.0));
}

}  // namespace sqe
