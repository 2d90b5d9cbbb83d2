#pragma once

// Dense linear algebra over truncated Fock bases {|0>, ..., |N-1>}.
//
// Conventions: hbar = 1, x = (a^dag + a)/sqrt(2), p = i(a^dag - a)/sqrt(2),
// [x, p] = i. Two-mode objects use the composite index n1 * N + n2 (mode 1
// major). Everything here is templated on the real scalar; the rest of the
// library works in double through the aliases at the bottom.

#include "sqe/error.hpp"
#include "sqe/special.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace sqe {

using Index = Eigen::Index;

template <typename Real>
using FockMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using FockVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kNormTolerance = 1e-12;

inline void require_dim(Index n, const char* who) {
  if (n < 1) throw InvalidArgument(std::string(who) + ": dimension must be >= 1");
}

// ---------------------------------------------------------------------------
// States

/// Unit-norm pure state in a truncated Fock basis.
template <typename Real>
class FockStateT {
 public:
  using Vector = FockVectorT<Real>;

  static FockStateT from_amplitudes(Vector amplitudes) {
    if (amplitudes.size() < 1) throw InvalidArgument("FockState: empty amplitude vector");
    const Real norm = amplitudes.norm();
    if (!(norm > Real(0)) || !std::isfinite(static_cast<double>(norm))) {
      throw InvalidArgument("FockState: amplitude vector has zero or non-finite norm");
    }
    amplitudes /= norm;
    return FockStateT(std::move(amplitudes));
  }

  static FockStateT basis(Index dim, Index n) {
    require_dim(dim, "FockState::basis");
    if (n < 0 || n >= dim) throw InvalidArgument("FockState::basis: level outside the space");
    Vector v = Vector::Zero(dim);
    v(n) = Real(1);
    return FockStateT(std::move(v));
  }

  static FockStateT vacuum(Index dim) { return basis(dim, 0); }

  Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  std::complex<Real> operator[](Index n) const { return amplitudes_(n); }

  FockStateT embedded(Index dim) const {
    if (dim < this->dim()) throw InvalidArgument("FockState::embedded: target dimension is smaller");
    Vector v = Vector::Zero(dim);
    v.head(this->dim()) = amplitudes_;
    return FockStateT(std::move(v));
  }

  /// Projection onto the first `dim` levels, renormalized. `lost` receives the
  /// discarded probability 1 - |P psi|^2.
  FockStateT cropped(Index dim, Real* lost = nullptr) const {
    require_dim(dim, "FockState::cropped");
    if (dim >= this->dim()) {
      if (lost) *lost = Real(0);
      return embedded(dim);
    }
    Vector head = amplitudes_.head(dim);
    if (lost) *lost = std::max(Real(0), Real(1) - head.squaredNorm());
    return from_amplitudes(std::move(head));
  }

  /// Re <psi|op|psi>.
  Real expectation(const FockMatrixT<Real>& op) const {
    if (op.rows() != dim() || op.cols() != dim()) {
      throw ContractViolation("FockState::expectation: operator and state dimensions differ");
    }
    return amplitudes_.dot(op * amplitudes_).real();
  }

 private:
  explicit FockStateT(Vector v) : amplitudes_(std::move(v)) {}
  Vector amplitudes_;
};

// ---------------------------------------------------------------------------
// Elementary operators

template <typename Real = double>
FockMatrixT<Real> annihilation(Index n) {
  require_dim(n, "annihilation");
  FockMatrixT<Real> a = FockMatrixT<Real>::Zero(n, n);
  for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<Real>(k));
  return a;
}

template <typename Real = double>
FockMatrixT<Real> number_operator(Index n) {
  require_dim(n, "number_operator");
  FockMatrixT<Real> m = FockMatrixT<Real>::Zero(n, n);
  for (Index k = 0; k < n; ++k) m(k, k) = static_cast<Real>(k);
  return m;
}

template <typename Real>
struct QuadraturesT {
  FockMatrixT<Real> x;
  FockMatrixT<Real> p;
};

template <typename Real = double>
QuadraturesT<Real> quadratures(Index n) {
  const FockMatrixT<Real> a = annihilation<Real>(n);
  const FockMatrixT<Real> ad = a.adjoint();
  const Real s = Real(1) / std::sqrt(Real(2));
  const std::complex<Real> i(0, 1);
  return {(ad + a) * s, i * s * (ad - a)};
}

// ---------------------------------------------------------------------------
// Hermitian spectral calculus

template <typename Derived>
auto hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Relative test: max|M - M^dag| <= tol * max(1, max|M|).
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermitianTolerance) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
  return static_cast<double>(hermiticity_error(m)) <= tol * scale;
}

template <typename Real>
struct EigenDecompositionT {
  RealVectorT<Real> values;   // ascending
  FockMatrixT<Real> vectors;  // orthonormal columns

  FockMatrixT<Real> reconstruct() const {
    return vectors * values.template cast<std::complex<Real>>().asDiagonal() * vectors.adjoint();
  }
};

template <typename Real>
EigenDecompositionT<Real> hermitian_eig(const FockMatrixT<Real>& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ContractViolation("hermitian_eig: matrix must be square and non-empty");
  }
  if (!is_hermitian(m)) {
    throw ContractViolation("hermitian_eig: matrix is not Hermitian (max|M - M^dag| = " +
                            std::to_string(static_cast<double>(hermiticity_error(m))) + ")");
  }
  const FockMatrixT<Real> sym = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<FockMatrixT<Real>> solver(sym);
  if (solver.info() != Eigen::Success) throw ContractViolation("hermitian_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// V f(Lambda) V^dag for a decomposition already at hand. `f` maps a real
/// eigenvalue to a real or complex value; non-finite results raise.
template <typename Real, typename F>
FockMatrixT<Real> matrix_function(const EigenDecompositionT<Real>& eig, F&& f) {
  FockVectorT<Real> fv(eig.values.size());
  for (Index j = 0; j < eig.values.size(); ++j) {
    const std::complex<Real> v(f(eig.values(j)));
    if (!std::isfinite(static_cast<double>(v.real())) ||
        !std::isfinite(static_cast<double>(v.imag()))) {
      throw ContractViolation("matrix_function: function undefined at eigenvalue " +
                              std::to_string(static_cast<double>(eig.values(j))));
    }
    fv(j) = v;
  }
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

template <typename Real, typename F>
FockMatrixT<Real> matrix_function(const FockMatrixT<Real>& m, F&& f) {
  return matrix_function(hermitian_eig(m), std::forward<F>(f));
}

// ---------------------------------------------------------------------------
// Gaussian gates, built in a padded space and cropped

inline Index default_pad(Index n) { return std::max<Index>(20, n / 2); }

/// D_x(u) = exp(-i u p).
template <typename Real = double>
FockMatrixT<Real> displacement_x(Real u, Index n, Index pad = -1) {
  require_dim(n, "displacement_x");
  if (pad < 0) pad = default_pad(n);
  const auto q = quadratures<Real>(n + pad);
  const std::complex<Real> i(0, 1);
  return matrix_function<Real>(q.p, [&](Real lam) { return std::exp(-i * u * lam); })
      .topLeftCorner(n, n);
}

/// S(r) = exp[(r/2)(a^2 - a^dag^2)]; r > 0 narrows the x quadrature.
template <typename Real = double>
FockMatrixT<Real> squeeze(Real r, Index n, Index pad = -1) {
  require_dim(n, "squeeze");
  if (pad < 0) pad = default_pad(n);
  const FockMatrixT<Real> a = annihilation<Real>(n + pad);
  const FockMatrixT<Real> ad = a.adjoint();
  const std::complex<Real> i(0, 1);
  // exp(G) with G anti-Hermitian equals exp(-i H) for H = i G.
  const FockMatrixT<Real> h = i * (r / Real(2)) * (a * a - ad * ad);
  return matrix_function<Real>(h, [&](Real lam) { return std::exp(-i * lam); })
      .topLeftCorner(n, n);
}

// ---------------------------------------------------------------------------
// Quadrature eigenfunctions and exact phase-space translations

/// Entries <p0|n> = (-i)^n phi_n(p0), n < N. Contracting a ket with this row
/// projects onto the momentum eigenstate |p = p0>.
template <typename Real = double>
FockVectorT<Real> momentum_eigenbra(Real p0, Index n) {
  require_dim(n, "momentum_eigenbra");
  const RealVectorT<Real> phi = hermite_functions<Real>(n, p0);
  FockVectorT<Real> row(n);
  const std::complex<Real> phases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (Index k = 0; k < n; ++k) row(k) = phases[k % 4] * phi(k);
  return row;
}

/// Matrix elements <m|exp(i s p)|n> = int phi_m(x) phi_n(x + s) dx, exact up
/// to rounding: after centering, the integrand is exp(-y^2) times a polynomial
/// of degree <= 2N-2, which a Gauss-Hermite rule with >= N nodes integrates
/// exactly. No Fock-space truncation is involved.
inline Eigen::MatrixXd exp_ip_exact(double s, Index n, const GaussHermiteRule& rule) {
  require_dim(n, "exp_ip_exact");
  const Index nodes = rule.nodes.size();
  if (nodes < n) throw InvalidArgument("exp_ip_exact: quadrature rule has too few nodes");
  Eigen::MatrixXd left(nodes, n), right(nodes, n);
  for (Index q = 0; q < nodes; ++q) {
    left.row(q) = hermite_functions<double>(n, rule.nodes(q) - s / 2).transpose() * rule.scaled_weights(q);
    right.row(q) = hermite_functions<double>(n, rule.nodes(q) + s / 2).transpose();
  }
  return left.transpose() * right;
}

inline Eigen::MatrixXd exp_ip_exact(double s, Index n) { return exp_ip_exact(s, n, gauss_hermite(n + 8)); }

/// <m|exp(i a x)|n> = i^m (-i)^n <m|exp(-i a p)|n>, from the p-representation.
inline FockMatrixT<double> exp_ix_exact(double a, Index n, const GaussHermiteRule& rule) {
  const Eigen::MatrixXd e = exp_ip_exact(-a, n, rule);
  const std::complex<double> phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};  // i^k
  FockMatrixT<double> out(n, n);
  for (Index m = 0; m < n; ++m) {
    for (Index k = 0; k < n; ++k) out(m, k) = phases[m % 4] * std::conj(phases[k % 4]) * e(m, k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two modes

template <typename Real>
FockMatrixT<Real> kron(const FockMatrixT<Real>& a, const FockMatrixT<Real>& b) {
  FockMatrixT<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

enum class GateKind { kQnd, kBeamSplitter };

inline const char* to_string(GateKind kind) { return kind == GateKind::kQnd ? "qnd" : "bs"; }

/// Largest single-mode dimension for which full N^2 x N^2 couplers may be
/// built. Overridden by the SQE_TWO_MODE_MAX_DIM environment variable.
inline Index two_mode_dim_cap() {
  if (const char* env = std::getenv("SQE_TWO_MODE_MAX_DIM")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 64;
}

/// Full two-mode coupler on H_N (x) H_N. QND: exp(-i x1 p2). Beam splitter:
/// exp[i (pi/4)(p1 x2 - p2 x1)]. Exact exponential of the truncated generator.
template <typename Real = double>
FockMatrixT<Real> two_mode_coupler(GateKind kind, Index n) {
  require_dim(n, "two_mode_coupler");
  if (n > two_mode_dim_cap()) {
    throw ResourceLimit("two_mode_coupler: N = " + std::to_string(n) + " exceeds the two-mode cap of " +
                        std::to_string(two_mode_dim_cap()) + " (set SQE_TWO_MODE_MAX_DIM to override)");
  }
  const auto q = quadratures<Real>(n);
  const std::complex<Real> i(0, 1);
  if (kind == GateKind::kQnd) {
    const FockMatrixT<Real> h = kron<Real>(q.x, q.p);
    return matrix_function<Real>(h, [&](Real lam) { return std::exp(-i * lam); });
  }
  const Real quarter_pi = std::numbers::pi_v<Real> / Real(4);
  const FockMatrixT<Real> h = quarter_pi * (kron<Real>(q.p, q.x) - kron<Real>(q.x, q.p));
  return matrix_function<Real>(h, [&](Real lam) { return std::exp(i * lam); });
}

// ---------------------------------------------------------------------------
// Figures of merit

template <typename Real>
Real overlap_fidelity(const FockStateT<Real>& a, const FockStateT<Real>& b) {
  if (a.dim() != b.dim()) throw ContractViolation("overlap_fidelity: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

/// Wigner function W(x, p) on a rectangular lattice; result(i, j) = W(xs[i], ps[j]).
/// Normalized so that the vacuum gives 1/pi at the origin. Uses the iterative
/// Laguerre recurrence over |m><n| components.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> wigner(const FockStateT<Real>& psi,
                                                           const std::vector<Real>& xs,
                                                           const std::vector<Real>& ps) {
  if (xs.empty() || ps.empty()) throw InvalidArgument("wigner: empty grid");
  const Index dim = psi.dim();
  const auto& c = psi.amplitudes();
  const Real inv_pi = Real(1) / std::numbers::pi_v<Real>;
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> out(xs.size(), ps.size());
  std::vector<std::complex<Real>> w(dim);
  std::vector<Real> sq(dim);
  for (Index k = 0; k < dim; ++k) sq[k] = std::sqrt(static_cast<Real>(k));
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (std::size_t ip = 0; ip < ps.size(); ++ip) {
      const std::complex<Real> alpha(xs[ix] / std::sqrt(Real(2)), ps[ip] / std::sqrt(Real(2)));
      const std::complex<Real> two_a = Real(2) * alpha;
      const std::complex<Real> two_ac = std::conj(two_a);
      w[0] = std::exp(-Real(2) * std::norm(alpha)) * inv_pi;
      Real acc = std::norm(c(0)) * w[0].real();
      for (Index n = 1; n < dim; ++n) {
        w[n] = two_a * w[n - 1] / sq[n];
        acc += Real(2) * (c(0) * std::conj(c(n)) * w[n]).real();
      }
      for (Index m = 1; m < dim; ++m) {
        std::complex<Real> tmp = w[m];
        w[m] = (two_ac * tmp - sq[m] * w[m - 1]) / sq[m];
        acc += std::norm(c(m)) * w[m].real();
        for (Index n = m + 1; n < dim; ++n) {
          const std::complex<Real> next = (two_a * w[n - 1] - sq[m] * tmp) / sq[n];
          tmp = w[n];
          w[n] = next;
          acc += Real(2) * (c(m) * std::conj(c(n)) * w[n]).real();
        }
      }
      out(ix, ip) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

using FockMatrix = FockMatrixT<double>;
using FockVector = FockVectorT<double>;
using FockState = FockStateT<double>;
using EigenDecomposition = EigenDecompositionT<double>;
using Quadratures = QuadraturesT<double>;

}  // namespace sqe
