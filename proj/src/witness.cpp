#include "sqe/witness.hpp"

#include "sqe/optimize.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

namespace sqe {
namespace {

constexpr double kPi = std::numbers::pi;

// One Fourier term of sin^{2k}(u p + phi/2) =
//   2^{-2k} sum_{m=-k}^{k} C(2k, k+m) (-1)^m e^{i m phi} e^{i 2 m u p}.
// Terms m and -m are paired; `weight` already carries the prefactor and sign.
struct CombTerm {
  int m;
  double shift;   // s = 2 m u
  double weight;  // (u/sqrt(pi)) (k)_{1/2} C(2k, k+m) 2^{-2k} (-1)^m
};

std::vector<CombTerm> comb_terms(double u, int k, Index n) {
  const double prefactor = u / std::sqrt(kPi) * half_falling_factorial(k);
  // <m|e^{isp}|n> is negligible once the shift separates the classical
  // supports of phi_m and phi_n (|x| <= sqrt(2N+1)) by several widths.
  const double max_shift = 2.0 * std::sqrt(2.0 * static_cast<double>(n) + 1.0) + 16.0;
  const double w0 = binomial_over_power_of_two(2 * k, k);
  std::vector<CombTerm> terms;
  for (int m = 0; m <= k; ++m) {
    const double s = 2.0 * m * u;
    if (s > max_shift) break;
    const double w = binomial_over_power_of_two(2 * k, k + m);
    if (w < 1e-18 * w0) break;
    terms.push_back({m, s, prefactor * w * ((m % 2 == 0) ? 1.0 : -1.0)});
  }
  return terms;
}

void require_positive_u(double u, const char* who) {
  if (!(u > 0.0) || !std::isfinite(u)) throw InvalidArgument(std::string(who) + ": u must be > 0");
}

void require_k(int k, const char* who) {
  if (k < 1) throw InvalidArgument(std::string(who) + ": k must be >= 1");
}

}  // namespace

void WitnessSpec::validate() const {
  require_positive_u(u, "WitnessSpec");
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("WitnessSpec: c must be >= 0");
  require_k(k, "WitnessSpec");
  require_dim(dim, "WitnessSpec");
  if (!std::isfinite(phi)) throw InvalidArgument("WitnessSpec: phi must be finite");
}

double comb_point(double u, double phi, long j) {
  return ((2.0 * static_cast<double>(j) - 1.0) * kPi - phi) / (2.0 * u);
}

FockMatrix build_Ox(double u, Index n) {
  require_dim(n, "build_Ox");
  const auto q = quadratures(n + 4);
  const FockMatrix shifted = q.x * q.x - FockMatrix::Identity(n + 4, n + 4) * (u * u);
  return (shifted * shifted).topLeftCorner(n, n);
}

FockMatrix build_Op_approx(double u, double phi, int k, Index n, CombMethod method, Index pad) {
  require_positive_u(u, "build_Op_approx");
  require_k(k, "build_Op_approx");
  require_dim(n, "build_Op_approx");

  if (method == CombMethod::kSpectral) {
    if (pad < 0) throw InvalidArgument("build_Op_approx: pad must be >= 0");
    const double prefactor = u / std::sqrt(kPi) * half_falling_factorial(k);
    const auto q = quadratures(n + pad);
    const EigenDecomposition eig = hermitian_eig(q.p);
    double peak = 0.0;
    FockMatrix out = matrix_function(eig, [&](double lam) {
      const double v = prefactor * std::pow(std::sin(u * lam + phi / 2.0), 2 * k);
      peak = std::max(peak, v);
      return v;
    });
    if (peak < 1e-300) {
      std::cerr << "warning: sin^" << 2 * k << " underflows at every eigenvalue of the truncated p\n";
    }
    return out.topLeftCorner(n, n);
  }

  const GaussHermiteRule rule = gauss_hermite(n + 8);
  FockMatrix out = FockMatrix::Zero(n, n);
  for (const CombTerm& t : comb_terms(u, k, n)) {
    if (t.m == 0) {
      out.diagonal().array() += t.weight;
      continue;
    }
    const Eigen::MatrixXd e = exp_ip_exact(t.shift, n, rule);
    const std::complex<double> phase = std::polar(1.0, t.m * phi);
    out += t.weight * (phase * e.cast<std::complex<double>>() + std::conj(phase) * e.transpose().cast<std::complex<double>>());
  }
  return out;
}

double op_approx_expectation(const FockState& psi, double u, double phi, int k) {
  require_positive_u(u, "op_approx_expectation");
  require_k(k, "op_approx_expectation");
  const Index n = psi.dim();
  const GaussHermiteRule rule = gauss_hermite(n + 8);
  const FockVector& c = psi.amplitudes();
  double total = 0.0;
  for (const CombTerm& t : comb_terms(u, k, n)) {
    if (t.m == 0) {
      total += t.weight;
      continue;
    }
    // <psi|e^{isp}|psi> = sum_q W_q (sum_m conj(c_m) phi_m(y_q - s/2)) (sum_n phi_n(y_q + s/2) c_n)
    std::complex<double> z = 0.0;
    for (Index q = 0; q < rule.nodes.size(); ++q) {
      const Eigen::VectorXd left = hermite_functions<double>(n, rule.nodes(q) - t.shift / 2);
      const Eigen::VectorXd right = hermite_functions<double>(n, rule.nodes(q) + t.shift / 2);
      z += rule.scaled_weights(q) * std::conj(left.cast<std::complex<double>>().dot(c)) *
           right.cast<std::complex<double>>().dot(c);
    }
    // e^{-isp} is the transpose of e^{isp}, whose expectation is conj(z).
    total += t.weight * 2.0 * (std::polar(1.0, t.m * phi) * z).real();
  }
  return total;
}

FockMatrix build_Op_truncated_eigenkets(double u, double phi, Index n) {
  require_positive_u(u, "build_Op_truncated_eigenkets");
  require_dim(n, "build_Op_truncated_eigenkets");
  const double reach = std::sqrt(2.0 * static_cast<double>(n) + 1.0) + 12.0;
  const long j_max = static_cast<long>(std::ceil((reach * 2.0 * u / kPi + 1.0) / 2.0)) + 1;
  FockMatrix out = FockMatrix::Zero(n, n);
  for (long j = 1 - j_max; j <= j_max; ++j) {
    const FockVector bra = momentum_eigenbra(comb_point(u, phi, j), n);
    out += bra.conjugate() * bra.transpose();
  }
  return out;
}

double exact_Op_diagonal(double u, double phi, Index n, long j_cut) {
  require_positive_u(u, "exact_Op_diagonal");
  if (n < 0) throw InvalidArgument("exact_Op_diagonal: n must be >= 0");
  if (j_cut < 1) throw InvalidArgument("exact_Op_diagonal: j_cut must be >= 1");
  double sum = 0.0;
  for (long j = 1 - j_cut; j <= j_cut; ++j) {
    const double v = hermite_functions<double>(n + 1, comb_point(u, phi, j))(n);
    sum += v * v;
  }
  return sum;
}

double exact_Op_diagonal(double u, double phi, Index n) {
  require_positive_u(u, "exact_Op_diagonal");
  // Beyond |p| = sqrt(2n+1) + 10 the Hermite function is below 1e-20.
  const double reach = std::sqrt(2.0 * static_cast<double>(n) + 1.0) + 10.0 + std::abs(phi) / (2.0 * u);
  const long j_cut = static_cast<long>(std::ceil((reach * 2.0 * u / kPi + 1.0) / 2.0)) + 1;
  return exact_Op_diagonal(u, phi, n, j_cut);
}

std::vector<AccuracyRow> accuracy_scan(double u, int k, Index n_max, double phi) {
  if (n_max < 0) throw InvalidArgument("accuracy_scan: n_max must be >= 0");
  const Index dim = std::max<Index>(2 * n_max, n_max + 1);
  const FockMatrix approx = build_Op_approx(u, phi, k, dim);
  std::vector<AccuracyRow> rows;
  rows.reserve(n_max + 1);
  for (Index n = 0; n <= n_max; ++n) {
    const double exact = exact_Op_diagonal(u, phi, n);
    const double a = approx(n, n).real();
    rows.push_back({n, exact, a, std::abs(1.0 - a / exact)});
  }
  return rows;
}

FockMatrix build_witness(const WitnessSpec& spec) {
  spec.validate();
  FockMatrix w = build_Ox(spec.u, spec.dim);
  if (spec.c != 0.0) w += spec.c * build_Op_approx(spec.u, spec.phi, spec.k, spec.dim);
  return w;
}

std::shared_ptr<const FockMatrix> cached_witness(const WitnessSpec& spec) {
  using Key = std::tuple<double, double, double, Index, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const FockMatrix>> store;
  const Key key{spec.u, spec.phi, spec.c, spec.dim, spec.k};
  {
    std::shared_lock lock(mutex);
    if (auto it = store.find(key); it != store.end()) return it->second;
  }
  auto built = std::make_shared<const FockMatrix>(build_witness(spec));
  std::unique_lock lock(mutex);
  return store.emplace(key, std::move(built)).first->second;
}

double squeezed_vacuum_expectation(double u, double c, double r) {
  const double q = std::exp(-u * u * std::exp(2.0 * r));
  return std::pow(u, 4) + 0.75 * std::exp(-4.0 * r) - u * u * std::exp(-2.0 * r) +
         u * c / kPi * theta3(-kPi / 2.0, q);
}

GaussianBound gaussian_bound(double u, double phi, double c) {
  require_positive_u(u, "gaussian_bound");
  if (!(c >= 0.0)) throw InvalidArgument("gaussian_bound: c must be >= 0");
  (void)phi;  // both Gaussian optima are independent of the superposition phase
  constexpr double lo = -5.0, hi = 10.0;
  auto ea = [&](double r) { return squeezed_vacuum_expectation(u, c, r); };
  const GridMinimum best = grid_then_golden(ea, linspace(lo, hi, 3001), 1e-13);

  GaussianBound out;
  out.squeezed_min = best.value;
  out.squeezed_argmin = best.x;
  const double h = 1e-5;
  const double d_lo = (ea(lo + h) - ea(lo)) / h;
  const double d_hi = (ea(hi) - ea(hi - h)) / h;
  out.bracket_ok = d_lo < 0.0 && d_hi >= -1e-12;

  const double eb = u * c / kPi;
  if (best.value <= eb) {
    out.value = best.value;
    out.branch = GaussianBranch::kSqueezedVacuum;
    out.argmin_r = best.x;
  } else {
    out.value = eb;
    out.branch = GaussianBranch::kInfinitelySqueezed;
  }
  return out;
}

SqueezingDb squeezing_db(double value, double bound) {
  if (!(bound > 0.0)) throw ContractViolation("squeezing_db: benchmark must be positive");
  SqueezingDb out;
  out.expectation = value;
  out.bound = bound;
  double v = value;
  if (v < kExpectationFloor) {
    v = kExpectationFloor;
    out.clamped = true;
  }
  out.db = 10.0 * std::log10(v / bound);
  return out;
}

SqueezingDb sqe_squeezing_db(const FockState& state, const WitnessSpec& spec) {
  spec.validate();
  if (state.dim() != spec.dim) throw ContractViolation("sqe_squeezing_db: state and witness dimensions differ");
  const auto w = cached_witness(spec);
  return squeezing_db(state.expectation(*w), gaussian_bound(spec.u, spec.phi, spec.c).value);
}

FockMatrix rescaled_witness(double g, double phi, double c, Index n, int k) {
  if (!(g > 0.0)) throw InvalidArgument("rescaled_witness: g must be > 0");
  const double u = 1.0 / g;
  FockMatrix w = std::pow(g, 4) * build_Ox(u, n);
  if (c != 0.0) w += c * build_Op_approx(u, phi, k, n);
  return w;
}

double rescaled_witness_expectation(const FockState& state, double g, double phi, double c, int k) {
  if (!(g > 0.0)) throw InvalidArgument("rescaled_witness_expectation: g must be > 0");
  const double u = 1.0 / g;
  const Index n = state.dim();
  // <psi|P A^2 P|psi> = |A P psi|^2 with A = x^2 - u^2 at dimension N + 4.
  const auto q = quadratures(n + 4);
  const FockVector v = state.embedded(n + 4).amplitudes();
  const FockVector xv = q.x * v;
  const FockVector av = q.x * xv - (u * u) * v;
  double total = std::pow(g, 4) * av.squaredNorm();
  if (c != 0.0) total += c * op_approx_expectation(state, u, phi, k);
  return total;
}

GMinimum min_over_g(const FockState& state, double phi, double c, int k) {
  const double lo = std::log(0.05), hi = std::log(20.0);
  auto f = [&](double t) { return rescaled_witness_expectation(state, std::exp(t), phi, c, k); };
  const GridMinimum best = grid_then_golden(f, linspace(lo, hi, 200), 1e-10);
  return {std::exp(best.x), best.value, best.at_boundary};
}

}  // namespace sqe
