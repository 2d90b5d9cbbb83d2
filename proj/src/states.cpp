#include "sqe/states.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sqe {

void CatSpec::validate() const {
  if (dim < 2) throw InvalidArgument("CatSpec: dimension must be >= 2");
  if (!std::isfinite(u) || !std::isfinite(r) || !std::isfinite(phi)) {
    throw InvalidArgument("CatSpec: parameters must be finite");
  }
}

CatBuild squeezed_cat_with_loss(const CatSpec& spec) {
  spec.validate();
  const Index work = spec.dim + std::max<Index>(40, spec.dim);
  FockVector seed = FockVector::Zero(work);
  seed(0) = 1.0;
  const FockVector squeezed = squeeze(spec.r, work) * seed;
  const FockVector v = displacement_x(spec.u, work) * squeezed +
                       std::polar(1.0, spec.phi) * (displacement_x(-spec.u, work) * squeezed);
  // |(D(u) + e^{i phi} D(-u)) S(r)|0>|^2 = 2 (1 + cos(phi) <S0|D(-2u)|S0>), and the
  // overlap of the displaced copies is exp(-u^2 e^{2r}). Measuring the loss
  // against this exact norm keeps the estimate honest when `work` is itself
  // too small to hold the tail.
  const double exact_norm2 = 2.0 * (1.0 + std::cos(spec.phi) * std::exp(-spec.u * spec.u * std::exp(2.0 * spec.r)));
  const double norm2 = exact_norm2 > 1e-300 ? exact_norm2 : v.squaredNorm();
  const double kept = v.head(spec.dim).squaredNorm();
  const double loss = std::clamp(1.0 - kept / norm2, 0.0, 1.0);
  return {FockState::from_amplitudes(v.head(spec.dim)), loss};
}

FockState squeezed_cat(const CatSpec& spec, double max_loss) {
  CatBuild built = squeezed_cat_with_loss(spec);
  if (built.truncation_loss >= max_loss) {
    // Smallest dimension that would hold the state, searched in a generous space.
    CatSpec big = spec;
    big.dim = 2 * spec.dim;
    const CatBuild wide = squeezed_cat_with_loss(big);
    const FockVector& amps = wide.state.amplitudes();
    const double scale = 1.0 - wide.truncation_loss;
    Index required = big.dim + 1;
    double kept = 0.0;
    for (Index n = 0; n < big.dim; ++n) {
      kept += std::norm(amps(n)) * scale;
      if (1.0 - kept < max_loss) {
        required = n + 1;
        break;
      }
    }
    throw DimensionTooSmall("squeezed_cat: truncation to N = " + std::to_string(spec.dim) + " discards " +
                                std::to_string(built.truncation_loss) + " of the norm; N >= " +
                                std::to_string(required) + " is required",
                            required);
  }
  return std::move(built.state);
}

double even_cat_expectation_closed_form(double u, double r) {
  const double a = std::exp(2.0 * r) * u * u;
  // 1 / (e^a + 1) written as e^{-a} / (1 + e^{-a}) so large a cannot overflow.
  const double fermi = std::exp(-a) / (1.0 + std::exp(-a));
  return (4.0 * a * (a - 3.0) * fermi + 8.0 * a + 3.0) / (4.0 * std::exp(4.0 * r));
}

int stellar_rank_bound(Index n) {
  require_dim(n, "stellar_rank_bound");
  return static_cast<int>(n % 2 == 0 ? n - 2 : n - 1);
}

FockVector fix_global_phase(FockVector v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12)) best = i;
  }
  if (std::abs(v(best)) > 0.0) v *= std::conj(v(best)) / std::abs(v(best));
  v(best) = std::abs(v(best));
  return v;
}

namespace {

bool lexicographically_greater(const FockVector& a, const FockVector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() > b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() > b(i).imag();
  }
  return false;
}

}  // namespace

GroundStateReport optimal_sqe_approximation(const WitnessSpec& spec) {
  spec.validate();
  const auto w = cached_witness(spec);
  const EigenDecomposition eig = hermitian_eig(*w);
  const double e0 = eig.values(0);
  const double gap = eig.values.size() > 1 ? eig.values(1) - e0 : std::numeric_limits<double>::infinity();
  const bool degenerate = gap < 1e-10;

  FockVector chosen = fix_global_phase(eig.vectors.col(0));
  for (Index j = 1; j < eig.values.size() && eig.values(j) - e0 < 1e-10; ++j) {
    FockVector candidate = fix_global_phase(eig.vectors.col(j));
    if (lexicographically_greater(candidate, chosen)) chosen = std::move(candidate);
  }
  FockState state = FockState::from_amplitudes(std::move(chosen));
  const double value = state.expectation(*w);
  return {std::move(state), value, squeezing_db(value, gaussian_bound(spec.u, spec.phi, spec.c).value),
          stellar_rank_bound(spec.dim), gap, degenerate};
}

CatBuild ideal_gate_target_with_loss(GateKind kind, double u, double phi, Index dim) {
  if (kind == GateKind::kQnd) return squeezed_cat_with_loss({u, 0.0, phi, dim});
  return squeezed_cat_with_loss({u / std::numbers::sqrt2, std::log(2.0) / 2.0, phi, dim});
}

FockState ideal_gate_target(GateKind kind, double u, double phi, Index dim, double max_loss) {
  if (kind == GateKind::kQnd) return squeezed_cat({u, 0.0, phi, dim}, max_loss);
  return squeezed_cat({u / std::numbers::sqrt2, std::log(2.0) / 2.0, phi, dim}, max_loss);
}

}  // namespace sqe
