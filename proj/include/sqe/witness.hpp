#pragma once

// The SQE witness family O(u, phi, c) = O_x(u) + c * O_p(u, phi) in truncated
// Fock spaces, its Gaussian benchmark, and squeezing in dB.

#include "sqe/fock.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace sqe {

inline constexpr int kDefaultSharpness = 100;
inline constexpr Index kDefaultCombPad = 40;
inline constexpr double kExpectationFloor = 1e-14;

/// One member of the operator family. `k` is the sin^{2k} sharpness exponent.
struct WitnessSpec {
  double u = 3.0;
  double phi = 0.0;
  double c = 10.0;
  Index dim = 20;
  int k = kDefaultSharpness;

  /// Throws InvalidArgument unless u > 0, c >= 0, k >= 1, dim >= 1.
  void validate() const;
  bool operator==(const WitnessSpec&) const = default;
};

/// Comb positions p_j = ((2j - 1) pi - phi) / (2u).
double comb_point(double u, double phi, long j);

/// (x^2 - u^2)^2 built from x at dimension N + 4 and cropped to N x N.
FockMatrix build_Ox(double u, Index n);

enum class CombMethod {
  /// Finite Fourier expansion of sin^{2k} into momentum translations with exact
  /// Fock matrix elements; yields P_N O~_p P_N without truncation error.
  kFourier,
  /// sin^{2k} applied to the spectrum of a truncated p in dimension N + pad.
  /// Inaccurate once the peak width ~1/(u sqrt(k)) drops below the eigenvalue
  /// spacing of the truncated p; kept for comparison.
  kSpectral,
};

/// O~_p = (u / sqrt(pi)) (k)_{1/2} sin^{2k}(u p + phi/2), truncated to N.
FockMatrix build_Op_approx(double u, double phi, int k, Index n, CombMethod method = CombMethod::kFourier,
                           Index pad = kDefaultCombPad);

/// <psi|O~_p|psi> without forming the matrix (Fourier route).
double op_approx_expectation(const FockState& psi, double u, double phi, int k);

/// Sum of |p_j><p_j| with each ket cut to n < N: the truncated eigenket
/// expansion of the ideal comb.
FockMatrix build_Op_truncated_eigenkets(double u, double phi, Index n);

/// <n|O_p|n> = sum_j |<p_j|n>|^2 for the ideal comb. `j_cut` bounds |j|; the
/// overload without it picks a cut beyond the Gaussian tail of phi_n.
double exact_Op_diagonal(double u, double phi, Index n, long j_cut);
double exact_Op_diagonal(double u, double phi, Index n);

struct AccuracyRow {
  Index n;
  double exact;
  double approx;
  double rel_error;
};

/// Per-level relative error |1 - <n|O~_p|n> / <n|O_p|n>| for n = 0..n_max.
std::vector<AccuracyRow> accuracy_scan(double u, int k, Index n_max, double phi = 0.0);

/// O_x + c O~_p at dimension spec.dim.
FockMatrix build_witness(const WitnessSpec& spec);

/// Shared read-only witness store; concurrent readers, single-writer insertion.
std::shared_ptr<const FockMatrix> cached_witness(const WitnessSpec& spec);

enum class GaussianBranch { kSqueezedVacuum, kInfinitelySqueezed };

inline const char* to_string(GaussianBranch b) {
  return b == GaussianBranch::kSqueezedVacuum ? "squeezed-vacuum" : "infinitely-squeezed";
}

struct GaussianBound {
  double value = 0.0;
  GaussianBranch branch = GaussianBranch::kSqueezedVacuum;
  std::optional<double> argmin_r;  // set when the squeezed-vacuum branch wins
  double squeezed_min = 0.0;       // min_r E_A
  double squeezed_argmin = 0.0;
  bool bracket_ok = true;          // endpoint derivative signs confirm the r-bracket
};

/// E_A(r) for a squeezed vacuum.
double squeezed_vacuum_expectation(double u, double c, double r);

/// min over Gaussian states of <O(u, phi, c)>: min(min_r E_A, uc/pi).
GaussianBound gaussian_bound(double u, double phi, double c);

struct SqueezingDb {
  double db = 0.0;
  double expectation = 0.0;
  double bound = 0.0;
  bool clamped = false;  // expectation was floored before the logarithm
};

/// 10 log10(value / bound) with value floored at 1e-14.
SqueezingDb squeezing_db(double value, double bound);

/// 10 log10(<O^[N]> / min_G <O>).
SqueezingDb sqe_squeezing_db(const FockState& state, const WitnessSpec& spec);

/// g^4 (x^2 - 1/g^2)^2 + c O~_p(1/g, phi): the squeezing-covariant family.
FockMatrix rescaled_witness(double g, double phi, double c, Index n, int k = kDefaultSharpness);

double rescaled_witness_expectation(const FockState& state, double g, double phi, double c,
                                    int k = kDefaultSharpness);

struct GMinimum {
  double g = 1.0;
  double value = 0.0;
  bool at_boundary = false;
};

/// min over g in [0.05, 20] of <O(g, phi, c)>: 200-point log grid + golden section.
GMinimum min_over_g(const FockState& state, double phi, double c, int k = kDefaultSharpness);

}  // namespace sqe
