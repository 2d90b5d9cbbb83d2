#pragma once

// Post-selected breeding on a balanced beam splitter, and GKP nonlinear
// squeezing through Q0 = 2 sin^2(x sqrt(pi)/2) + 2 sin^2(p sqrt(pi)).

#include "sqe/gate.hpp"
#include "sqe/witness.hpp"

#include <memory>
#include <vector>

namespace sqe {

/// Two inputs in H_N meet on the beam splitter; mode 1 is post-selected on
/// p = 0 and mode 2 is returned. Both modes are held at 2N - 1 levels, where
/// the photon-number-conserving splitter acts without truncation; the output
/// is cropped back to N.
GateOutcome breed_round(const FockState& a, const FockState& b);

struct BreedingRun {
  std::vector<FockState> states;       // states[0] is the input, states[i] the round-i output
  std::vector<double> success_norms;   // one per round
  std::vector<double> truncation_losses;

  int rounds() const { return static_cast<int>(success_norms.size()); }
  const FockState& final_state() const { return states.back(); }
};

/// m rounds on a binary tree of 2^m identical copies: round i merges two
/// copies of the round-(i-1) output.
BreedingRun breed_protocol(const FockState& input, int rounds);

/// Q0 from sin^2 applied to x and p at dimension N + pad, cropped to N.
FockMatrix build_Q0(Index n, Index pad = kDefaultCombPad);
std::shared_ptr<const FockMatrix> cached_Q0(Index n);

/// <Q0> on the squeezed displaced vacuum D(mu_x, mu_p) S(r)|0>:
///   2 - cos(sqrt(pi) mu_x) e^{-pi vx / 2} - cos(2 sqrt(pi) mu_p) e^{-2 pi vp},
/// with vx = e^{-2r}/2 and vp = e^{2r}/2.
double gaussian_q0(double r, double mu_x, double mu_p);

struct GaussianQ0Minimum {
  double value;
  double r;
  double mu_x;
  double mu_p;
  bool at_boundary;  // the minimizer presses against the squeezing limit
};

/// Minimum of gaussian_q0 over r in [-3, 3], mu_x in [0, 2 sqrt(pi)),
/// mu_p in [0, sqrt(pi)); a start grid followed by Nelder-Mead. Cached.
const GaussianQ0Minimum& gaussian_min_q0();

/// 10 log10(<Q0^[N]> / min_G <Q0>).
SqueezingDb gkp_squeezing_db(const FockState& state);

}  // namespace sqe
