#pragma once

// Squeezed cats, ideal virtual-gate targets and witness ground states.

#include "sqe/fock.hpp"
#include "sqe/witness.hpp"

namespace sqe {

inline constexpr double kDefaultMaxLoss = 1e-4;

/// (D_x(u) + e^{i phi} D_x(-u)) S(r)|0>, normalized, in dimension `dim`.
struct CatSpec {
  double u = 0.0;
  double r = 0.0;
  double phi = 0.0;
  Index dim = 40;

  void validate() const;
};

struct CatBuild {
  FockState state;
  double truncation_loss;  // probability outside the first `dim` levels
};

/// Builds the cat in a larger space and crops; never throws on truncation.
CatBuild squeezed_cat_with_loss(const CatSpec& spec);

/// Throws DimensionTooSmall (with the smallest adequate dimension) when more
/// than `max_loss` of the probability lies beyond the truncation.
FockState squeezed_cat(const CatSpec& spec, double max_loss = kDefaultMaxLoss);

/// <O_x(u) + c O_p(u, 0)> on the even squeezed cat, in closed form.
double even_cat_expectation_closed_form(double u, double r);

/// Stellar-rank bound for an N-level witness ground state: N - 2 for even N,
/// N - 1 for odd N.
int stellar_rank_bound(Index n);

struct GroundStateReport {
  FockState state;
  double eigenvalue;
  SqueezingDb xi;
  int stellar_bound;
  double gap;       // second-lowest minus lowest eigenvalue
  bool degenerate;  // gap below 1e-10
};

/// Ground state of the truncated witness. The global phase makes the largest
/// amplitude real and positive; within a degenerate ground space the
/// lexicographically largest gauge-fixed eigenvector is returned.
GroundStateReport optimal_sqe_approximation(const WitnessSpec& spec);

/// Ideal outputs of the virtual gate: QND gives (D(u) + e^{i phi} D(-u))|0>,
/// the balanced beam splitter (D(u/sqrt2) + e^{i phi} D(-u/sqrt2)) S(ln2 / 2)|0>.
CatBuild ideal_gate_target_with_loss(GateKind kind, double u, double phi, Index dim);
FockState ideal_gate_target(GateKind kind, double u, double phi, Index dim, double max_loss = kDefaultMaxLoss);

/// Global phase gauge: largest-magnitude amplitude (first on ties) made real positive.
FockVector fix_global_phase(FockVector v);

}  // namespace sqe
