#pragma once

// Virtual gates: a Gaussian two-mode coupling of |R> (x) |0> followed by
// homodyne post-selection of mode 1 on p = 0, and the fidelity of the
// conditional output with the ideal SQE-driven target.

#include "sqe/fock.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace sqe {

struct GateOutcome {
  FockState output;       // conditional state, cropped to the input dimension
  FockState full_output;  // the same state before cropping
  double success_norm;    // norm of the post-selected vector before normalization
  double truncation_loss; // probability of full_output beyond the input dimension
};

/// Linear map |R> -> <p=0|_1 U |R>_1 |0>_2 for resources in H_N.
///
/// The beam splitter conserves total photon number, so its action on |n, 0>
/// with n < N lives in the blocks of total number t < N and is computed
/// exactly there. The QND gate exp(-i x1 p2) is exponentiated through the
/// factorized spectra of x and p in a padded dimension M > N; mode 2 is kept
/// at M and the output cropped afterwards.
struct GateTransfer {
  GateKind kind = GateKind::kBeamSplitter;
  Index input_dim = 0;
  FockMatrix map;  // output_dim x input_dim
};

/// Padded single-mode dimension used by the QND transfer.
Index qnd_working_dim(Index n);

GateTransfer build_gate_transfer(GateKind kind, Index n);

/// Read-only store keyed by (kind, N).
std::shared_ptr<const GateTransfer> cached_gate_transfer(GateKind kind, Index n);

/// exp(-(pi/4) G_t) on the block {|n1, t - n1>, n1 = 0..t} of total photon number t.
FockMatrix beam_splitter_block(Index t);

/// Blocks t = 0..t_max, cached.
std::shared_ptr<const std::vector<FockMatrix>> cached_beam_splitter_blocks(Index t_max);

/// Applies the transfer; throws Annihilated when the success norm is below 1e-12.
GateOutcome apply_transfer(const GateTransfer& transfer, const FockState& resource);

GateOutcome conditional_output(const FockState& resource, GateKind kind);

/// Same operation through the full N^2 x N^2 coupler from two_mode_coupler:
/// |R> (x) |0> is formed, the coupler applied, and mode 1 contracted with
/// <p=0| at dimension N. Subject to the two-mode memory cap.
GateOutcome conditional_output_full_coupler(const FockState& resource, GateKind kind);

/// |<target|output>|^2 with the target built at a dimension where its own
/// truncation loss is below 1e-12, compared against the uncropped output.
class FidelityEvaluator {
 public:
  FidelityEvaluator(GateKind kind, double u, double phi, Index n);

  double operator()(const FockState& resource) const;
  GateOutcome outcome(const FockState& resource) const;
  double fidelity(const GateOutcome& outcome) const;

  const FockState& target() const { return *target_; }
  double target_loss() const { return target_loss_; }

 private:
  std::shared_ptr<const GateTransfer> transfer_;
  std::optional<FockState> target_;
  double target_loss_ = 0.0;
};

double interaction_fidelity(const FockState& resource, GateKind kind, double u, double phi);

}  // namespace sqe
