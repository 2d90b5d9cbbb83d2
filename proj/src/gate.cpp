#include "sqe/gate.hpp"

#include "sqe/states.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>

namespace sqe {
namespace {

GateTransfer qnd_transfer(Index n) {
  const Index m = qnd_working_dim(n);
  const auto q = quadratures(m);
  const EigenDecomposition ex = hermitian_eig(q.x);
  const EigenDecomposition ep = hermitian_eig(q.p);
  // exp(-i x1 p2) = sum_ij exp(-i lx_i lp_j) |x_i><x_i| (x) |p_j><p_j|, so
  // <p=0|_1 <k|_2 U |n>_1 |0>_2 = sum_j Vp(k,j) conj(Vp(0,j)) sum_i Phi_ij b_i conj(Vx(n,i))
  // with b = <p=0| Vx.
  const FockVector b = (momentum_eigenbra(0.0, m).transpose() * ex.vectors).transpose();
  FockMatrix phase_t(m, m);  // Phi^T
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) phase_t(j, i) = std::polar(1.0, -ex.values(i) * ep.values(j));
  }
  const FockVector vac = ep.vectors.row(0).adjoint();
  FockMatrix right = b.asDiagonal() * ex.vectors.adjoint().leftCols(n);
  GateTransfer t;
  t.kind = GateKind::kQnd;
  t.input_dim = n;
  t.map = ep.vectors * (vac.asDiagonal() * (phase_t * right));
  return t;
}

GateTransfer beam_splitter_transfer(Index n) {
  const auto blocks = cached_beam_splitter_blocks(n - 1);
  const FockVector bra = momentum_eigenbra(0.0, n);
  GateTransfer t;
  t.kind = GateKind::kBeamSplitter;
  t.input_dim = n;
  t.map = FockMatrix::Zero(n, n);
  // |n, 0> is block index n1 = n of block t = n; after contraction with <p=0|
  // on mode 1 the surviving amplitude sits on mode-2 level n - n1.
  for (Index col = 0; col < n; ++col) {
    const FockMatrix& u = (*blocks)[col];
    for (Index n2 = 0; n2 <= col; ++n2) t.map(n2, col) = bra(col - n2) * u(col - n2, col);
  }
  return t;
}

}  // namespace

Index qnd_working_dim(Index n) { return 2 * n + 40; }

FockMatrix beam_splitter_block(Index t) {
  if (t < 0) throw InvalidArgument("beam_splitter_block: total photon number must be >= 0");
  FockMatrix h = FockMatrix::Zero(t + 1, t + 1);
  const std::complex<double> i(0, 1);
  const double quarter_pi = std::numbers::pi / 4.0;
  for (Index n1 = 0; n1 < t; ++n1) {
    const double g = std::sqrt(static_cast<double>((n1 + 1) * (t - n1)));
    // G(n1+1, n1) = g, G(n1, n1+1) = -g; h = -i (pi/4) G is Hermitian.
    h(n1 + 1, n1) = -i * quarter_pi * g;
    h(n1, n1 + 1) = i * quarter_pi * g;
  }
  return matrix_function(h, [&](double lam) { return std::exp(-i * lam); });
}

std::shared_ptr<const std::vector<FockMatrix>> cached_beam_splitter_blocks(Index t_max) {
  static std::shared_mutex mutex;
  static std::shared_ptr<const std::vector<FockMatrix>> store;
  {
    std::shared_lock lock(mutex);
    if (store && static_cast<Index>(store->size()) > t_max) return store;
  }
  std::unique_lock lock(mutex);
  if (store && static_cast<Index>(store->size()) > t_max) return store;
  auto blocks = std::make_shared<std::vector<FockMatrix>>(store ? *store : std::vector<FockMatrix>{});
  for (Index t = static_cast<Index>(blocks->size()); t <= t_max; ++t) blocks->push_back(beam_splitter_block(t));
  store = std::move(blocks);
  return store;
}

GateTransfer build_gate_transfer(GateKind kind, Index n) {
  require_dim(n, "build_gate_transfer");
  return kind == GateKind::kQnd ? qnd_transfer(n) : beam_splitter_transfer(n);
}

std::shared_ptr<const GateTransfer> cached_gate_transfer(GateKind kind, Index n) {
  static std::shared_mutex mutex;
  static std::map<std::pair<int, Index>, std::shared_ptr<const GateTransfer>> store;
  const std::pair<int, Index> key{static_cast<int>(kind), n};
  {
    std::shared_lock lock(mutex);
    if (auto it = store.find(key); it != store.end()) return it->second;
  }
  auto built = std::make_shared<const GateTransfer>(build_gate_transfer(kind, n));
  std::unique_lock lock(mutex);
  return store.emplace(key, std::move(built)).first->second;
}

namespace {

GateOutcome outcome_from_vector(FockVector v, Index keep) {
  const double norm = v.norm();
  if (!(norm >= 1e-12)) {
    throw Annihilated("post-selection on p = 0 annihilates the resource (success norm " + std::to_string(norm) + ")");
  }
  const double kept = v.head(std::min<Index>(keep, v.size())).squaredNorm() / (norm * norm);
  FockState full = FockState::from_amplitudes(std::move(v));
  FockState cropped = full.cropped(keep);
  return {std::move(cropped), std::move(full), norm, std::max(0.0, 1.0 - kept)};
}

}  // namespace

GateOutcome apply_transfer(const GateTransfer& transfer, const FockState& resource) {
  if (resource.dim() != transfer.input_dim) {
    throw ContractViolation("apply_transfer: resource dimension differs from the transfer's");
  }
  return outcome_from_vector(transfer.map * resource.amplitudes(), transfer.input_dim);
}

GateOutcome conditional_output(const FockState& resource, GateKind kind) {
  return apply_transfer(*cached_gate_transfer(kind, resource.dim()), resource);
}

GateOutcome conditional_output_full_coupler(const FockState& resource, GateKind kind) {
  const Index n = resource.dim();
  const FockMatrix u = two_mode_coupler(kind, n);
  FockVector in = FockVector::Zero(n * n);
  for (Index n1 = 0; n1 < n; ++n1) in(n1 * n) = resource[n1];
  const FockVector out2 = u * in;
  const FockVector bra = momentum_eigenbra(0.0, n);
  FockVector v = FockVector::Zero(n);
  for (Index n1 = 0; n1 < n; ++n1) v += bra(n1) * out2.segment(n1 * n, n);
  return outcome_from_vector(std::move(v), n);
}

FidelityEvaluator::FidelityEvaluator(GateKind kind, double u, double phi, Index n)
    : transfer_(cached_gate_transfer(kind, n)) {
  Index dim = std::max<Index>(n, transfer_->map.rows());
  CatBuild built = ideal_gate_target_with_loss(kind, u, phi, dim);
  while (built.truncation_loss >= 1e-12 && dim < 2048) {
    dim *= 2;
    built = ideal_gate_target_with_loss(kind, u, phi, dim);
  }
  target_loss_ = built.truncation_loss;
  target_.emplace(std::move(built.state));
}

GateOutcome FidelityEvaluator::outcome(const FockState& resource) const { return apply_transfer(*transfer_, resource); }

double FidelityEvaluator::fidelity(const GateOutcome& outcome) const {
  const FockVector& out = outcome.full_output.amplitudes();
  return std::norm(target_->amplitudes().head(out.size()).dot(out));
}

double FidelityEvaluator::operator()(const FockState& resource) const { return fidelity(outcome(resource)); }

double interaction_fidelity(const FockState& resource, GateKind kind, double u, double phi) {
  return FidelityEvaluator(kind, u, phi, resource.dim())(resource);
}

}  // namespace sqe
