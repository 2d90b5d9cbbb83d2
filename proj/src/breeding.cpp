#include "sqe/breeding.hpp"

#include "sqe/optimize.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>

namespace sqe {

GateOutcome breed_round(const FockState& a, const FockState& b) {
  if (a.dim() != b.dim()) throw ContractViolation("breed_round: inputs have different dimensions");
  const Index n = a.dim();
  const Index work = 2 * n - 1;
  const auto blocks = cached_beam_splitter_blocks(work - 1);
  const FockVector bra = momentum_eigenbra(0.0, work);
  FockVector out = FockVector::Zero(work);
  for (Index t = 0; t < work; ++t) {
    const Index lo = std::max<Index>(0, t - (n - 1));
    const Index hi = std::min<Index>(t, n - 1);
    FockVector v = FockVector::Zero(t + 1);
    for (Index n1 = lo; n1 <= hi; ++n1) v(n1) = a[n1] * b[t - n1];
    const FockVector w = (*blocks)[t] * v;
    for (Index n1 = 0; n1 <= t; ++n1) out(t - n1) += bra(n1) * w(n1);
  }
  const double norm = out.norm();
  if (!(norm >= 1e-12)) {
    throw Annihilated("breed_round: post-selection annihilates the pair (success norm " + std::to_string(norm) + ")");
  }
  const double kept = out.head(n).squaredNorm() / (norm * norm);
  FockState full = FockState::from_amplitudes(std::move(out));
  FockState cropped = full.cropped(n);
  return {std::move(cropped), std::move(full), norm, std::max(0.0, 1.0 - kept)};
}

BreedingRun breed_protocol(const FockState& input, int rounds) {
  if (rounds < 0) throw InvalidArgument("breed_protocol: rounds must be >= 0");
  BreedingRun run;
  run.states.push_back(input);
  for (int i = 0; i < rounds; ++i) {
    GateOutcome next = breed_round(run.states.back(), run.states.back());
    run.success_norms.push_back(next.success_norm);
    run.truncation_losses.push_back(next.truncation_loss);
    run.states.push_back(std::move(next.output));
  }
  return run;
}

FockMatrix build_Q0(Index n, Index pad) {
  require_dim(n, "build_Q0");
  if (pad < 0) throw InvalidArgument("build_Q0: pad must be >= 0");
  const auto q = quadratures(n + pad);
  const double sp = std::sqrt(std::numbers::pi);
  const FockMatrix sx = matrix_function(q.x, [&](double lam) { return 2.0 * std::pow(std::sin(lam * sp / 2.0), 2); });
  const FockMatrix sp2 = matrix_function(q.p, [&](double lam) { return 2.0 * std::pow(std::sin(lam * sp), 2); });
  return (sx + sp2).topLeftCorner(n, n);
}

std::shared_ptr<const FockMatrix> cached_Q0(Index n) {
  static std::shared_mutex mutex;
  static std::map<Index, std::shared_ptr<const FockMatrix>> store;
  {
    std::shared_lock lock(mutex);
    if (auto it = store.find(n); it != store.end()) return it->second;
  }
  auto built = std::make_shared<const FockMatrix>(build_Q0(n));
  std::unique_lock lock(mutex);
  return store.emplace(n, std::move(built)).first->second;
}

double gaussian_q0(double r, double mu_x, double mu_p) {
  const double pi = std::numbers::pi;
  const double vx = std::exp(-2.0 * r) / 2.0;
  const double vp = std::exp(2.0 * r) / 2.0;
  return 2.0 - std::cos(std::sqrt(pi) * mu_x) * std::exp(-pi * vx / 2.0) -
         std::cos(2.0 * std::sqrt(pi) * mu_p) * std::exp(-2.0 * pi * vp);
}

namespace {

GaussianQ0Minimum minimize_gaussian_q0() {
  const double sp = std::sqrt(std::numbers::pi);
  Eigen::Vector3d lo(-3.0, 0.0, 0.0);
  Eigen::Vector3d hi(3.0, 2.0 * sp, sp);
  auto f = [](const Eigen::VectorXd& v) { return gaussian_q0(v(0), v(1), v(2)); };

  struct Start {
    double value;
    Eigen::VectorXd x;
  };
  std::vector<Start> starts;
  for (double r : linspace(-3.0, 3.0, 13)) {
    for (double mx : linspace(0.0, 2.0 * sp, 8)) {
      for (double mp : linspace(0.0, sp, 5)) {
        Eigen::VectorXd x(3);
        x << r, mx, mp;
        starts.push_back({f(x), x});
      }
    }
  }
  std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.value < b.value; });

  std::optional<BoxMinimum> best;
  bool any_converged = false;
  for (std::size_t i = 0; i < std::min<std::size_t>(8, starts.size()); ++i) {
    BoxMinimum m = nelder_mead_box(f, starts[i].x, lo, hi, 0.25);
    any_converged = any_converged || m.converged;
    if (!best || m.value < best->value) best = std::move(m);
  }
  if (!any_converged) throw ContractViolation("gaussian_min_q0: no Nelder-Mead start converged");
  const Eigen::VectorXd& x = best->x;
  return {best->value, x(0), x(1), x(2), std::abs(std::abs(x(0)) - 3.0) < 1e-6};
}

}  // namespace

const GaussianQ0Minimum& gaussian_min_q0() {
  static const GaussianQ0Minimum value = minimize_gaussian_q0();
  return value;
}

SqueezingDb gkp_squeezing_db(const FockState& state) {
  const auto q0 = cached_Q0(state.dim());
  return squeezing_db(state.expectation(*q0), gaussian_min_q0().value);
}

}  // namespace sqe
