#pragma once

// NSGA-II over pure-state genomes: non-dominated sorting, crowding distance,
// simulated-binary crossover, polynomial mutation, and the two frontier
// problems (virtual-gate fidelity and GKP squeezing after breeding).

#include "sqe/fock.hpp"
#include "sqe/witness.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace sqe {

using Objectives = std::array<double, 2>;  // both minimized
using Genome = std::vector<double>;        // (re_0, im_0, re_1, im_1, ...), each in [-1, 1]

/// Amplitudes from a genome; nullopt when the genome norm is below 1e-9.
std::optional<FockState> decode(const Genome& genome);

bool dominates(const Objectives& a, const Objectives& b);

/// Fronts of indices, rank 1 first; indices inside a front ascend.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Objectives>& points);

/// Crowding distance of each member of `front` (indices into `points`), in
/// the order of `front`. Boundary members are +infinity.
std::vector<double> crowding_distance(const std::vector<Objectives>& points, const std::vector<std::size_t>& front);

/// Area dominated by `points` and bounded by `reference` (both objectives minimized).
double hypervolume_2d(std::vector<Objectives> points, const Objectives& reference);

/// Uniform doubles in [0, 1) from the top 53 bits of a 64-bit Mersenne twister,
/// so a seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

struct NsgaConfig {
  std::size_t population = 200;
  std::size_t generations = 500;
  double crossover_probability = 0.9;
  double crossover_index = 15.0;
  std::optional<double> mutation_probability;  // default 1 / (number of genes)
  double mutation_index = 20.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Throws InvalidArgument for an odd or tiny population or probabilities outside [0, 1].
  void validate() const;
  double mutation_probability_for(std::size_t genes) const;
};

/// SBX crossover of consecutive parent pairs followed by polynomial mutation,
/// with genes clipped to [-1, 1]. The parent count must be even.
std::vector<Genome> variation(const std::vector<Genome>& parents, const NsgaConfig& cfg, Rng& rng);

enum class FrontierProblem { kFidelity, kGkp };

inline const char* to_string(FrontierProblem p) { return p == FrontierProblem::kFidelity ? "fidelity" : "gkp"; }

struct FrontierOptions {
  GateKind kind = GateKind::kBeamSplitter;  // fidelity problem
  int breeding_rounds = 2;                  // gkp problem
  Index breeding_dim = 60;                  // decoded states are embedded here before breeding
};

struct ParetoPoint {
  Genome genome;
  FockVector amplitudes;
  Objectives objectives;  // (<O^[N]>, F) or (<O^[N]>, -xi_GKP dB)
  double xi_sqe_db = 0.0;
  double figure = 0.0;    // F, or xi_GKP dB after breeding
  int rank = 1;
  double crowding = 0.0;
};

struct EvolveResult {
  std::vector<ParetoPoint> front;           // rank-1 set, sorted by objective 1 ascending
  std::size_t generations_completed = 0;
  std::vector<Objectives> best_per_generation;  // per-objective population minimum, index 0 = initial
  double wall_seconds = 0.0;
};

/// Evaluates a genome batch; entry i must depend only on genome i.
using BatchObjective = std::function<std::vector<Objectives>(const std::vector<Genome>&)>;

/// Generic NSGA-II over genomes of length `genes`.
struct NsgaRun {
  std::vector<Genome> population;
  std::vector<Objectives> objectives;
  std::vector<int> ranks;
  std::vector<double> crowding;
  std::vector<Objectives> best_per_generation;
  std::size_t generations_completed = 0;
};

NsgaRun nsga2(std::size_t genes, const BatchObjective& objective, const NsgaConfig& cfg);

/// Parallel map of a per-genome objective with results stored by index.
BatchObjective parallel_objective(std::function<Objectives(const Genome&)> f, unsigned threads);

/// Per-genome objectives of the two frontier problems. Invalid genomes map to +infinity.
std::function<Objectives(const Genome&)> frontier_objective(FrontierProblem problem, const WitnessSpec& spec,
                                                            const FrontierOptions& options);

EvolveResult evolve(FrontierProblem problem, const WitnessSpec& spec, const NsgaConfig& cfg,
                    const FrontierOptions& options = {});

}  // namespace sqe
