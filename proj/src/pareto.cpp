#include "sqe/pareto.hpp"

#include "sqe/breeding.hpp"
#include "sqe/gate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace sqe {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGeneLo = -1.0;
constexpr double kGeneHi = 1.0;
}  // namespace

std::optional<FockState> decode(const Genome& genome) {
  if (genome.empty() || genome.size() % 2 != 0) throw InvalidArgument("decode: genome length must be even and positive");
  const Index n = static_cast<Index>(genome.size() / 2);
  FockVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = {genome[2 * i], genome[2 * i + 1]};
  if (!(v.norm() > 1e-9)) return std::nullopt;
  return FockState::from_amplitudes(std::move(v));
}

bool dominates(const Objectives& a, const Objectives& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<Objectives>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(points[p], points[q])) {
        dominated_by[p].push_back(q);
      } else if (dominates(points[q], points[p])) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      for (std::size_t q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<Objectives>& points, const std::vector<std::size_t>& front) {
  const std::size_t m = front.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(m);
  for (int obj = 0; obj < 2; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[front[a]][obj] < points[front[b]][obj]; });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    const double range = points[front[order.back()]][obj] - points[front[order.front()]][obj];
    if (!(range > 0.0) || !std::isfinite(range)) continue;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double gap = points[front[order[i + 1]]][obj] - points[front[order[i - 1]]][obj];
      dist[order[i]] += gap / range;
    }
  }
  return dist;
}

double hypervolume_2d(std::vector<Objectives> points, const Objectives& reference) {
  std::erase_if(points, [&](const Objectives& p) { return !(p[0] < reference[0] && p[1] < reference[1]); });
  std::sort(points.begin(), points.end());
  double area = 0.0;
  double ceiling = reference[1];
  for (const Objectives& p : points) {
    if (p[1] < ceiling) {
      area += (reference[0] - p[0]) * (ceiling - p[1]);
      ceiling = p[1];
    }
  }
  return area;
}

void NsgaConfig::validate() const {
  if (population < 4 || population % 2 != 0) throw InvalidArgument("NsgaConfig: population must be even and >= 4");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(crossover_probability)) throw InvalidArgument("NsgaConfig: crossover probability outside [0, 1]");
  if (mutation_probability && !prob(*mutation_probability)) {
    throw InvalidArgument("NsgaConfig: mutation probability outside [0, 1]");
  }
  if (!(crossover_index >= 0.0) || !(mutation_index >= 0.0)) {
    throw InvalidArgument("NsgaConfig: distribution indices must be >= 0");
  }
}

double NsgaConfig::mutation_probability_for(std::size_t genes) const {
  return mutation_probability.value_or(1.0 / static_cast<double>(genes));
}

namespace {

void sbx(Genome& c1, Genome& c2, double eta, Rng& rng) {
  const double power = 1.0 / (eta + 1.0);
  for (std::size_t j = 0; j < c1.size(); ++j) {
    if (rng.uniform() >= 0.5) continue;
    if (std::abs(c1[j] - c2[j]) <= 1e-14) continue;
    const double y1 = std::min(c1[j], c2[j]);
    const double y2 = std::max(c1[j], c2[j]);
    const double u = rng.uniform();
    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, power) : std::pow(1.0 / (2.0 - u * alpha), power);
    };
    const double bq1 = spread(1.0 + 2.0 * (y1 - kGeneLo) / (y2 - y1));
    const double bq2 = spread(1.0 + 2.0 * (kGeneHi - y2) / (y2 - y1));
    double a = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), kGeneLo, kGeneHi);
    double b = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), kGeneLo, kGeneHi);
    if (rng.uniform() < 0.5) std::swap(a, b);
    c1[j] = a;
    c2[j] = b;
  }
}

void polynomial_mutation(Genome& g, double pm, double eta, Rng& rng) {
  const double power = 1.0 / (eta + 1.0);
  const double span = kGeneHi - kGeneLo;
  for (double& y : g) {
    if (rng.uniform() >= pm) continue;
    const double d1 = (y - kGeneLo) / span;
    const double d2 = (kGeneHi - y) / span;
    const double u = rng.uniform();
    double dq;
    if (u <= 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(val, power) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(val, power);
    }
    y = std::clamp(y + dq * span, kGeneLo, kGeneHi);
  }
}

}  // namespace

std::vector<Genome> variation(const std::vector<Genome>& parents, const NsgaConfig& cfg, Rng& rng) {
  if (parents.size() % 2 != 0) throw InvalidArgument("variation: parent count must be even");
  std::vector<Genome> children = parents;
  for (std::size_t i = 0; i + 1 < children.size(); i += 2) {
    if (rng.uniform() < cfg.crossover_probability) sbx(children[i], children[i + 1], cfg.crossover_index, rng);
  }
  for (Genome& c : children) {
    for (double& y : c) y = std::clamp(y, kGeneLo, kGeneHi);
    polynomial_mutation(c, cfg.mutation_probability_for(c.size()), cfg.mutation_index, rng);
  }
  return children;
}

BatchObjective parallel_objective(std::function<Objectives(const Genome&)> f, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return [f = std::move(f), threads](const std::vector<Genome>& batch) {
    std::vector<Objectives> out(batch.size());
    std::vector<std::exception_ptr> errors(batch.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < batch.size(); i = next++) {
        try {
          out[i] = f(batch[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, batch.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return out;
  };
}

namespace {

struct Ranked {
  std::vector<int> rank;
  std::vector<double> crowding;
};

Ranked rank_population(const std::vector<Objectives>& obj) {
  Ranked r{std::vector<int>(obj.size()), std::vector<double>(obj.size())};
  const auto fronts = non_dominated_sort(obj);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    const auto cd = crowding_distance(obj, fronts[f]);
    for (std::size_t i = 0; i < fronts[f].size(); ++i) {
      r.rank[fronts[f][i]] = static_cast<int>(f + 1);
      r.crowding[fronts[f][i]] = cd[i];
    }
  }
  return r;
}

Objectives population_best(const std::vector<Objectives>& obj) {
  Objectives best{kInf, kInf};
  for (const auto& o : obj) {
    best[0] = std::min(best[0], o[0]);
    best[1] = std::min(best[1], o[1]);
  }
  return best;
}

}  // namespace

NsgaRun nsga2(std::size_t genes, const BatchObjective& objective, const NsgaConfig& cfg) {
  cfg.validate();
  if (genes == 0) throw InvalidArgument("nsga2: genome length must be positive");
  Rng rng(cfg.seed);
  const std::size_t n = cfg.population;

  NsgaRun run;
  run.population.resize(n, Genome(genes));
  for (Genome& g : run.population) {
    for (double& y : g) y = rng.uniform(kGeneLo, kGeneHi);
  }
  run.objectives = objective(run.population);
  Ranked ranked = rank_population(run.objectives);
  run.best_per_generation.push_back(population_best(run.objectives));

  // Binary tournament: lower rank, then larger crowding, then lower index.
  auto better = [&](std::size_t a, std::size_t b) {
    if (ranked.rank[a] != ranked.rank[b]) return ranked.rank[a] < ranked.rank[b] ? a : b;
    if (ranked.crowding[a] != ranked.crowding[b]) return ranked.crowding[a] > ranked.crowding[b] ? a : b;
    return std::min(a, b);
  };

  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Genome> parents;
    parents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = rng.index(n);
      const std::size_t b = rng.index(n);
      parents.push_back(run.population[better(a, b)]);
    }
    std::vector<Genome> offspring = variation(parents, cfg, rng);
    std::vector<Objectives> off_obj = objective(offspring);

    std::vector<Genome> pool = std::move(run.population);
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    std::vector<Objectives> pool_obj = std::move(run.objectives);
    pool_obj.insert(pool_obj.end(), off_obj.begin(), off_obj.end());

    const auto fronts = non_dominated_sort(pool_obj);
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (const auto& front : fronts) {
      if (chosen.size() + front.size() <= n) {
        chosen.insert(chosen.end(), front.begin(), front.end());
        if (chosen.size() == n) break;
        continue;
      }
      const auto cd = crowding_distance(pool_obj, front);
      std::vector<std::size_t> order(front.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
      for (std::size_t i = 0; chosen.size() < n; ++i) chosen.push_back(front[order[i]]);
      break;
    }

    run.population.clear();
    run.objectives.clear();
    for (std::size_t idx : chosen) {
      run.population.push_back(std::move(pool[idx]));
      run.objectives.push_back(pool_obj[idx]);
    }
    ranked = rank_population(run.objectives);
    run.best_per_generation.push_back(population_best(run.objectives));
    run.generations_completed = gen + 1;
  }
  run.ranks = ranked.rank;
  run.crowding = ranked.crowding;
  return run;
}

std::function<Objectives(const Genome&)> frontier_objective(FrontierProblem problem, const WitnessSpec& spec,
                                                            const FrontierOptions& options) {
  spec.validate();
  auto witness = cached_witness(spec);
  if (problem == FrontierProblem::kFidelity) {
    auto evaluator = std::make_shared<const FidelityEvaluator>(options.kind, spec.u, spec.phi, spec.dim);
    return [witness, evaluator](const Genome& g) -> Objectives {
      const auto state = decode(g);
      if (!state) return {kInf, kInf};
      try {
        return {state->expectation(*witness), (*evaluator)(*state)};
      } catch (const Annihilated&) {
        return {state->expectation(*witness), kInf};
      }
    };
  }
  if (options.breeding_dim < spec.dim) throw InvalidArgument("frontier: breeding dimension below the witness dimension");
  if (options.breeding_rounds < 0) throw InvalidArgument("frontier: breeding rounds must be >= 0");
  // Warm the shared caches before worker threads start.
  cached_Q0(options.breeding_dim);
  cached_beam_splitter_blocks(2 * options.breeding_dim - 2);
  gaussian_min_q0();
  return [witness, options](const Genome& g) -> Objectives {
    const auto state = decode(g);
    if (!state) return {kInf, kInf};
    const double o1 = state->expectation(*witness);
    try {
      const BreedingRun run = breed_protocol(state->embedded(options.breeding_dim), options.breeding_rounds);
      return {o1, -gkp_squeezing_db(run.final_state()).db};
    } catch (const Annihilated&) {
      return {o1, kInf};
    }
  };
}

EvolveResult evolve(FrontierProblem problem, const WitnessSpec& spec, const NsgaConfig& cfg,
                    const FrontierOptions& options) {
  cfg.validate();
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const BatchObjective objective = parallel_objective(frontier_objective(problem, spec, options), cfg.threads);
  NsgaRun run = nsga2(static_cast<std::size_t>(2 * spec.dim), objective, cfg);
  const double bound = gaussian_bound(spec.u, spec.phi, spec.c).value;

  EvolveResult result;
  for (std::size_t i = 0; i < run.population.size(); ++i) {
    if (run.ranks[i] != 1) continue;
    const auto state = decode(run.population[i]);
    if (!state) continue;
    ParetoPoint p;
    p.genome = run.population[i];
    p.amplitudes = state->amplitudes();
    p.objectives = run.objectives[i];
    p.xi_sqe_db = squeezing_db(p.objectives[0], bound).db;
    p.figure = problem == FrontierProblem::kFidelity ? p.objectives[1] : -p.objectives[1];
    p.rank = 1;
    p.crowding = run.crowding[i];
    result.front.push_back(std::move(p));
  }
  std::stable_sort(result.front.begin(), result.front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.objectives < b.objectives; });
  result.generations_completed = run.generations_completed;
  result.best_per_generation = std::move(run.best_per_generation);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sqe
