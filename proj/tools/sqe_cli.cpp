// Command-line front end: one subcommand per pipeline, JSON for states and
// reports, CSV for tables. Exit codes: 0 ok, 2 input error, 3 contract
// violation, 4 resource cap.

#include "sqe/breeding.hpp"
#include "sqe/gate.hpp"
#include "sqe/io.hpp"
#include "sqe/optimize.hpp"
#include "sqe/pareto.hpp"
#include "sqe/states.hpp"
#include "sqe/witness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using sqe::Json;

struct RunConfig {
  double u = 3.0;
  double phi = 0.0;
  double c = 10.0;
  std::optional<long> dim;
  int k = sqe::kDefaultSharpness;
  double r = 0.0;
  double max_loss = sqe::kDefaultMaxLoss;
  std::string kind = "bs";
  std::string method = "transfer";
  int rounds = 2;
  std::optional<long> breed_dim;
  std::optional<std::uint64_t> seed;
  std::string problem = "fidelity";
  long pop = 200;
  long gens = 500;
  double pc = 0.9;
  double eta_c = 15.0;
  std::optional<double> pm;
  double eta_m = 20.0;
  unsigned threads = 0;
  long dim_min = 3;
  long dim_max = 12;
  long n_max = 30;
  double range = 5.0;
  double step = 0.1;
  std::string state;
  std::string out;
  std::string report;
};

// One configurable field: how to read it from a config file, echo it, and
// copy it from the flag-bound copy into the effective configuration.
struct Field {
  std::string name;
  std::function<void(RunConfig&, const Json&)> load;
  std::function<void(Json&, const RunConfig&)> dump;
  std::function<void(RunConfig&, const RunConfig&)> copy;
};

template <typename T>
Field field(std::string name, T RunConfig::*member) {
  return {name,
          [member, name](RunConfig& cfg, const Json& v) {
            try {
              if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
                cfg.*member = v.is_null() ? T{} : T{v.get<typename T::value_type>()};
              } else {
                cfg.*member = v.get<T>();
              }
            } catch (const Json::exception&) {
              throw sqe::InvalidArgument("config: key '" + name + "' has the wrong type");
            }
          },
          [member, name](Json& j, const RunConfig& cfg) {
            if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
              j[name] = (cfg.*member) ? Json(*(cfg.*member)) : Json(nullptr);
            } else {
              j[name] = cfg.*member;
            }
          },
          [member](RunConfig& dst, const RunConfig& src) { dst.*member = src.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      field("u", &RunConfig::u),           field("phi", &RunConfig::phi),
      field("c", &RunConfig::c),           field("dim", &RunConfig::dim),
      field("k", &RunConfig::k),           field("r", &RunConfig::r),
      field("max_loss", &RunConfig::max_loss), field("kind", &RunConfig::kind),
      field("method", &RunConfig::method),
      field("rounds", &RunConfig::rounds), field("breed_dim", &RunConfig::breed_dim),
      field("seed", &RunConfig::seed),     field("problem", &RunConfig::problem),
      field("pop", &RunConfig::pop),       field("gens", &RunConfig::gens),
      field("pc", &RunConfig::pc),         field("eta_c", &RunConfig::eta_c),
      field("pm", &RunConfig::pm),         field("eta_m", &RunConfig::eta_m),
      field("threads", &RunConfig::threads), field("dim_min", &RunConfig::dim_min),
      field("dim_max", &RunConfig::dim_max), field("n_max", &RunConfig::n_max),
      field("range", &RunConfig::range),   field("step", &RunConfig::step),
      field("state", &RunConfig::state),   field("out", &RunConfig::out),
      field("report", &RunConfig::report),
  };
  return all;
}

const Field& field_named(const std::string& name) {
  for (const Field& f : fields()) {
    if (f.name == name) return f;
  }
  throw std::logic_error("no config field " + name);
}

Json echo(const RunConfig& cfg) {
  Json j = Json::object();
  for (const Field& f : fields()) f.dump(j, cfg);
  return j;
}

// A subcommand with flag bindings into `flags`; after parsing, `resolve`
// layers config file values and then explicitly given flags over defaults.
class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help) : sub_(app.add_subcommand(name, help)) {
    sub_->add_option("--config", config_path_, "JSON file with configuration keys");
  }

  template <typename T>
  Command& opt(const std::string& flag, T RunConfig::*member, const std::string& help) {
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    CLI::Option* o = nullptr;
    if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
      o = sub_->add_option(flag, flags_.*member, help);
    } else {
      o = sub_->add_option(flag, flags_.*member, help)->capture_default_str();
    }
    bound_.push_back({o, key});
    return *this;
  }

  CLI::App* app() const { return sub_; }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path_.empty()) {
      const Json doc = sqe::read_json_file(config_path_);
      if (!doc.is_object()) throw sqe::InvalidArgument("config: top level must be an object");
      for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const Field& f : fields()) {
          if (f.name == key) {
            f.load(cfg, value);
            known = true;
          }
        }
        if (!known) throw sqe::InvalidArgument("config: unknown key '" + key + "'");
      }
    }
    for (const auto& [o, key] : bound_) {
      if (o->count() > 0) field_named(key).copy(cfg, flags_);
    }
    return cfg;
  }

 private:
  CLI::App* sub_;
  std::string config_path_;
  RunConfig flags_;
  std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

void add_witness_flags(Command& cmd) {
  cmd.opt("--u", &RunConfig::u, "comb peak position u > 0")
      .opt("--phi", &RunConfig::phi, "superposition phase")
      .opt("--c", &RunConfig::c, "balancing weight c >= 0")
      .opt("--k", &RunConfig::k, "sharpness exponent of the sin^2k comb")
      .opt("--dim", &RunConfig::dim, "truncation dimension N");
}

sqe::GateKind parse_kind(const std::string& s) {
  if (s == "bs") return sqe::GateKind::kBeamSplitter;
  if (s == "qnd") return sqe::GateKind::kQnd;
  throw sqe::InvalidArgument("kind must be 'bs' or 'qnd', got '" + s + "'");
}

sqe::WitnessSpec witness_spec(const RunConfig& cfg, long default_dim) {
  sqe::WitnessSpec spec{cfg.u, cfg.phi, cfg.c, cfg.dim.value_or(default_dim), cfg.k};
  spec.validate();
  return spec;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw sqe::InvalidArgument(std::string(flag) + " is required");
}

void emit(const Json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    sqe::write_json_file(path, doc);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sqe::InvalidArgument("cannot write '" + path + "'");
  return out;
}

Json bound_json(const sqe::GaussianBound& b) {
  Json j;
  j["value"] = b.value;
  j["branch"] = sqe::to_string(b.branch);
  j["argmin_r"] = b.argmin_r ? Json(*b.argmin_r) : Json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------

void run_witness(const RunConfig& cfg) {
  require(cfg.state, "--state");
  const sqe::LoadedState loaded = sqe::read_state_file(cfg.state);
  const sqe::WitnessSpec spec = witness_spec(cfg, loaded.state.dim());
  if (spec.dim != loaded.state.dim()) {
    throw sqe::ContractViolation("witness dimension " + std::to_string(spec.dim) + " differs from the state's " +
                                 std::to_string(loaded.state.dim()));
  }
  const sqe::GaussianBound bound = sqe::gaussian_bound(spec.u, spec.phi, spec.c);
  const double expectation = loaded.state.expectation(*sqe::cached_witness(spec));
  const sqe::SqueezingDb xi = sqe::squeezing_db(expectation, bound.value);
  Json doc;
  doc["expectation"] = expectation;
  doc["gaussian_bound"] = bound.value;
  doc["branch"] = sqe::to_string(bound.branch);
  doc["argmin_r"] = bound.argmin_r ? Json(*bound.argmin_r) : Json(nullptr);
  doc["xi_db"] = xi.db;
  doc["clamped"] = xi.clamped;
  doc["dim"] = spec.dim;
  doc["metadata"] = {{"config", echo(cfg)}};
  emit(doc, cfg.out);
}

void run_bound(const RunConfig& cfg) {
  const sqe::GaussianBound bound = sqe::gaussian_bound(cfg.u, cfg.phi, cfg.c);
  Json doc = bound_json(bound);
  doc["metadata"] = {{"config", echo(cfg)}};
  emit(doc, cfg.out);
}

void run_ground(const RunConfig& cfg) {
  require(cfg.out, "--out");
  if (cfg.dim_min < 1 || cfg.dim_max < cfg.dim_min) throw sqe::InvalidArgument("need 1 <= dim-min <= dim-max");
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);
  std::ofstream index = open_out((dir / "index.csv").string());
  sqe::CsvWriter csv(index);
  csv.header({"N", "eigenvalue", "xi_db", "stellar_bound"});
  index.flush();
  for (long n = cfg.dim_min; n <= cfg.dim_max; ++n) {
    RunConfig at = cfg;
    at.dim = n;
    const sqe::GroundStateReport rep = sqe::optimal_sqe_approximation(witness_spec(at, n));
    Json meta;
    meta["eigenvalue"] = rep.eigenvalue;
    meta["xi_db"] = rep.xi.db;
    meta["stellar_bound"] = rep.stellar_bound;
    meta["gap"] = rep.gap;
    meta["degenerate"] = rep.degenerate;
    meta["config"] = echo(at);
    sqe::write_state_file((dir / ("ground_N" + std::to_string(n) + ".json")).string(), rep.state, meta);
    csv.row({static_cast<double>(n), rep.eigenvalue, rep.xi.db, static_cast<double>(rep.stellar_bound)});
    index.flush();
  }
}

void run_gate(const RunConfig& cfg) {
  require(cfg.state, "--state");
  const sqe::LoadedState loaded = sqe::read_state_file(cfg.state);
  if (cfg.dim && *cfg.dim != loaded.state.dim()) throw sqe::ContractViolation("--dim differs from the state's dimension");
  const sqe::GateKind kind = parse_kind(cfg.kind);
  if (cfg.method != "transfer" && cfg.method != "full") throw sqe::InvalidArgument("method must be 'transfer' or 'full'");
  const sqe::FidelityEvaluator eval(kind, cfg.u, cfg.phi, loaded.state.dim());
  const sqe::GateOutcome outcome = cfg.method == "full" ? sqe::conditional_output_full_coupler(loaded.state, kind)
                                                        : eval.outcome(loaded.state);
  Json doc;
  doc["fidelity"] = eval.fidelity(outcome);
  doc["success_norm"] = outcome.success_norm;
  doc["kind"] = sqe::to_string(kind);
  doc["u"] = cfg.u;
  doc["phi"] = cfg.phi;
  doc["dim"] = loaded.state.dim();
  doc["truncation_loss"] = outcome.truncation_loss;
  doc["metadata"] = {{"config", echo(cfg)}};
  emit(doc, cfg.report.empty() ? cfg.out : cfg.report);
}

void run_breed(const RunConfig& cfg) {
  require(cfg.state, "--state");
  require(cfg.out, "--out");
  const sqe::LoadedState loaded = sqe::read_state_file(cfg.state);
  sqe::FockState input = loaded.state;
  if (cfg.breed_dim) {
    if (*cfg.breed_dim < input.dim()) throw sqe::InvalidArgument("--breed-dim is below the state dimension");
    input = input.embedded(*cfg.breed_dim);
  }
  const sqe::BreedingRun run = sqe::breed_protocol(input, cfg.rounds);
  Json xi = Json::array();
  for (const auto& s : run.states) xi.push_back(sqe::gkp_squeezing_db(s).db);
  Json meta = loaded.metadata;
  if (cfg.rounds > 0) meta["breeding"] = {{"rounds", cfg.rounds}, {"config", echo(cfg)}};
  sqe::write_state_file(cfg.out, run.final_state(), meta);
  Json doc;
  doc["rounds"] = cfg.rounds;
  doc["xi_gkp_db"] = std::move(xi);
  doc["success_norms"] = run.success_norms;
  doc["truncation_losses"] = run.truncation_losses;
  doc["gaussian_min_q0"] = sqe::gaussian_min_q0().value;
  doc["state_file"] = cfg.out;
  doc["metadata"] = {{"config", echo(cfg)}};
  emit(doc, cfg.report);
}

void run_frontier(const RunConfig& cfg) {
  if (!cfg.seed) throw sqe::InvalidArgument("frontier is randomized; --seed is required");
  require(cfg.out, "--out");
  sqe::FrontierProblem problem;
  if (cfg.problem == "fidelity") {
    problem = sqe::FrontierProblem::kFidelity;
  } else if (cfg.problem == "gkp") {
    problem = sqe::FrontierProblem::kGkp;
  } else {
    throw sqe::InvalidArgument("problem must be 'fidelity' or 'gkp'");
  }
  if (cfg.pop < 0 || cfg.gens < 0) throw sqe::InvalidArgument("pop and gens must be non-negative");
  sqe::NsgaConfig nsga;
  nsga.population = static_cast<std::size_t>(cfg.pop);
  nsga.generations = static_cast<std::size_t>(cfg.gens);
  nsga.crossover_probability = cfg.pc;
  nsga.crossover_index = cfg.eta_c;
  nsga.mutation_probability = cfg.pm;
  nsga.mutation_index = cfg.eta_m;
  nsga.seed = *cfg.seed;
  nsga.threads = cfg.threads;
  sqe::FrontierOptions options;
  options.kind = parse_kind(cfg.kind);
  options.breeding_rounds = cfg.rounds;
  options.breeding_dim = cfg.breed_dim.value_or(60);
  const sqe::WitnessSpec spec = witness_spec(cfg, 6);

  const sqe::EvolveResult result = sqe::evolve(problem, spec, nsga, options);

  std::ofstream out = open_out(cfg.out);
  sqe::CsvWriter csv(out);
  csv.header({"xi_sqe_db", problem == sqe::FrontierProblem::kFidelity ? "fidelity" : "gkp_db", "expectation"});
  std::ofstream genomes = open_out(cfg.out + ".genomes.csv");
  sqe::CsvWriter gcsv(genomes);
  std::vector<std::string> cols;
  for (long i = 0; i < spec.dim; ++i) {
    cols.push_back("re" + std::to_string(i));
    cols.push_back("im" + std::to_string(i));
  }
  gcsv.header(cols);
  for (const auto& p : result.front) {
    csv.row({p.xi_sqe_db, p.figure, p.objectives[0]});
    gcsv.row(p.genome);
  }
  Json meta;
  meta["config"] = echo(cfg);
  meta["seed"] = *cfg.seed;
  meta["generations_completed"] = result.generations_completed;
  meta["front_size"] = result.front.size();
  meta["wall_seconds"] = result.wall_seconds;
  sqe::write_json_file(cfg.out + ".meta.json", meta);
}

void run_wigner(const RunConfig& cfg) {
  require(cfg.state, "--state");
  require(cfg.out, "--out");
  if (!(cfg.range > 0.0) || !(cfg.step > 0.0)) throw sqe::InvalidArgument("range and step must be positive");
  const sqe::LoadedState loaded = sqe::read_state_file(cfg.state);
  const auto count = static_cast<std::size_t>(std::llround(2.0 * cfg.range / cfg.step)) + 1;
  const std::vector<double> grid = sqe::linspace(-cfg.range, cfg.range, count);
  const Eigen::MatrixXd w = sqe::wigner(loaded.state, grid, grid);
  std::ofstream out = open_out(cfg.out);
  sqe::CsvWriter csv(out);
  csv.header({"x", "p", "w"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) csv.row({grid[i], grid[j], w(i, j)});
  }
}

void run_opaccuracy(const RunConfig& cfg) {
  require(cfg.out, "--out");
  const auto rows = sqe::accuracy_scan(cfg.u, cfg.k, cfg.n_max, cfg.phi);
  std::ofstream out = open_out(cfg.out);
  sqe::CsvWriter csv(out);
  csv.header({"n", "exact", "approx", "rel_error"});
  for (const auto& r : rows) csv.row({static_cast<double>(r.n), r.exact, r.approx, r.rel_error});
}

void run_cat(const RunConfig& cfg) {
  require(cfg.out, "--out");
  const sqe::CatSpec spec{cfg.u, cfg.r, cfg.phi, cfg.dim.value_or(40)};
  const sqe::CatBuild built = sqe::squeezed_cat_with_loss(spec);
  if (built.truncation_loss >= cfg.max_loss) sqe::squeezed_cat(spec, cfg.max_loss);  // throws with the required N
  Json meta;
  meta["truncation_loss"] = built.truncation_loss;
  meta["config"] = echo(cfg);
  sqe::write_state_file(cfg.out, built.state, meta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear-squeezing witnesses, virtual gates, GKP breeding and Pareto frontiers"};
  app.require_subcommand(1);

  std::vector<std::pair<std::unique_ptr<Command>, std::function<void(const RunConfig&)>>> commands;
  auto make = [&](const std::string& name, const std::string& help, auto runner) -> Command& {
    commands.emplace_back(std::make_unique<Command>(app, name, help), runner);
    return *commands.back().first;
  };

  Command& witness = make("witness", "witness expectation and squeezing in dB for a state file", run_witness);
  add_witness_flags(witness);
  witness.opt("--state", &RunConfig::state, "input state file").opt("--out", &RunConfig::out, "report path (stdout if absent)");

  Command& bound = make("bound", "Gaussian benchmark of the witness", run_bound);
  bound.opt("--u", &RunConfig::u, "comb peak position")
      .opt("--phi", &RunConfig::phi, "superposition phase")
      .opt("--c", &RunConfig::c, "balancing weight")
      .opt("--out", &RunConfig::out, "report path (stdout if absent)");

  Command& ground = make("ground", "witness ground states over a range of N", run_ground);
  add_witness_flags(ground);
  ground.opt("--dim-min", &RunConfig::dim_min, "smallest N")
      .opt("--dim-max", &RunConfig::dim_max, "largest N")
      .opt("--out", &RunConfig::out, "output directory");

  Command& gate = make("gate", "virtual-gate conditional output and interaction fidelity", run_gate);
  gate.opt("--state", &RunConfig::state, "resource state file")
      .opt("--kind", &RunConfig::kind, "bs or qnd")
      .opt("--method", &RunConfig::method, "transfer (structured, default) or full (N^2 x N^2 coupler)")
      .opt("--u", &RunConfig::u, "target displacement")
      .opt("--phi", &RunConfig::phi, "target phase")
      .opt("--dim", &RunConfig::dim, "expected resource dimension")
      .opt("--out", &RunConfig::out, "report path (stdout if absent)")
      .opt("--report", &RunConfig::report, "alias of --out");

  Command& breed = make("breed", "post-selected breeding rounds and GKP squeezing", run_breed);
  breed.opt("--state", &RunConfig::state, "input state file")
      .opt("--rounds", &RunConfig::rounds, "breeding rounds m")
      .opt("--breed-dim", &RunConfig::breed_dim, "embed the input at this dimension first")
      .opt("--out", &RunConfig::out, "output state file")
      .opt("--report", &RunConfig::report, "report path (stdout if absent)");

  Command& frontier = make("frontier", "NSGA-II Pareto frontier", run_frontier);
  add_witness_flags(frontier);
  frontier.opt("--problem", &RunConfig::problem, "fidelity or gkp")
      .opt("--seed", &RunConfig::seed, "64-bit seed (required)")
      .opt("--pop", &RunConfig::pop, "population size (even)")
      .opt("--gens", &RunConfig::gens, "generations")
      .opt("--pc", &RunConfig::pc, "crossover probability")
      .opt("--eta-c", &RunConfig::eta_c, "SBX distribution index")
      .opt("--pm", &RunConfig::pm, "per-gene mutation probability (default 1/(2N))")
      .opt("--eta-m", &RunConfig::eta_m, "mutation distribution index")
      .opt("--threads", &RunConfig::threads, "worker threads (0 = all cores)")
      .opt("--kind", &RunConfig::kind, "gate for the fidelity problem")
      .opt("--rounds", &RunConfig::rounds, "breeding rounds for the gkp problem")
      .opt("--breed-dim", &RunConfig::breed_dim, "breeding dimension for the gkp problem")
      .opt("--out", &RunConfig::out, "frontier CSV (sidecars get .genomes.csv and .meta.json)");

  Command& wig = make("wigner", "Wigner function on a square grid", run_wigner);
  wig.opt("--state", &RunConfig::state, "input state file")
      .opt("--range", &RunConfig::range, "grid spans [-range, range] in x and p")
      .opt("--step", &RunConfig::step, "grid spacing")
      .opt("--out", &RunConfig::out, "output CSV");

  Command& acc = make("opaccuracy", "per-level accuracy of the sin^2k comb", run_opaccuracy);
  acc.opt("--u", &RunConfig::u, "comb peak position")
      .opt("--phi", &RunConfig::phi, "phase")
      .opt("--k", &RunConfig::k, "sharpness exponent")
      .opt("--n-max", &RunConfig::n_max, "largest Fock level")
      .opt("--out", &RunConfig::out, "output CSV");

  Command& cat = make("cat", "squeezed cat state file", run_cat);
  cat.opt("--u", &RunConfig::u, "displacement")
      .opt("--r", &RunConfig::r, "squeezing")
      .opt("--phi", &RunConfig::phi, "relative phase")
      .opt("--dim", &RunConfig::dim, "dimension")
      .opt("--max-loss", &RunConfig::max_loss, "largest tolerated truncation loss")
      .opt("--out", &RunConfig::out, "output state file");

  int code = 0;
  try {
    app.parse(argc, argv);
    for (auto& [cmd, runner] : commands) {
      if (cmd->app()->parsed()) runner(cmd->resolve());
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    code = rc == 0 ? 0 : static_cast<int>(sqe::ExitCode::kInput);
  } catch (const sqe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = static_cast<int>(e.code());
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = static_cast<int>(sqe::ExitCode::kInput);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  }
  return code;
}
