#include "sqe/io.hpp"
#include "sqe/states.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

using sqe::Json;

namespace {

namespace fs = std::filesystem;

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sqe_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

// Runs the CLI with stdout/stderr captured in files; returns the exit status.
int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" SQE_CLI_PATH "' " + args + " >'" + path("stdout.txt") + "' 2>'" +
                          path("stderr.txt") + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and parse errors") {
    CHECK(cli("--help") == 0);
    CHECK(cli("witness --help") == 0);
    CHECK(cli("") != 0);
    CHECK(cli("bound --no-such-flag") == 2);
    CHECK(cli("bound --u notanumber") == 2);
    CHECK(cli("bound --u -1") == 2);
  }

  TEST_CASE("cat and witness round trip") {
    REQUIRE(cli("cat --u 2 --r 0.3 --phi 0 --dim 30 --out " + path("cat.json")) == 0);
    const auto loaded = sqe::read_state_file(path("cat.json"));
    const auto ref = sqe::squeezed_cat({2.0, 0.3, 0.0, 30});
    CHECK((loaded.state.amplitudes() - ref.amplitudes()).cwiseAbs().maxCoeff() < 1e-15);

    REQUIRE(cli("witness --state " + path("cat.json") + " --u 2 --c 5 --out " + path("w.json")) == 0);
    const Json w = sqe::read_json_file(path("w.json"));
    const sqe::WitnessSpec spec{2.0, 0.0, 5.0, 30, 100};
    CHECK(w["expectation"].get<double>() == doctest::Approx(ref.expectation(sqe::build_witness(spec))).epsilon(1e-12));
    CHECK(w["xi_db"].get<double>() == doctest::Approx(sqe::sqe_squeezing_db(ref, spec).db).epsilon(1e-12));
    CHECK(w["dim"] == 30);

    CHECK(cli("witness --state " + path("cat.json") + " --dim 20") == 3);
    CHECK(cli("cat --u 4 --dim 8 --out " + path("small.json")) == 3);
  }

  TEST_CASE("malformed inputs exit with code 2") {
    std::ofstream(path("broken.json")) << "{ not json";
    CHECK(cli("witness --state " + path("broken.json")) == 2);
    std::ofstream(path("wrongdim.json")) << R"({"dim": 3, "amplitudes": [[1, 0]]})";
    CHECK(cli("witness --state " + path("wrongdim.json")) == 2);
    CHECK(cli("witness --state " + path("missing.json")) == 2);
    std::ofstream(path("badcfg.json")) << R"({"u": 2, "bogus": 1})";
    CHECK(cli("bound --config " + path("badcfg.json")) == 2);
  }

  TEST_CASE("config file merges under explicit flags") {
    std::ofstream(path("cfg.json")) << R"({"u": 2.5, "c": 4.0})";
    REQUIRE(cli("bound --config " + path("cfg.json") + " --out " + path("b1.json")) == 0);
    const Json b1 = sqe::read_json_file(path("b1.json"));
    CHECK(b1["value"].get<double>() == doctest::Approx(sqe::gaussian_bound(2.5, 0.0, 4.0).value));
    REQUIRE(cli("bound --config " + path("cfg.json") + " --u 1.5 --out " + path("b2.json")) == 0);
    const Json b2 = sqe::read_json_file(path("b2.json"));
    CHECK(b2["value"].get<double>() == doctest::Approx(sqe::gaussian_bound(1.5, 0.0, 4.0).value));
  }

  TEST_CASE("two-mode cap maps to exit code 4") {
    REQUIRE(cli("cat --u 1 --dim 10 --out " + path("c10.json")) == 0);
    CHECK(cli("gate --method full --u 1 --state " + path("c10.json"), "SQE_TWO_MODE_MAX_DIM=6") == 4);
    REQUIRE(cli("gate --method full --u 1 --state " + path("c10.json") + " --out " + path("full.json")) == 0);
    REQUIRE(cli("gate --u 1 --state " + path("c10.json") + " --out " + path("transfer.json")) == 0);
    const double f_full = sqe::read_json_file(path("full.json"))["fidelity"].get<double>();
    const double f_transfer = sqe::read_json_file(path("transfer.json"))["fidelity"].get<double>();
    CHECK(f_full == doctest::Approx(f_transfer).epsilon(1e-9));
  }

  TEST_CASE("wigner grid of the vacuum") {
    REQUIRE(cli("cat --u 0 --dim 6 --out " + path("vac.json")) == 0);
    REQUIRE(cli("wigner --state " + path("vac.json") + " --range 1 --step 0.5 --out " + path("w.csv")) == 0);
    std::istringstream rows(slurp(path("w.csv")));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "x,p,w");
    int count = 0;
    bool center = false;
    while (std::getline(rows, line)) {
      ++count;
      double x, p, w;
      char c1, c2;
      std::istringstream(line) >> x >> c1 >> p >> c2 >> w;
      if (x == 0.0 && p == 0.0) {
        center = true;
        CHECK(w == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
      }
    }
    CHECK(count == 25);
    CHECK(center);
  }

  TEST_CASE("zero breeding rounds return the input state and metadata") {
    sqe::write_state_file(path("in.json"), sqe::squeezed_cat({1.7, 0.4, 0.0, 12}), Json{{"origin", "unit test"}});
    REQUIRE(cli("breed --rounds 0 --state " + path("in.json") + " --out " + path("out.json") + " --report " +
                path("rep.json")) == 0);
    const auto in = sqe::read_state_file(path("in.json"));
    const auto out = sqe::read_state_file(path("out.json"));
    CHECK((in.state.amplitudes() - out.state.amplitudes()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(out.metadata == in.metadata);
    const Json rep = sqe::read_json_file(path("rep.json"));
    CHECK(rep["rounds"] == 0);
    CHECK(rep["xi_gkp_db"].size() == 1);

    REQUIRE(cli("breed --rounds 1 --state " + path("in.json") + " --out " + path("out1.json") + " --report " +
                path("rep1.json")) == 0);
    const auto bred = sqe::read_state_file(path("out1.json"));
    CHECK(bred.metadata.contains("breeding"));
    CHECK(bred.metadata["origin"] == "unit test");
    CHECK(sqe::read_json_file(path("rep1.json"))["success_norms"].size() == 1);
  }

  TEST_CASE("frontier runs are reproducible and need a seed") {
    const std::string common = "frontier --dim 4 --gens 5 --pop 20 --seed 1 --threads 2 --out ";
    REQUIRE(cli(common + path("f1.csv")) == 0);
    REQUIRE(cli(common + path("f2.csv")) == 0);
    CHECK(slurp(path("f1.csv")) == slurp(path("f2.csv")));
    CHECK(slurp(path("f1.csv.genomes.csv")) == slurp(path("f2.csv.genomes.csv")));
    CHECK(slurp(path("f1.csv")).rfind("xi_sqe_db,fidelity,expectation\n", 0) == 0);
    const Json meta = sqe::read_json_file(path("f1.csv.meta.json"));
    CHECK(meta["config"]["seed"] == 1);
    CHECK(cli("frontier --dim 4 --gens 1 --pop 8 --out " + path("f3.csv")) == 2);
    CHECK(cli("frontier --dim 4 --gens 1 --pop 7 --seed 1 --out " + path("f3.csv")) == 2);
  }

  TEST_CASE("ground-state scan writes one file per N and an index") {
    REQUIRE(cli("ground --dim-min 3 --dim-max 5 --out " + path("ground")) == 0);
    for (int n = 3; n <= 5; ++n) CHECK(fs::exists(path("ground/ground_N" + std::to_string(n) + ".json")));
    std::istringstream rows(slurp(path("ground/index.csv")));
    std::string line;
    int count = 0;
    std::getline(rows, line);
    CHECK(line.rfind("N,eigenvalue,xi_db,stellar_bound", 0) == 0);
    while (std::getline(rows, line)) ++count;
    CHECK(count == 3);
    const auto n4 = sqe::read_state_file(path("ground/ground_N4.json"));
    const auto direct = sqe::optimal_sqe_approximation({3.0, 0.0, 10.0, 4, 100});
    CHECK(sqe::overlap_fidelity(n4.state, direct.state) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("opaccuracy table") {
    REQUIRE(cli("opaccuracy --n-max 5 --out " + path("acc.csv")) == 0);
    std::istringstream rows(slurp(path("acc.csv")));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "n,exact,approx,rel_error");
    int count = 0;
    while (std::getline(rows, line)) ++count;
    CHECK(count == 6);
  }
}
