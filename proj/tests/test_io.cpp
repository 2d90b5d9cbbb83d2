#include "sqe/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using sqe::FockState;
using sqe::FockVector;
using sqe::Json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sqe_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

Json valid_doc() {
  return Json::parse(R"({"dim": 2, "amplitudes": [[0.6, 0.0], [0.0, 0.8]], "metadata": {"tag": "x"}})");
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("state JSON round trip") {
    FockVector v(4);
    v << std::complex<double>(0.1, -0.2), std::complex<double>(1.0 / 3.0, 0.0), std::complex<double>(0, 0.7),
        std::complex<double>(-0.5, 0.25);
    const FockState s = FockState::from_amplitudes(v);
    const Json meta{{"source", "test"}, {"u", 2.5}};
    const auto loaded = sqe::state_from_json(Json::parse(sqe::state_to_json(s, meta).dump()));
    CHECK((loaded.state.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-16);
    CHECK(loaded.metadata == meta);
    CHECK_FALSE(loaded.renormalized);

    const auto path = scratch("round_trip.json");
    sqe::write_state_file(path.string(), s, meta);
    const auto from_file = sqe::read_state_file(path.string());
    CHECK((from_file.state.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-16);
    CHECK(sqe::state_to_json(s)["metadata"] == Json::object());
  }

  TEST_CASE("renormalization is flagged") {
    Json doc = valid_doc();
    doc["amplitudes"] = Json::parse("[[3.0, 0.0], [0.0, 4.0]]");
    const auto loaded = sqe::state_from_json(doc);
    CHECK(loaded.renormalized);
    CHECK(loaded.stored_norm == doctest::Approx(5.0));
    CHECK(std::abs(loaded.state[1] - std::complex<double>(0, 0.8)) < 1e-15);
    doc["amplitudes"] = Json::parse("[[0.6, 0.0], [0.0, 0.8000001]]");
    CHECK_FALSE(sqe::state_from_json(doc).renormalized);
  }

  TEST_CASE("malformed state documents are rejected") {
    auto rejects = [](const std::string& text) {
      CHECK_THROWS_AS(sqe::state_from_json(Json::parse(text)), sqe::InvalidArgument);
    };
    rejects("[1, 2]");
    rejects(R"({"amplitudes": [[1, 0]]})");
    rejects(R"({"dim": 1.5, "amplitudes": [[1, 0]]})");
    rejects(R"({"dim": 0, "amplitudes": []})");
    rejects(R"({"dim": 2, "amplitudes": [[1, 0]]})");
    rejects(R"({"dim": 1, "amplitudes": [[1]]})");
    rejects(R"({"dim": 1, "amplitudes": [["1", 0]]})");
    rejects(R"({"dim": 1, "amplitudes": [[0, 0]]})");
    rejects(R"({"dim": 1, "amplitudes": [[1, 0]], "metadata": 3})");
    rejects(R"({"dim": 1, "amplitudes": [[1, 0]], "extra": true})");
    Json inf = valid_doc();
    inf["amplitudes"][0][0] = std::numeric_limits<double>::infinity();  // serialized as null
    CHECK_THROWS_AS(sqe::state_from_json(inf), sqe::InvalidArgument);
  }

  TEST_CASE("file errors") {
    CHECK_THROWS_AS(sqe::read_json_file("/nonexistent/dir/file.json"), sqe::InvalidArgument);
    const auto path = scratch("broken.json");
    std::ofstream(path) << "{\"dim\": 2, ";
    CHECK_THROWS_AS(sqe::read_json_file(path.string()), sqe::InvalidArgument);
    CHECK_THROWS_AS(sqe::write_json_file("/nonexistent/dir/out.json", Json::object()), sqe::InvalidArgument);
  }

  TEST_CASE("doubles print with enough digits to round trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1.0 - 1e-16}) {
      CHECK(std::strtod(sqe::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(sqe::format_double(2.0) == "2");
  }

  TEST_CASE("CSV writer") {
    std::ostringstream out;
    sqe::CsvWriter csv(out);
    csv.header({"a", "b"});
    csv.row({0.5, 1.0 / 3.0});
    CHECK(out.str() == "a,b\n0.5,0.33333333333333331\n");
  }
}
