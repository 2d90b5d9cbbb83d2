#pragma once

// State files (JSON), reports (JSON) and tables (CSV).
//
// State file layout:
//   {"dim": N, "amplitudes": [[re, im], ...], "metadata": {...}}
// Two-mode data is never written; single-mode levels are listed from |0>.

#include "sqe/fock.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace sqe {

using Json = nlohmann::ordered_json;

struct LoadedState {
  FockState state;
  Json metadata;
  bool renormalized = false;  // stored norm differed from 1 by more than 1e-6
  double stored_norm = 1.0;
};

Json state_to_json(const FockState& state, const Json& metadata = Json::object());
LoadedState state_from_json(const Json& doc);

/// Throws InvalidArgument on unreadable or malformed files. A renormalization
/// warning goes to stderr.
LoadedState read_state_file(const std::string& path);
void write_state_file(const std::string& path, const FockState& state, const Json& metadata = Json::object());

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

/// printf %.17g: 17 significant digits, enough for an exact round trip.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
};

}  // namespace sqe
