#include "sqe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sqe {

Json state_to_json(const FockState& state, const Json& metadata) {
  Json amps = Json::array();
  for (Index n = 0; n < state.dim(); ++n) amps.push_back({state[n].real(), state[n].imag()});
  Json doc;
  doc["dim"] = state.dim();
  doc["amplitudes"] = std::move(amps);
  doc["metadata"] = metadata.is_null() ? Json::object() : metadata;
  return doc;
}

LoadedState state_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("state file: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "dim" && key != "amplitudes" && key != "metadata") {
      throw InvalidArgument("state file: unknown key '" + key + "'");
    }
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw InvalidArgument("state file: integer 'dim' required");
  if (!doc.contains("amplitudes") || !doc["amplitudes"].is_array()) {
    throw InvalidArgument("state file: 'amplitudes' array required");
  }
  const auto dim = doc["dim"].get<long long>();
  const Json& amps = doc["amplitudes"];
  if (dim < 1) throw InvalidArgument("state file: 'dim' must be >= 1");
  if (static_cast<long long>(amps.size()) != dim) {
    throw InvalidArgument("state file: 'amplitudes' has " + std::to_string(amps.size()) + " entries, 'dim' says " +
                          std::to_string(dim));
  }
  FockVector v(dim);
  for (long long n = 0; n < dim; ++n) {
    const Json& pair = amps[n];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw InvalidArgument("state file: amplitude " + std::to_string(n) + " is not a [re, im] pair");
    }
    v(n) = {pair[0].get<double>(), pair[1].get<double>()};
    if (!std::isfinite(v(n).real()) || !std::isfinite(v(n).imag())) {
      throw InvalidArgument("state file: amplitude " + std::to_string(n) + " is not finite");
    }
  }
  Json metadata = doc.value("metadata", Json::object());
  if (!metadata.is_object()) throw InvalidArgument("state file: 'metadata' must be an object");
  const double norm = v.norm();
  if (!(norm > 0.0)) throw InvalidArgument("state file: zero state");
  const bool off = std::abs(norm - 1.0) > 1e-6;
  return {FockState::from_amplitudes(std::move(v)), std::move(metadata), off, norm};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

LoadedState read_state_file(const std::string& path) {
  LoadedState loaded = state_from_json(read_json_file(path));
  if (loaded.renormalized) {
    std::cerr << "warning: state in '" << path << "' had norm " << format_double(loaded.stored_norm)
              << "; renormalized\n";
  }
  return loaded;
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

void write_state_file(const std::string& path, const FockState& state, const Json& metadata) {
  write_json_file(path, state_to_json(state, metadata));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

}  // namespace sqe
