#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spatent/version.hpp"

namespace spatent {

/// Record of one CLI run: what was executed, on which inputs, with which
/// parameters, and which files it produced. Written after every output file
/// so a complete manifest implies a complete run.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t master_seed = 0;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;

  nlohmann::json to_json() const {
    return {{"command", command},
            {"inputs", inputs},
            {"parameters", parameters},
            {"master_seed", master_seed},
            {"version", kVersion},
            {"outputs", outputs},
            {"duration_seconds", duration_seconds}};
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("cannot write manifest: " + path.string());
    out << to_json().dump(2) << "\n";
  }
};

}  // namespace spatent
