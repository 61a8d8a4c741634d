#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace dampwave {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentOutput {
  std::string name;
  std::vector<Check> checks;
  // (file name, contents); CSVs are byte-stable for a given seed.
  std::vector<std::pair<std::string, std::string>> files;
  nlohmann::json summary;

  bool passed() const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
};

const std::vector<ExperimentInfo>& list_experiments();

// Throws std::invalid_argument for an unknown name.
ExperimentOutput run_experiment(const std::string& name, std::uint64_t seed = 1);

}  // namespace dampwave
