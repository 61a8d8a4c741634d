#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dampwave/beam.hpp"
#include "dampwave/damping.hpp"
#include "dampwave/geodesic.hpp"
#include "dampwave/grid.hpp"
#include "dampwave/rates.hpp"
#include "dampwave/solver.hpp"
#include "json.hpp"

namespace dampwave::cli {

// Names the offending field, e.g. "damping.inner.radius: must be positive".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  int dim = 1;
  int points = 128;
  double period = 2.0 * std::numbers::pi;
};

struct SolverSection {
  SolverConfig solver;
  double t_end = 10.0;
};

enum class InitialKind { random, mode, beam };

struct InitialConfig {
  InitialKind kind = InitialKind::random;
  int band = 8;
  int min_band = 0;
  std::array<int, 2> mode{1, 0};
  double amplitude = 1.0;
};

struct SigmaConfig {
  std::vector<double> times;  // defaults to 0..t_end in 50 steps
};

struct TgccConfig {
  double T0 = 1.0;
  int rungs = 4;
  double tolerance = 1e-9;
};

enum class BeamMode { residual, energy, exact };

struct BeamConfig {
  BeamMode mode = BeamMode::residual;
  Geodesic gamma;
  double k = 32.0;
  double t0 = 0.0;
  std::vector<double> times{0.0, 1.0};
};

enum class ObserveMode { ratio, sandwich, short_time };

struct ObserveConfig {
  ObserveMode mode = ObserveMode::ratio;
  std::vector<double> t0{0.0};
  double T = 1.0;
  std::optional<DampingProfile> weight;  // defaults to the damping
  double A = 1.0;
  double B = 0.0;
  double lambda = 1.0;
  std::vector<double> deltas;
};

struct FitConfig {
  std::vector<RateModel> models{RateModel::exp_sigma, RateModel::stretched, RateModel::power,
                                RateModel::log_power};
  std::optional<std::pair<double, double>> window;
  double energy_floor = 1e-45;
};

struct SweepConfig {
  std::string command;
  std::string parameter;  // dotted path into the config, e.g. beam.k
  std::vector<YAML::Node> values;
};

struct Config {
  std::optional<std::uint64_t> seed;
  GridConfig grid;
  std::optional<DampingProfile> damping;
  SolverSection solver;
  InitialConfig initial;
  GeodesicSampling sampling;
  SigmaConfig sigma;
  TgccConfig tgcc;
  BeamConfig beam;
  ObserveConfig observe;
  FitConfig fit;
  std::optional<SweepConfig> sweep;

  YAML::Node source;  // as loaded, for the manifest and sweeps
};

// Parses and validates a whole document. Unknown keys anywhere are errors.
Config parse_config(const YAML::Node& root);
Config load_config(const std::string& path);

// A damping family and its parameters, recursively for wrapped families.
DampingProfile parse_damping(const YAML::Node& node, const std::string& path, const GridConfig& grid);
Schedule parse_schedule(const YAML::Node& node, const std::string& path);

// Copy of `root` with the dotted path set to `value`.
YAML::Node with_value(const YAML::Node& root, const std::string& dotted, const YAML::Node& value);

nlohmann::json to_json(const YAML::Node& node);

}  // namespace dampwave::cli
