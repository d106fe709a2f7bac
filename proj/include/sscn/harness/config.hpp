#pragma once

#include "sscn/baselines.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscn::harness {

inline constexpr int kConfigVersion = 1;

/// Invalid, unknown or malformed configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Referenced dataset file does not exist. Maps to exit code 2.
class MissingData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObjectiveSpec {
  std::string kind = "synthetic_logistic";  // libsvm | synthetic_logistic | quadratic | saddle_quartic
  std::string dataset;
  double lambda = 0.1;
  bool normalize = true;
  std::size_t n_features = 50;
  std::size_t n_samples = 200;
  std::uint64_t data_seed = 1;
  double label_noise = 0.1;
  std::size_t dimension = 10;
  double condition = 10.0;
  double scale = 0.25;
  double x0 = 0.0;  // every coordinate of the starting point
};

/// Either "auto" (estimated from the objective) or a number.
struct AutoNumber {
  std::optional<double> value;
};

struct MethodBlock {
  std::string name;
  std::string method = "sscn";  // sscn | cd | cr
  std::string schedule_label;
  OptimizerConfig sscn;
  CdConfig cd;
  std::optional<double> tau_fraction;  // resolved against n once the objective exists
  AutoNumber theory_l1;
  AutoNumber theory_l2;
};

struct ExperimentConfig {
  ObjectiveSpec objective;
  std::vector<MethodBlock> blocks;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "sscn_out";
  bool timing = true;
  bool compare = false;
  std::map<std::string, std::string> raw;  // every key as written
};

/// Parses `key = value` lines; '#' starts a comment. Base keys configure a
/// single block named after `method`; `compare.blocks = a,b` declares several
/// blocks whose `block.<name>.<key>` entries override the base keys.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Documented key set (without block prefixes).
const std::vector<std::string>& known_keys();

/// Finalizes tau fractions once the problem dimension is known.
void resolve_dimension(MethodBlock& block, std::size_t n);

}  // namespace sscn::harness
