#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blp/levy_measure.hpp"
#include "blp/simulator.hpp"

namespace blp::cli {

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifySection {
  double t = 1.0;
  std::optional<std::complex<double>> z;  ///< defaults to theta
  double r = 1.0;
  std::vector<double> grid;               ///< defaults to {t/4, t/2, 3t/4, t}
  std::vector<double> censor_levels;      ///< empty: skip the censored-mass check
  std::optional<double> top_level;        ///< defaults to the largest declared level
  std::size_t replicas = 10'000;
  double ks_s = 0.5;
  double ks_t = 0.5;
  std::size_t ks_samples = 0;             ///< 0: skip the branching-property check
};

struct KappaSection {
  std::vector<double> r;  ///< frequency grid
};

/// A parsed model file: either characteristics (`triple`, simulated through
/// their decomposition at `level`) or finite-birth parameters given directly.
struct ModelConfig {
  std::optional<CharacteristicTriple> triple;
  std::optional<FiniteBirthParams> params;
  Theta theta;
  std::optional<double> level;
  SimulationConfig simulation;
  VerifySection verify;
  KappaSection kappa;
  std::vector<double> levels;  ///< nested levels
};

/// Parses JSON text. Throws ConfigError on any schema violation.
ModelConfig parse_config(const std::string& text);
ModelConfig load_config(const std::string& path);

/// Truncation level used to simulate a triple: the configured one, else the
/// largest declared level, else the depth of the deepest atom (at least 1).
double simulation_level(const ModelConfig& config);

}  // namespace blp::cli
