#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvasym/vol_spec.hpp"

namespace rvasym::cli {

// Thrown for malformed or inconsistent configuration; maps to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  VolModelSpec model{SigmaFunction{SigmaKind::exp_ou, 0.2, 1.0}, -0.7, 0.3};
  ScalingRegime regime;

  std::size_t n_steps = 64;  // solver and pricing grid
  std::size_t refine = 4;    // fine steps per cell for model samples

  std::size_t n_paths = 100000;
  std::size_t a_paths = 20000;  // samples for the prefactor A(x)
  std::uint64_t seed = 1;

  std::vector<double> eps_list{0.4, 0.3, 0.2};
  std::vector<double> x_list{0.05, 0.1};

  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  // verify subcommand
  double tolerance = 1e-10;
  std::size_t verify_paths = 1000;

  // taylor-check subcommand: number of fixed model samples
  std::size_t taylor_paths = 20;

  // Throws ConfigError unless every value is usable by the numerical modules.
  void validate() const;
};

ScenarioConfig read_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);
// INI text with every double printed round-trip exact.
void write_config(std::ostream& os, const ScenarioConfig& c);
std::string to_ini(const ScenarioConfig& c);

// FNV-1a of the canonical INI text (output directory excluded), as 16 hex digits.
std::string config_hash(const ScenarioConfig& c);

bool wants_format(const ScenarioConfig& c, const std::string& fmt);

}  // namespace rvasym::cli
