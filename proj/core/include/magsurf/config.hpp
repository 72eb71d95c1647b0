#ifndef MAGSURF_CONFIG_HPP
#define MAGSURF_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "magsurf/closure.hpp"

namespace magsurf {

// Config validation failure; collects every violation before throwing.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

enum class ExperimentType {
  trace,
  exit_event_,
  scatter,
  jacobi,
  conjugates,
  index,
  convexity,
  simplicity,
  closure,
  compare_scatter,
};

std::string to_string(ExperimentType e);
std::optional<ExperimentType> experiment_from_name(const std::string& name);

struct RunConfig {
  std::string schema_version;
  MagneticSystem sys;
  std::optional<DomainSpec> domain;
  StepControl ctrl;
  int grid_boundary = 16;
  int grid_angle = 16;
  unsigned long seed = 1;
  ExperimentType experiment = ExperimentType::trace;

  // experiment parameters (used per type)
  PhasePoint start{{0, 0}, {1, 0}};
  Vec2 jacobi_J0{0, 0};
  Vec2 jacobi_J0p{0, 1};
  double duration = 1.0;
  double tmax = 0.0;       // 0 means the module default
  int segments = 64;       // index Gram resolution
  int gauss_pts = 8;
  int convexity_samples = 256;
  bool strip_bumps_baseline = true;  // compare-scatter / census baseline

  std::string canonical;  // sorted-key serialization of the validated config
};

// Parse and fully validate a JSON config. Unknown keys are rejected; all
// violations are reported at once.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// FNV-1a over the canonical serialization.
uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

}  // namespace magsurf

#endif
