#ifndef MAGSURF_EXPERIMENTS_HPP
#define MAGSURF_EXPERIMENTS_HPP

#include <string>

#include "magsurf/config.hpp"

namespace magsurf {

struct RunResult {
  std::string summary;       // one line for the terminal
  std::string csv_path;      // main artifact
  std::string sidecar_path;  // JSON sidecar with the config hash
};

// Execute the configured experiment and write its artifacts under out_dir.
// Throws on contract violations and integration failures.
RunResult run_experiment(const RunConfig& cfg, const std::string& out_dir,
                         int threads = 1);

}  // namespace magsurf

#endif
