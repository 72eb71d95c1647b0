#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "magsurf/experiments.hpp"

namespace {

void write_error_json(const std::string& out_dir, const std::string& kind,
                      const nlohmann::json& detail) {
  try {
    std::filesystem::create_directories(out_dir);
    nlohmann::json err;
    err["error"] = kind;
    err["detail"] = detail;
    std::ofstream out(std::filesystem::path(out_dir) / "error.json");
    out << err.dump(2) << "\n";
  } catch (...) {
    // the error is already going to stderr
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magsurf: magnetic geodesic flows on conformal surface charts"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  long long seed = -1;
  app.add_option("--config", config_path, "Path to the JSON run config")
      ->required();
  app.add_option("--out", out_dir, "Output directory for artifacts");
  app.add_option("--threads", threads, "Worker threads for grid sweeps")
      ->check(CLI::Range(1, 256));
  app.add_option("--seed", seed, "Override the config's random seed");

  const char* names[] = {"trace",  "exit",       "scatter",    "jacobi",
                         "conjugates", "index",  "convexity",  "simplicity",
                         "closure",    "compare-scatter"};
  // options live on the parent; let them be given after the subcommand
  for (const char* n : names) app.add_subcommand(n, "")->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    magsurf::RunConfig cfg = magsurf::load_config(config_path);
    if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);
    if (magsurf::to_string(cfg.experiment) != sub) {
      std::cerr << "config experiment.type is '"
                << magsurf::to_string(cfg.experiment)
                << "' but the subcommand is '" << sub << "'\n";
      write_error_json(out_dir, "subcommand_mismatch",
                       {{"config_type", magsurf::to_string(cfg.experiment)},
                        {"subcommand", sub}});
      return 1;
    }
    magsurf::RunResult res = magsurf::run_experiment(cfg, out_dir, threads);
    std::cout << res.summary << "\n";
    return 0;
  } catch (const magsurf::ConfigError& e) {
    std::cerr << e.what() << "\n";
    write_error_json(out_dir, "config", e.violations());
    return 2;
  } catch (const magsurf::ValidityError& e) {
    std::cerr << e.what() << "\n";
    write_error_json(out_dir, "validity",
                     {{"what", e.what()},
                      {"x", e.last_position.x},
                      {"y", e.last_position.y},
                      {"t", e.exit_time}});
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    write_error_json(out_dir, "runtime", e.what());
    return 1;
  }
}
