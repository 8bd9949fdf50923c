#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace geomatch {

inline constexpr const char* kVersion = "0.1.0";

// Flat configuration shared by the CLI and the config-file format. Keys in
// key=value files are exactly the CLI flag names (without the leading
// dashes); the CLI overrides the file.
struct Config {
  std::string command;  // offline | online | fluid | compare | round-probe | sweep-c
  uint64_t n = 10000;
  double c = 1.0;
  bool c_unbounded = false;
  uint32_t k = 16;
  double eps = 0.1;
  uint32_t reps = 1;
  uint64_t seed = 1;
  uint64_t stream = 0;  // replicate r draws from stream + r
  double dt = 1e-3;
  double t_end = -1.0;  // -1: per-command default
  std::vector<double> t_grid;
  std::string mode = "cardinality";  // cardinality | metric
  std::string topology = "line";     // line | circle (circle = rounded + glued)
  uint64_t trace_every = 0;
  uint32_t lmax = 0;  // 0: default 40k
  std::string init = "exponential";  // exponential | exact-gaps | normalized
  uint32_t threads = 0;        // 0: hardware
  uint64_t insert_trials = 0;  // round-probe: single-vertex insertion trials
  double c_min = 0.25, c_max = 5.0, c_step = 0.25;  // sweep-c grid
  std::string out;
  bool json = false;
  bool do_assert = false;
};

// Parses flat key=value text ('#' comments allowed). Unknown keys or
// malformed values raise ConfigError naming the field.
Config parse_config_text(const std::string& text);
void apply_config_kv(Config& cfg, const std::string& key, const std::string& value);
std::string config_to_text(const Config& cfg);

struct ComparisonRow {
  double t = 0.0;
  double empirical_mean = 0.0;
  double empirical_std = 0.0;
  double fluid_value = 0.0;
  double theory_value = 0.0;  // NaN when no closed form exists
  double abs_gap = 0.0;       // |empirical_mean - fluid_value|
};

struct RunSummary {
  std::string command;
  bool ok = true;                       // assertions (when requested) all met
  std::vector<std::string> failures;    // human-readable assertion failures
  std::vector<ComparisonRow> rows;
  std::map<std::string, double> scalars;
  std::string csv_path;
};

RunSummary run_offline(const Config& cfg);
RunSummary run_online(const Config& cfg);
RunSummary run_fluid(const Config& cfg);
RunSummary run_compare(const Config& cfg);
RunSummary run_round_probe(const Config& cfg);
RunSummary run_sweep_c(const Config& cfg);

// Dispatch on cfg.command.
RunSummary run_experiment(const Config& cfg);

std::string summary_to_json(const Config& cfg, const RunSummary& summary);

// Deterministic replicate-level parallelism: workers pull replicate indices
// from a shared counter; results must be stored by index by the callback.
void parallel_replicates(uint32_t reps, uint32_t threads,
                         const std::function<void(uint32_t)>& fn);

}  // namespace geomatch
