// geomatch command line: thin shell over the shared library's C API.
// Flags are folded into the flat key=value config format, a --config file is
// read first, and explicit flags override it.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geomatch.h"

namespace {

struct FlagSet {
  std::vector<std::pair<std::string, std::string>> kv;
  void set(const std::string& key, const std::string& value) {
    kv.emplace_back(key, value);
  }
};

// Registers the flags shared by every subcommand. Values are captured as
// strings so that only flags the user actually passed override the config
// file.
void add_common_flags(CLI::App* cmd, FlagSet& flags) {
  static const std::vector<std::pair<std::string, std::string>> specs = {
      {"--n", "n"},
      {"--c", "c"},
      {"--k", "k"},
      {"--eps", "eps"},
      {"--reps", "reps"},
      {"--seed", "seed"},
      {"--stream", "stream"},
      {"--dt", "dt"},
      {"--t-end", "t-end"},
      {"--t-grid", "t-grid"},
      {"--mode", "mode"},
      {"--topology", "topology"},
      {"--trace-every", "trace-every"},
      {"--lmax", "lmax"},
      {"--init", "init"},
      {"--threads", "threads"},
      {"--insert-trials", "insert-trials"},
      {"--c-min", "c-min"},
      {"--c-max", "c-max"},
      {"--c-step", "c-step"},
      {"--out", "out"},
  };
  for (const auto& [flag, key] : specs) {
    std::string key_copy = key;
    cmd->add_option_function<std::string>(
        flag, [&flags, key_copy](const std::string& v) { flags.set(key_copy, v); });
  }
  cmd->add_flag_callback("--json", [&flags] { flags.set("json", "1"); },
                         "print a machine-readable summary to stdout");
  cmd->add_flag_callback("--assert", [&flags] { flags.set("assert", "1"); },
                         "exit 1 unless the run meets its tolerances");
}

int run(const std::string& command, const std::string& config_path,
        const FlagSet& flags) {
  std::ostringstream config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "geomatch: cannot read config file " << config_path << "\n";
      return 2;
    }
    config << in.rdbuf() << "\n";
  }
  config << "command=" << command << "\n";
  for (const auto& [key, value] : flags.kv) config << key << "=" << value << "\n";

  char* json = nullptr;
  geomatch_status st = geomatch_run_experiment(config.str().c_str(), &json);
  if (st != GEOMATCH_OK) {
    std::cerr << "geomatch: " << geomatch_status_name(st) << ": "
              << geomatch_last_error() << "\n";
    return 2;
  }

  bool wants_json = false;
  bool wants_assert = false;
  for (const auto& [key, value] : flags.kv) {
    if (key == "json" && value == "1") wants_json = true;
    if (key == "assert" && value == "1") wants_assert = true;
  }
  std::string out(json ? json : "{}");
  geomatch_string_free(json);

  nlohmann::json j = nlohmann::json::parse(out, nullptr, false);
  bool ok = j.is_object() && j.value("ok", false);
  if (wants_json) {
    std::cout << out << "\n";
  } else if (j.is_object()) {
    std::cout << command << (ok ? ": ok" : ": FAILED") << "\n";
    if (j.contains("scalars"))
      for (auto& [key, value] : j["scalars"].items())
        std::cout << "  " << key << " = " << value << "\n";
    if (j.contains("csv")) std::cout << "  csv: " << j["csv"].get<std::string>() << "\n";
    for (const auto& f : j.value("failures", nlohmann::json::array()))
      std::cout << "  assertion failed: " << f.get<std::string>() << "\n";
  }
  return wants_assert && !ok ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geomatch: online matching on 1D random geometric graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(geomatch_version()));

  struct Sub {
    const char* name;
    const char* help;
  };
  const std::vector<Sub> subs = {
      {"offline", "Monte Carlo for the offline optimum (small-first sweep)"},
      {"online", "CLOSEST online simulation (cardinality or metric)"},
      {"fluid", "integrate the gap-density ODE system"},
      {"compare", "replicated simulations against the fluid solution"},
      {"round-probe", "original vs rounded/glued instance sensitivity"},
      {"sweep-c", "offline + fluid curves over a grid of c values"},
  };

  std::vector<FlagSet> flags(subs.size());
  std::vector<std::string> config_paths(subs.size());
  std::vector<CLI::App*> cmds;
  for (size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    cmd->add_option("--config", config_paths[i], "key=value config file");
    add_common_flags(cmd, flags[i]);
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < subs.size(); ++i)
    if (cmds[i]->parsed()) return run(subs[i].name, config_paths[i], flags[i]);
  return 2;
}
