#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mfgcache/config.hpp"
#include "mfgcache/errors.hpp"
#include "mfgcache/experiments.hpp"

using namespace mfgcache;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out = "out";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)");
  cmd->add_option("--preset", c.preset, "shipped preset name (see `presets list`)");
  cmd->add_option("--out", c.out, "artifact directory")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", c.seed, "override sim.seed");
}

config::RunConfig resolve(const Common& c) {
  if (c.config.empty() == c.preset.empty())
    throw ConfigError("give exactly one of --config or --preset");
  auto doc = config::load_document(c.config.empty() ? config::preset_path(c.preset)
                                                    : std::filesystem::path(c.config));
  if (c.seed) {
    if (!doc.contains("sim")) doc["sim"] = config::Json::object();
    doc["sim"]["seed"] = *c.seed;
  }
  return config::parse(doc);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("sweep value '" + item + "' is not a number");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field-game edge caching: solve, simulate, sweep"};
  app.require_subcommand(1);

  Common solve_opts, sim_opts, sweep_opts;
  auto* solve = app.add_subcommand("solve", "solve the mean-field equilibrium per content");
  add_common(solve, solve_opts);
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo evaluation of the policies");
  add_common(simulate, sim_opts);
  auto* sweep = app.add_subcommand("sweep", "solve (and simulate) over a parameter grid");
  add_common(sweep, sweep_opts);
  std::string sweep_key, sweep_values;
  sweep->add_option("--key", sweep_key, "dotted config key, e.g. radio.sbs_density_per_m2");
  auto* values_opt =
      sweep->add_option("--values", sweep_values, "comma separated values (may be empty)")
          ->expected(0, 1);
  auto* presets = app.add_subcommand("presets", "shipped experiment presets");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "print preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (*list) {
      for (const auto& n : config::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (*solve) {
      const auto cfg = resolve(solve_opts);
      const auto r = exp::cmd_solve(cfg, solve_opts.out, solve_opts.jobs);
      for (const auto& s : r.solves)
        std::fprintf(stderr, "content %zu: %d iterations, residual %.3g\n", s.content,
                     s.sol.iterations, s.residual);
    } else if (*simulate) {
      const auto cfg = resolve(sim_opts);
      const auto r = exp::cmd_simulate(cfg, sim_opts.out, sim_opts.jobs);
      for (const auto& e : r.entries)
        std::fprintf(stderr, "%-8s final LRA %.5g [%.5g, %.5g]\n",
                     std::string(policies::kind_name(e.kind)).c_str(), e.ppi.final_lra.mean,
                     e.ppi.final_lra.lo, e.ppi.final_lra.hi);
    } else if (*sweep) {
      const auto cfg = resolve(sweep_opts);
      std::vector<config::SweepAxis> axes;
      if (!sweep_key.empty() || values_opt->count() > 0) {
        if (sweep_key.empty()) throw ConfigError("--values needs --key");
        axes.push_back({sweep_key, parse_values(sweep_values)});
        // Surface unknown keys before any work; parse() checks sweep axes.
        auto probe = cfg.document;
        probe["sweep"]["axes"] = config::Json::array(
            {{{"key", sweep_key}, {"values", axes.back().values}}});
        config::parse(probe);
      }
      const auto n = exp::cmd_sweep(cfg, sweep_opts.out, sweep_opts.jobs, axes);
      std::fprintf(stderr, "%zu sweep points\n", n);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::kConfig);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::kNumeric);
  }
  return 0;
}
