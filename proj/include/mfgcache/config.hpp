#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfgcache/mfg_solver.hpp"
#include "mfgcache/policies.hpp"
#include "mfgcache/radio.hpp"
#include "mfgcache/simulate.hpp"

namespace mfgcache::config {

using Json = nlohmann::json;

struct ContentSpec {
  double size = 1.0;
  double discard_rate = 0.1;
  double backhaul = 1.0;
  std::optional<double> mean_popularity = 0.3;  // nullopt: take it from the CRP
  double x0 = 0.3;
  double x0_sd = 0.05;
  double q0 = 0.7;
  double q0_sd = 0.05;
};

enum class Terminal { kZero, kHold, kLinear };

struct SweepAxis {
  std::string key;  // dotted path, array entries by index ("contents.0.x0")
  std::vector<double> values;
};

struct RunConfig {
  std::string preset;
  radio::RadioEnvironment radio;

  double reversion_rate = 1.0;
  double volatility = 0.1;
  double crp_theta = 1.0;
  double crp_discount = 0.5;
  std::uint64_t crp_catalog_size = 20;
  std::uint64_t crp_warmup_requests = 1000;

  double storage_cost = -1.0;
  double storage_capacity = 1.0;
  double peers = 20.0;
  bool peers_from_request_range = false;

  std::vector<ContentSpec> contents{ContentSpec{}};

  int nx = 64;
  int nq = 64;
  double horizon = 1.0;

  mfg::SolverConfig solver;  // content and rate are filled per content
  Terminal terminal = Terminal::kZero;

  double sim_dt = 0.0;  // 0: use the lattice step
  int replications = 20;
  std::uint64_t seed = 1;
  radio::Area area;
  double request_range_m = 10.0;

  std::vector<policies::Kind> policies{policies::Kind::kMeanField,
                                       policies::Kind::kBaseline,
                                       policies::Kind::kUniformRandom};
  policies::IpiModel ipi;
  bool compare_ppi = false;

  std::vector<SweepAxis> sweep;
  bool sweep_simulate = true;

  bool full_csv = false;

  Json document;  // the document this was parsed from, overrides applied
};

// Strict parse: unknown keys and out-of-range values raise ConfigError.
RunConfig parse(const Json& doc);
Json load_document(const std::filesystem::path& path);
RunConfig load(const std::filesystem::path& path);

// Sets a numeric leaf by dotted path, creating missing objects. Whether the
// key exists in the schema is decided by the next parse().
void set_number(Json& doc, const std::string& key, double value);

// Presets shipped with the repository.
std::filesystem::path preset_dir();
std::vector<std::string> preset_names();
std::filesystem::path preset_path(const std::string& name);

// Canonical hash of a document (sorted keys, compact dump).
std::string document_hash(const Json& doc);

// Per-content views used by the solver and the simulator.
std::vector<double> mean_popularities(const RunConfig& cfg);
mfg::SolverConfig solver_config(const RunConfig& cfg, std::size_t content);
mfg::Lattice lattice(const RunConfig& cfg, const mfg::SolverConfig& solver);
sim::SimConfig sim_config(const RunConfig& cfg, std::size_t content,
                          const mfg::Lattice& lat);

}  // namespace mfgcache::config
