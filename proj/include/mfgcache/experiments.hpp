#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfgcache/config.hpp"

namespace mfgcache::exp {

// Runs f(0..n-1) on up to `jobs` threads. The first exception (lowest
// index) is rethrown after every worker has stopped.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

struct ContentSolve {
  std::size_t content = 0;
  mfg::SolverConfig cfg;
  mfg::Lattice lat;
  std::vector<double> m0;
  mfg::MfeSolution sol;
  double residual = 0.0;
  double residual_centred = 0.0;
  double cost = 0.0;  // expected cost-to-go at t = 0
};

ContentSolve solve_content(const config::RunConfig& cfg, std::size_t content);
std::vector<ContentSolve> solve_all(const config::RunConfig& cfg, int jobs);

using FieldSet = std::vector<std::shared_ptr<const mfg::PolicyField>>;

// ledgers[content][replication]
using LedgerTable = std::vector<std::vector<sim::CostLedger>>;

LedgerTable simulate_policy(const config::RunConfig& cfg, policies::Kind kind,
                            const policies::IpiModel& ipi, const FieldSet& fields,
                            int jobs);

// Per-replication sum over contents of the LRA trajectories.
std::vector<sim::CostLedger> totals(const LedgerTable& table);

// Loads policy_<j>.bin for every content; MissingArtifact when absent or
// when the stored lattice does not match the configuration.
FieldSet load_fields(const config::RunConfig& cfg, const std::filesystem::path& dir);

struct SolveReport {
  std::vector<ContentSolve> solves;
};

struct SimReport {
  struct Entry {
    policies::Kind kind;
    sim::Summary ppi;                 // perfect information (or the only run)
    std::optional<sim::Summary> ipi;  // present when compare_ppi is set
    std::optional<sim::Band> increment;
    std::vector<sim::Band> overlap;   // per content
  };
  std::vector<Entry> entries;
};

SolveReport cmd_solve(const config::RunConfig& cfg, const std::filesystem::path& out,
                      int jobs);
SimReport cmd_simulate(const config::RunConfig& cfg, const std::filesystem::path& out,
                       int jobs);
// Cartesian product of cfg.sweep (or `axes` when given). One solve and,
// when enabled, one simulate per point under out/point_NNN; merged table
// in out/sweep.csv. Returns the number of points run.
std::size_t cmd_sweep(const config::RunConfig& cfg, const std::filesystem::path& out,
                      int jobs, const std::vector<config::SweepAxis>& axes = {});

}  // namespace mfgcache::exp
