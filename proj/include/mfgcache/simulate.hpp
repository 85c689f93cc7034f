#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfgcache/mfg_solver.hpp"
#include "mfgcache/policies.hpp"
#include "mfgcache/radio.hpp"

namespace mfgcache::sim {

// One content evaluated at a tagged SBS and its neighbours.
struct SimConfig {
  radio::RadioEnvironment env;
  radio::Area area;
  mfg::ContentParams content;
  double x0 = 0.3;                 // initial request probability
  double x0_sd = 0.0;              // spread across SBSs (truncated normal)
  double q0 = 0.7;                 // initial remaining storage
  double q0_sd = 0.0;
  double horizon = 1.0;            // T
  double dt = 0.01;
  int replications = 20;
  std::uint64_t master_seed = 1;
  double request_range_m = 10.0;   // R_c
  double rate = 0.0;               // R; <= 0 means derive it from env
  double popularity_floor = 1e-3;
  double barrier_margin = 1e-6;

  void validate() const;
  int steps() const;               // T / dt
  double effective_rate() const;
  policies::Context context() const;
};

struct SbsState {
  radio::Point position;
  double q = 0.0;  // remaining storage Q
  double x = 0.0;  // true request probability
};

// Q' = clip(Q + (e - L p) dt, 0, C).
double step_storage(double q, double p, const SimConfig& cfg);
SbsState step_storage(SbsState s, double p, const SimConfig& cfg);

double instantaneous_cost(double p, double q, double x, double overlap,
                          double rate, const SimConfig& cfg);

// Sum of the neighbours' fractions over C N_r. `neighbours` indexes into
// `fractions`; the tagged SBS is expected to be left out by the caller.
double empirical_overlap(std::span<const double> fractions,
                         std::span<const std::size_t> neighbours,
                         const SimConfig& cfg);

// Neighbour set of the tagged SBS: every other SBS within R_c of the user.
std::vector<std::size_t> neighbour_set(const radio::NetworkRealization& net,
                                       radio::Point user, std::size_t tagged,
                                       double request_range_m);

struct CostLedger {
  std::vector<double> t;
  std::vector<double> cost;     // J at each grid time
  std::vector<double> lra;      // cumulative trapezoid of J
  std::vector<double> overlap;  // empirical overlap seen by the tagged SBS
  std::vector<double> fraction; // tagged SBS caching fraction
  std::size_t neighbours = 0;
  int barrier_hits = 0;

  double final_lra() const { return lra.empty() ? 0.0 : lra.back(); }
  double mean_overlap() const;  // time average (trapezoid / T)
};

// Network and demand noise depend only on (master_seed, seed), so runs of
// different policies or contents with the same seed share them.
CostLedger run_replication(const SimConfig& cfg, policies::Policy policy,
                           const policies::IpiModel& ipi, std::uint64_t seed);

struct Band {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Mean and normal-approximation 95% band.
Band summarize(std::span<const double> samples);

struct Summary {
  std::size_t replications = 0;
  std::vector<double> t;
  std::vector<Band> lra;
  Band final_lra;
  Band overlap;
};

Summary aggregate(std::span<const CostLedger> ledgers);

}  // namespace mfgcache::sim
