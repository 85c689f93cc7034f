#include "mfgcache/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mfgcache/demand.hpp"
#include "mfgcache/errors.hpp"

namespace mfgcache::sim {

namespace {

double truncated_normal(double mean, double sd, double hi, RandomStream& rng) {
  if (sd <= 0.0) return mean;
  std::normal_distribution<double> normal(mean, sd);
  for (int tries = 0; tries < 1000; ++tries) {
    const double v = normal(rng);
    if (v >= 0.0 && v <= hi) return v;
  }
  return std::clamp(mean, 0.0, hi);
}

}  // namespace

void SimConfig::validate() const {
  env.validate();
  if (!(area.width_m > 0.0 && area.height_m > 0.0))
    throw std::invalid_argument("simulation area must be positive");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("x0 must lie in [0, 1]");
  if (!(q0 >= 0.0 && q0 <= content.storage))
    throw std::invalid_argument("q0 must lie in [0, C]");
  if (!(x0_sd >= 0.0 && q0_sd >= 0.0))
    throw std::invalid_argument("initial spreads must be >= 0");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (horizon > 0.0) {
    const double n = horizon / dt;
    if (std::fabs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
      throw std::invalid_argument("dt must divide the horizon");
  }
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (!(request_range_m >= 0.0)) throw std::invalid_argument("request range must be >= 0");
  if (!(content.size > 0.0 && content.storage > 0.0 && content.backhaul > 0.0 &&
        content.peers > 0.0))
    throw std::invalid_argument("content parameters must be positive");
}

int SimConfig::steps() const {
  return horizon > 0.0 ? static_cast<int>(std::lround(horizon / dt)) : 0;
}

double SimConfig::effective_rate() const {
  if (rate > 0.0) return rate;
  return radio::average_rate(env, radio::mean_field_interference(env));
}

policies::Context SimConfig::context() const {
  return {content.backhaul, content.size, content.storage, effective_rate(),
          barrier_margin};
}

double step_storage(double q, double p, const SimConfig& cfg) {
  const auto& c = cfg.content;
  return std::clamp(q + (c.discard_rate - c.size * p) * cfg.dt, 0.0, c.storage);
}

SbsState step_storage(SbsState s, double p, const SimConfig& cfg) {
  s.q = step_storage(s.q, p, cfg);
  return s;
}

double instantaneous_cost(double p, double q, double x, double overlap,
                          double rate, const SimConfig& cfg) {
  return mfg::running_cost(p, q, x, overlap, rate, cfg.content, cfg.popularity_floor);
}

double empirical_overlap(std::span<const double> fractions,
                         std::span<const std::size_t> neighbours,
                         const SimConfig& cfg) {
  if (neighbours.empty() || std::isinf(cfg.content.peers)) return 0.0;
  double s = 0.0;
  for (std::size_t i : neighbours) s += fractions[i];
  return s / (cfg.content.storage * cfg.content.peers);
}

std::vector<std::size_t> neighbour_set(const radio::NetworkRealization& net,
                                       radio::Point user, std::size_t tagged,
                                       double request_range_m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < net.sbs.size(); ++i)
    if (i != tagged && net.distance(net.sbs[i], user) <= request_range_m)
      out.push_back(i);
  return out;
}

double CostLedger::mean_overlap() const {
  if (overlap.empty()) return 0.0;
  if (overlap.size() == 1) return overlap.front();
  double s = 0.0;
  for (std::size_t n = 1; n < overlap.size(); ++n)
    s += 0.5 * (overlap[n] + overlap[n - 1]) * (t[n] - t[n - 1]);
  return s / (t.back() - t.front());
}

CostLedger run_replication(const SimConfig& cfg, policies::Policy policy,
                           const policies::IpiModel& ipi, std::uint64_t seed) {
  cfg.validate();
  ipi.validate();
  const auto ctx = cfg.context();
  const double rate = ctx.rate;

  auto net_rng = make_stream(cfg.master_seed, {seed, 1});
  const auto net = radio::sample_network(cfg.env, cfg.area, net_rng);
  const radio::Point user{cfg.area.width_m / 2, cfg.area.height_m / 2};

  CostLedger ledger;
  const int steps = cfg.steps();
  if (net.sbs.empty()) {
    // Nobody to cache: the tagged pair does not exist, cost stays zero.
    for (int n = 0; n <= steps; ++n) {
      ledger.t.push_back(n * cfg.dt);
      ledger.cost.push_back(0.0);
      ledger.lra.push_back(0.0);
      ledger.overlap.push_back(0.0);
      ledger.fraction.push_back(0.0);
    }
    return ledger;
  }

  std::size_t tagged = 0;
  for (std::size_t i = 1; i < net.sbs.size(); ++i)
    if (net.distance(net.sbs[i], user) < net.distance(net.sbs[tagged], user))
      tagged = i;
  const auto nbrs = neighbour_set(net, user, tagged, cfg.request_range_m);
  ledger.neighbours = nbrs.size();

  // Only the tagged SBS and its neighbours matter; local index 0 is tagged.
  std::vector<std::size_t> local_nbrs(nbrs.size());
  std::iota(local_nbrs.begin(), local_nbrs.end(), std::size_t{1});
  auto init_rng = make_stream(cfg.master_seed, {seed, 5});
  auto initial = [&](radio::Point at) {
    const double q = truncated_normal(cfg.q0, cfg.q0_sd, cfg.content.storage, init_rng);
    const double x = truncated_normal(cfg.x0, cfg.x0_sd, 1.0, init_rng);
    return SbsState{at, q, x};
  };
  std::vector<SbsState> sbs;
  sbs.push_back(initial(net.sbs[tagged]));
  for (std::size_t i : nbrs) sbs.push_back(initial(net.sbs[i]));

  demand::OuParams ou{cfg.content.reversion_rate, cfg.content.volatility,
                      cfg.content.mean_popularity, cfg.dt};
  auto demand_rng = make_stream(cfg.master_seed, {seed, 2});
  auto ipi_rng = make_stream(cfg.master_seed, {seed, 3});
  policy = policy.reseeded(mix_seed(cfg.master_seed ^ mix_seed(seed + 4)));

  std::vector<double> p(sbs.size());
  for (int n = 0; n <= steps; ++n) {
    const double t = n * cfg.dt;
    for (std::size_t s = 0; s < sbs.size(); ++s) {
      const double seen = policies::observe_popularity(sbs[s].x, ipi, ipi_rng,
                                                       cfg.popularity_floor);
      p[s] = policy.decide(seen, sbs[s].q, t, ctx);
    }
    const double overlap = empirical_overlap(p, local_nbrs, cfg);
    const double j = instantaneous_cost(p[0], sbs[0].q, sbs[0].x, overlap, rate, cfg);
    ledger.t.push_back(t);
    ledger.cost.push_back(j);
    ledger.overlap.push_back(overlap);
    ledger.fraction.push_back(p[0]);
    ledger.lra.push_back(n == 0 ? 0.0
                                : ledger.lra.back() +
                                      0.5 * (j + ledger.cost[ledger.cost.size() - 2]) * cfg.dt);
    if (n == steps) break;
    for (std::size_t s = 0; s < sbs.size(); ++s) {
      sbs[s] = step_storage(sbs[s], p[s], cfg);
      sbs[s].x = demand::ou_step(sbs[s].x, ou, demand_rng);
    }
  }
  return ledger;
}

Band summarize(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("nothing to summarize");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) return {*lo, *lo, *lo};  // exact, free of summation round-off
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

Summary aggregate(std::span<const CostLedger> ledgers) {
  if (ledgers.empty()) throw std::invalid_argument("aggregate needs at least one ledger");
  Summary out;
  out.replications = ledgers.size();
  out.t = ledgers.front().t;
  std::vector<double> col(ledgers.size());
  for (std::size_t n = 0; n < out.t.size(); ++n) {
    for (std::size_t r = 0; r < ledgers.size(); ++r) {
      if (ledgers[r].lra.size() != out.t.size())
        throw std::invalid_argument("ledgers have different time grids");
      col[r] = ledgers[r].lra[n];
    }
    out.lra.push_back(summarize(col));
  }
  for (std::size_t r = 0; r < ledgers.size(); ++r) col[r] = ledgers[r].final_lra();
  out.final_lra = summarize(col);
  for (std::size_t r = 0; r < ledgers.size(); ++r) col[r] = ledgers[r].mean_overlap();
  out.overlap = summarize(col);
  return out;
}

}  // namespace mfgcache::sim
