#include <gtest/gtest.h>

#include <cmath>

#include "mfgcache/errors.hpp"
#include "mfgcache/simulate.hpp"

using namespace mfgcache;
using namespace mfgcache::sim;

namespace {

SimConfig small_cfg() {
  SimConfig cfg;
  cfg.area = {100.0, 100.0};
  cfg.content.storage_cost = -1.0;
  cfg.content.mean_popularity = 0.3;
  cfg.dt = 0.01;
  cfg.master_seed = 42;
  return cfg;
}

}  // namespace

TEST(StepStorage, Dynamics) {
  auto cfg = small_cfg();
  cfg.dt = 1.0;
  EXPECT_NEAR(step_storage(0.5, 0.0, cfg), 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(step_storage(0.5, 0.1, cfg), 0.5);
  EXPECT_DOUBLE_EQ(step_storage(1.0, 0.0, cfg), 1.0);
  EXPECT_DOUBLE_EQ(step_storage(0.2, 0.9, cfg), 0.0);
  const SbsState s = step_storage(SbsState{{1, 2}, 0.5, 0.3}, 0.0, cfg);
  EXPECT_NEAR(s.q, 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(s.x, 0.3);
}

TEST(InstantaneousCost, Arithmetic) {
  auto cfg = small_cfg();
  cfg.content.storage_cost = 0.0;
  EXPECT_NEAR(instantaneous_cost(0.5, 0.3, 1.0, 0.0, 1.0, cfg), 0.69314718055994531, 1e-15);
  cfg.content.storage_cost = 2.0;
  EXPECT_NEAR(instantaneous_cost(0.0, 0.25, 0.5, 0.0, 1.0, cfg), 1.5, 1e-15);
  EXPECT_DOUBLE_EQ(instantaneous_cost(0.0, 1.0, 0.5, 0.0, 1.0, cfg), 0.0);
  EXPECT_THROW(instantaneous_cost(1.0, 0.5, 0.5, 0.0, 1.0, cfg), BarrierViolation);
}

TEST(EmpiricalOverlap, SumOverNeighbours) {
  const auto cfg = small_cfg();
  const std::vector<double> p{0.9, 0.5, 0.5};
  const std::vector<std::size_t> two{1, 2};
  EXPECT_NEAR(empirical_overlap(p, two, cfg), 0.05, 1e-15);
  const std::vector<double> p2{0.9, 1.0, 1.0};
  EXPECT_NEAR(empirical_overlap(p2, two, cfg), 0.1, 1e-15);
  EXPECT_EQ(empirical_overlap(p, {}, cfg), 0.0);
  const std::vector<double> zero(3, 0.0);
  EXPECT_EQ(empirical_overlap(zero, two, cfg), 0.0);
  const std::vector<std::size_t> one{1};
  EXPECT_LT(empirical_overlap(p, one, cfg), empirical_overlap(p, two, cfg));
}

TEST(NeighbourSet, WithinRange) {
  radio::NetworkRealization net;
  net.area = {100, 100};
  net.sbs = {{50, 50}, {55, 50}, {70, 50}, {99, 50}};
  const auto n = neighbour_set(net, {50, 50}, 0, 10.0);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0], 1u);
}

TEST(RunReplication, ZeroHorizon) {
  auto cfg = small_cfg();
  cfg.horizon = 0.0;
  const auto l = run_replication(cfg, policies::Policy::baseline(), {}, 1);
  EXPECT_EQ(l.final_lra(), 0.0);
}

TEST(RunReplication, FrozenStateGivesLinearLra) {
  auto cfg = small_cfg();
  cfg.content.reversion_rate = 0.0;
  cfg.content.volatility = 0.0;
  cfg.content.discard_rate = 0.0;
  cfg.content.mean_popularity = 0.0;
  cfg.x0 = 0.0;
  cfg.q0 = 0.4;
  cfg.content.storage_cost = 2.0;
  const auto l = run_replication(cfg, policies::Policy::baseline(), {}, 3);
  ASSERT_GT(l.t.size(), 2u);
  EXPECT_NEAR(l.final_lra(), 2.0 * 0.6 * cfg.horizon, 1e-12);
  EXPECT_EQ(l.barrier_hits, 0);
}

TEST(RunReplication, LraIsTrapezoidOfCost) {
  const auto cfg = small_cfg();
  const auto l = run_replication(cfg, policies::Policy::uniform_random(1), {}, 7);
  double s = 0.0;
  for (std::size_t n = 1; n < l.cost.size(); ++n) {
    s += 0.5 * (l.cost[n] + l.cost[n - 1]) * (l.t[n] - l.t[n - 1]);
    ASSERT_NEAR(l.lra[n], s, 1e-12);
  }
}

TEST(RunReplication, CommonRandomNumbers) {
  const auto cfg = small_cfg();
  const auto a = run_replication(cfg, policies::Policy::uniform_random(1), {}, 9);
  const auto b = run_replication(cfg, policies::Policy::uniform_random(2), {}, 9);
  EXPECT_EQ(a.cost, b.cost);  // the policy stream is derived from the replication
  const auto c = run_replication(cfg, policies::Policy::baseline(), {}, 9);
  EXPECT_EQ(a.neighbours, c.neighbours);
  const auto d = run_replication(cfg, policies::Policy::uniform_random(1), {}, 10);
  EXPECT_NE(a.cost, d.cost);
}

TEST(RunReplication, ImperfectInformationChangesDecisions) {
  const auto cfg = small_cfg();
  const auto ppi = run_replication(cfg, policies::Policy::baseline(), {}, 4);
  const auto ipi = run_replication(cfg, policies::Policy::baseline(), {0.2, 0.001}, 4);
  ASSERT_EQ(ppi.fraction.size(), ipi.fraction.size());
  EXPECT_GT(ipi.fraction[0], ppi.fraction[0]);
}

TEST(Summarize, Bands) {
  const std::vector<double> one{2.5};
  const Band b = summarize(one);
  EXPECT_EQ(b.lo, 2.5);
  EXPECT_EQ(b.hi, 2.5);
  const std::vector<double> same(5, 1.0);
  EXPECT_EQ(summarize(same).hi - summarize(same).lo, 0.0);
  EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST(Summarize, WidthShrinksAsRootN) {
  auto rng = make_stream(77);
  std::normal_distribution<double> g(0.0, 1.0);
  auto width = [&](int n) {
    double w = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> s(static_cast<std::size_t>(n));
      for (double& v : s) v = g(rng);
      const Band b = summarize(s);
      w += b.hi - b.lo;
    }
    return w / 200;
  };
  const double w5 = width(5), w20 = width(20), w80 = width(80);
  EXPECT_NEAR(w20 / w80, 2.0, 0.2);
  EXPECT_NEAR(w5 / w20, 2.0 * 0.94, 0.3);  // small-sample sd bias, c4(5) ~ 0.94
}

TEST(Aggregate, IdenticalLedgers) {
  const auto cfg = small_cfg();
  const auto l = run_replication(cfg, policies::Policy::baseline(), {}, 4);
  const std::vector<CostLedger> ls(3, l);
  const Summary s = aggregate(ls);
  EXPECT_EQ(s.replications, 3u);
  EXPECT_EQ(s.final_lra.mean, l.final_lra());
  EXPECT_EQ(s.final_lra.hi, s.final_lra.lo);
  EXPECT_NEAR(s.overlap.mean, l.mean_overlap(), 1e-15);
}

TEST(SimConfig, Validation) {
  auto cfg = small_cfg();
  cfg.dt = 0.3;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_cfg();
  cfg.replications = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
