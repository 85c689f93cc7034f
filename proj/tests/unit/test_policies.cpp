#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "mfgcache/policies.hpp"

using namespace mfgcache;
using namespace mfgcache::policies;

TEST(PolicyKind, Names) {
  for (Kind k : {Kind::kMeanField, Kind::kBaseline, Kind::kUniformRandom})
    EXPECT_EQ(parse_kind(kind_name(k)), k);
  EXPECT_THROW(parse_kind("greedy"), std::invalid_argument);
}

TEST(Baseline, ClosedForm) {
  Context ctx;
  ctx.rate = 0.0;
  EXPECT_EQ(baseline_fraction(0.5, ctx), 0.0);
  ctx.rate = 4.0;
  EXPECT_NEAR(baseline_fraction(0.25, ctx), 0.5, 1e-15);
  ctx.rate = 1e12;
  auto p = Policy::baseline();
  EXPECT_NEAR(p.decide(1.0, 0.5, 0.0, ctx), 1.0, 1e-5);
  EXPECT_LT(p.decide(1.0, 0.5, 0.0, ctx), 1.0);
}

TEST(Baseline, NonDecreasingInPopularity) {
  Context ctx;
  ctx.rate = 3.0;
  auto p = Policy::baseline();
  double prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const double v = p.decide(i / 20.0, 0.5, 0.0, ctx);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(UniformRandom, MeanIsHalfTheCeiling) {
  Context ctx;
  ctx.storage = 0.6;
  auto p = Policy::uniform_random(17);
  const int draws = 100000;
  double s = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = p.decide(0.5, 0.3, 0.0, ctx);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, feasible_upper(ctx));
    s += v;
  }
  EXPECT_NEAR(s / draws, 0.3, 0.01 * 0.3);
}

TEST(UniformRandom, ReproducibleUnderSeed) {
  Context ctx;
  auto a = Policy::uniform_random(5), b = Policy::uniform_random(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.decide(0.5, 0.5, 0.0, ctx), b.decide(0.5, 0.5, 0.0, ctx));
  auto c = a.reseeded(5), d = Policy::uniform_random(5);
  EXPECT_EQ(c.decide(0.5, 0.5, 0.0, ctx), d.decide(0.5, 0.5, 0.0, ctx));
}

TEST(Feasibility, SharedClamp) {
  Context ctx;
  ctx.backhaul = 0.4;
  ctx.rate = 1e9;
  EXPECT_LT(feasible_upper(ctx) * ctx.size, ctx.backhaul);
  auto b = Policy::baseline();
  EXPECT_LE(b.decide(1.0, 0.5, 0.0, ctx), feasible_upper(ctx));
  ctx.size = 2.0;
  ctx.backhaul = 5.0;
  EXPECT_DOUBLE_EQ(feasible_upper(ctx), 0.5);  // C / L
  EXPECT_DOUBLE_EQ(clamp_feasible(-1.0, ctx), 0.0);
}

namespace {

std::shared_ptr<const mfg::PolicyField> affine_field() {
  const mfg::Lattice lat(4, 4, 4, 1.0, 1.0);
  auto f = std::make_shared<mfg::PolicyField>(lat);
  for (int n = 0; n <= 4; ++n)
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) (*f)(n, i, k) = 0.1 * lat.x(i) + 0.2 * lat.q(k) + 0.01 * n;
  return f;
}

}  // namespace

TEST(MeanField, BilinearReproducesAffine) {
  const MeanFieldLookup look(affine_field());
  EXPECT_NEAR(look(0.4, 0.55, 0.5), 0.1 * 0.4 + 0.2 * 0.55 + 0.02, 1e-15);
  // nearest slice in t: 0.3 rounds to slice 1
  EXPECT_NEAR(look(0.4, 0.55, 0.3), 0.1 * 0.4 + 0.2 * 0.55 + 0.01, 1e-15);
  // outside the centre range the edge value holds
  EXPECT_NEAR(look(0.0, 0.125, 0.0), 0.1 * 0.125 + 0.2 * 0.125, 1e-15);
}

TEST(MeanField, RejectsFarQueries) {
  const MeanFieldLookup look(affine_field());
  EXPECT_NO_THROW(look(1.2, 0.5, 0.5));
  EXPECT_THROW(look(1.3, 0.5, 0.5), std::out_of_range);
  EXPECT_THROW(look(0.5, -0.3, 0.5), std::out_of_range);
  EXPECT_THROW(look(0.5, 0.5, 1.3), std::out_of_range);
}

TEST(MeanField, DecideIsDeterministicAndFeasible) {
  auto p = Policy::mean_field(affine_field());
  Context ctx;
  EXPECT_EQ(p.kind(), Kind::kMeanField);
  EXPECT_EQ(p.decide(0.3, 0.4, 0.2, ctx), p.decide(0.3, 0.4, 0.2, ctx));
  ctx.storage = 0.05;
  EXPECT_LE(p.decide(0.9, 0.9, 1.0, ctx), 0.05);
}

TEST(Ipi, PerfectInformationIsIdentity) {
  auto rng = make_stream(1);
  const IpiModel ppi;
  EXPECT_TRUE(ppi.perfect());
  EXPECT_EQ(observe_popularity(0.37, ppi, rng), 0.37);
}

TEST(Ipi, BiasedObservation) {
  auto rng = make_stream(2);
  const IpiModel ipi{0.2, 0.001};
  double s = 0.0;
  for (int i = 0; i < 1000; ++i) s += observe_popularity(0.3, ipi, rng);
  EXPECT_NEAR(s / 1000, 0.5, 1e-3);
  EXPECT_EQ(observe_popularity(0.95, ipi, rng), 1.0);
  EXPECT_EQ(observe_popularity(0.0, IpiModel{-0.5, 0.0}, rng), 1e-3);
  EXPECT_THROW((IpiModel{0.0, -1.0}.validate()), std::invalid_argument);
}
