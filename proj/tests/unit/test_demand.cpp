#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "mfgcache/demand.hpp"

using namespace mfgcache;
using namespace mfgcache::demand;

TEST(CrpMeanPopularity, RequestedFileShare) {
  std::vector<std::uint64_t> n(4, 0);
  n[0] = 5; n[1] = 3; n[2] = 2;
  const CrpState s(n, 1.0, 0.5);
  EXPECT_NEAR(crp_mean_popularity(s, 0), 4.5 / 11.0, 1e-15);
}

TEST(CrpMeanPopularity, UnrequestedFileGetsNewTableMass) {
  std::vector<std::uint64_t> n{5, 3, 2, 0};
  const CrpState s(n, 1.0, 0.5);
  EXPECT_NEAR(crp_mean_popularity(s, 3), 2.5 / 11.0, 1e-15);
}

TEST(CrpMeanPopularity, SumsToOne) {
  auto rng = make_stream(3);
  for (double nu : {0.0, 0.5, 0.9}) {
    CrpState s(20, 1.0, nu);
    for (int i = 0; i < 200; ++i) {
      const auto mu = crp_mean_popularities(s);
      ASSERT_NEAR(std::accumulate(mu.begin(), mu.end(), 0.0), 1.0, 1e-12);
      crp_sample_request(s, rng);
    }
  }
  // every file requested: requested weights are renormalised
  const CrpState full(std::vector<std::uint64_t>{1, 2, 3}, 1.0, 0.5);
  const auto mu = crp_mean_popularities(full);
  EXPECT_NEAR(std::accumulate(mu.begin(), mu.end(), 0.0), 1.0, 1e-12);
}

TEST(CrpSample, EmptyHistoryIsUniform) {
  auto rng = make_stream(11);
  std::vector<int> hits(5, 0);
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    CrpState s(5, 1.0, 0.5);
    ++hits[crp_sample_request(s, rng)];
  }
  for (int h : hits) EXPECT_NEAR(h / double(draws), 0.2, 3 * std::sqrt(0.16 / draws));
}

TEST(CrpSample, TwoFileProbabilities) {
  const CrpState s(std::vector<std::uint64_t>{5, 0}, 1.0, 0.5);
  EXPECT_NEAR(crp_mean_popularity(s, 0), 0.75, 1e-15);
  EXPECT_NEAR(crp_mean_popularity(s, 1), 0.25, 1e-15);

  auto rng = make_stream(5);
  const int draws = 100000;
  int first = 0;
  for (int i = 0; i < draws; ++i) {
    CrpState c = s;
    if (crp_sample_request(c, rng) == 0) ++first;
  }
  EXPECT_NEAR(first / double(draws), 0.75, 3 * std::sqrt(0.75 * 0.25 / draws));
}

TEST(CrpSample, CountsStayConsistent) {
  auto rng = make_stream(8);
  CrpState s(10, 1.0, 0.5);
  for (int i = 0; i < 1000; ++i) crp_sample_request(s, rng);
  const auto& n = s.request_counts();
  EXPECT_EQ(std::accumulate(n.begin(), n.end(), std::uint64_t{0}), s.total_requests());
  EXPECT_EQ(s.total_requests(), 1000u);
  std::set<std::size_t> req(s.requested_files().begin(), s.requested_files().end());
  EXPECT_EQ(req.size(), s.requested_size());
  for (std::size_t j : req) EXPECT_GT(s.request_count(j), 0u);
}

TEST(CrpSample, RejectsEmptyCatalog) {
  EXPECT_THROW(CrpState(0, 1.0, 0.5), std::invalid_argument);
}

TEST(ExpectedDistinctFiles, NoDiscount) {
  EXPECT_NEAR(expected_distinct_files(99, 1.0, 0.0), std::log(100.0), 1e-12);
  double prev = 0.0;
  for (std::uint64_t n : {1u, 10u, 100u, 1000u}) {
    const double v = expected_distinct_files(n, 1.0, 0.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ExpectedDistinctFiles, WithDiscount) {
  // Gamma(2) / (0.5 Gamma(1.5)) * 10^4^0.5
  EXPECT_NEAR(expected_distinct_files(10000, 1.0, 0.5), 225.6758334191025, 1e-9);
  EXPECT_THROW(expected_distinct_files(10, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(expected_distinct_files(0, 1.0, 0.5), std::invalid_argument);
}

TEST(OuStep, Deterministic) {
  auto rng = make_stream(1);
  EXPECT_DOUBLE_EQ(ou_step(0.3, {1.0, 0.0, 0.3, 0.01}, rng), 0.3);
  EXPECT_NEAR(ou_step(0.2, {1.0, 0.0, 0.4, 0.1}, rng), 0.22, 1e-15);
}

TEST(OuStep, ZeroNoiseContractsTowardMean) {
  auto rng = make_stream(1);
  const OuParams p{2.0, 0.0, 0.6, 0.25};
  for (double x : {0.0, 0.3, 0.9, 1.0}) {
    const auto tr = ou_trajectory(x, p, 40, rng);
    for (std::size_t k = 1; k < tr.size(); ++k)
      ASSERT_LE(std::fabs(tr[k] - 0.6), std::fabs(tr[k - 1] - 0.6) + 1e-15);
  }
}

TEST(OuStep, ClipsToUnitInterval) {
  auto rng = make_stream(2);
  const OuParams p{0.1, 3.0, 0.5, 0.1};
  for (double x : ou_trajectory(0.5, p, 2000, rng)) {
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
  }
}

TEST(OuStep, VectorStepAdvancesClock) {
  auto rng = make_stream(2);
  const std::vector<OuParams> ps{{1.0, 0.0, 0.4, 0.1}, {1.0, 0.0, 0.3, 0.1}};
  const DemandState next = ou_step(DemandState{{0.2, 0.3}, 0.0}, ps, rng);
  EXPECT_NEAR(next.x[0], 0.22, 1e-15);
  EXPECT_DOUBLE_EQ(next.x[1], 0.3);
  EXPECT_NEAR(next.t, 0.1, 1e-15);
}

TEST(OuStep, RejectsNonPositiveDt) {
  EXPECT_THROW((OuParams{1.0, 0.1, 0.5, 0.0}.validate()), std::invalid_argument);
}
