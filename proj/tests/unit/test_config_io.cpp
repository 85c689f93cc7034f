#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mfgcache/config.hpp"
#include "mfgcache/errors.hpp"
#include "mfgcache/experiments.hpp"
#include "mfgcache/grid_io.hpp"

using namespace mfgcache;
namespace fs = std::filesystem;
using config::Json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mfgcache_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, EveryPresetParses) {
  const auto names = config::preset_names();
  const std::vector<std::string> expect{"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
  EXPECT_EQ(names, expect);
  for (const auto& n : names) EXPECT_NO_THROW(config::load(config::preset_path(n))) << n;
  EXPECT_THROW(config::preset_path("fig10"), ConfigError);
}

TEST(Config, PresetUnits) {
  const auto c = config::load(config::preset_path("fig5"));
  EXPECT_DOUBLE_EQ(c.radio.sbs_density, 0.03);
  EXPECT_DOUBLE_EQ(c.radio.user_density, 0.001);
  EXPECT_NEAR(c.radio.tx_power_w, 0.19953, 1e-5);
  EXPECT_NEAR(c.radio.noise_w, 1e-10, 1e-20);
  EXPECT_EQ(c.terminal, config::Terminal::kHold);
  EXPECT_EQ(c.contents.size(), 3u);
}

TEST(Config, DefaultsFromEmptyDocument) {
  const auto c = config::parse(Json::object());
  EXPECT_EQ(c.nx, 64);
  EXPECT_EQ(c.policies.size(), 3u);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(config::parse(Json::parse(R"({"radio": {"sbs_density": 0.05}})")), ConfigError);
  EXPECT_THROW(config::parse(Json::parse(R"({"colour": 1})")), ConfigError);
  EXPECT_THROW(config::parse(Json::parse(R"({"contents": [{"size": 1}]})")), ConfigError);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(config::parse(Json::parse(R"({"radio": {"sbs_density_per_m2": -0.05}})")),
               ConfigError);
  EXPECT_THROW(config::parse(Json::parse(R"({"solver": {"damping": 1.5}})")), ConfigError);
  EXPECT_THROW(config::parse(Json::parse(R"({"policies": ["mf", "greedy"]})")), ConfigError);
  EXPECT_THROW(config::parse(Json::parse(R"({"lattice": {"nx": "many"}})")), ConfigError);
}

TEST(Config, SetNumberByPath) {
  Json doc = config::load_document(config::preset_path("fig9"));
  config::set_number(doc, "contents.2.x0", 0.55);
  config::set_number(doc, "radio.sbs_density_per_m2", 0.02);
  const auto c = config::parse(doc);
  EXPECT_DOUBLE_EQ(c.contents[2].x0, 0.55);
  EXPECT_DOUBLE_EQ(c.radio.sbs_density, 0.02);
  EXPECT_THROW(config::set_number(doc, "contents.99.x0", 1.0), ConfigError);
  Json bad = doc;
  config::set_number(bad, "radio.nonsense", 1.0);
  EXPECT_THROW(config::parse(bad), ConfigError);
}

TEST(Config, HashIsCanonical) {
  const Json a = Json::parse(R"({"b": 1, "a": {"y": 2, "x": 3}})");
  const Json b = Json::parse(R"({"a": {"x": 3, "y": 2}, "b": 1})");
  EXPECT_EQ(config::document_hash(a), config::document_hash(b));
  EXPECT_NE(config::document_hash(a), config::document_hash(Json::parse(R"({"b": 2})")));
}

TEST(Config, CrpMeanPopularityWhenUnset) {
  Json doc = Json::parse(R"({"contents": [{"mean_popularity": "crp"}, {"mean_popularity": "crp"}]})");
  const auto c = config::parse(doc);
  const auto mu = config::mean_popularities(c);
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_GT(mu[0] + mu[1], 0.0);
  EXPECT_EQ(mu, config::mean_popularities(c));
}

TEST(GridIo, RoundTrip) {
  const auto dir = scratch("grid");
  const mfg::Lattice lat(3, 4, 2, 1.0, 1.0);
  mfg::Grid3 g(lat);
  for (std::size_t j = 0; j < g.data().size(); ++j) g.data()[j] = 0.1 * double(j) - 1.0 / 3.0;
  io::write_grid(dir / "g.bin", g, "policy");
  const auto back = io::read_grid(dir / "g.bin");
  EXPECT_EQ(back.kind, "policy");
  EXPECT_EQ(back.grid.lattice(), lat);
  ASSERT_EQ(back.grid.data().size(), g.data().size());
  for (std::size_t j = 0; j < g.data().size(); ++j) EXPECT_EQ(back.grid.data()[j], g.data()[j]);
}

TEST(GridIo, DetectsCorruptionAndAbsence) {
  const auto dir = scratch("corrupt");
  const mfg::Lattice lat(2, 2, 1, 1.0, 1.0);
  io::write_grid(dir / "g.bin", mfg::Grid3(lat, 0.5), "value");
  {
    std::fstream f(dir / "g.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    f.put('\x7f');
  }
  EXPECT_THROW(io::read_grid(dir / "g.bin"), MissingArtifact);
  EXPECT_THROW(io::read_grid(dir / "absent.bin"), MissingArtifact);
}

TEST(GridIo, Fnv1a) {
  EXPECT_EQ(io::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(io::hex64(255), "00000000000000ff");
}

TEST(Experiments, ParallelForRethrowsLowestIndex) {
  std::vector<int> hit(8, 0);
  exp::parallel_for(8, 3, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 8);
  try {
    exp::parallel_for(8, 1, [](std::size_t i) {
      if (i >= 5) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "5");
  }
}

TEST(Experiments, SimulateNeedsSolvedField) {
  auto c = config::load(config::preset_path("fig6"));
  const auto dir = scratch("nofield");
  EXPECT_THROW(exp::load_fields(c, dir), MissingArtifact);
}

TEST(Experiments, EmptySweepIsNoOp) {
  auto c = config::load(config::preset_path("fig3"));
  const auto dir = scratch("emptysweep");
  EXPECT_EQ(exp::cmd_sweep(c, dir, 1, {config::SweepAxis{"radio.sbs_density_per_m2", {}}}), 0u);
  EXPECT_FALSE(fs::exists(dir / "sweep.csv"));
}

TEST(Experiments, SingleValueSweepMatchesRun) {
  auto c = config::load(config::preset_path("fig4"));
  c.nx = c.nq = 16;
  Json doc = c.document;
  doc["lattice"]["nx"] = 16;
  doc["lattice"]["nq"] = 16;
  c = config::parse(doc);
  const auto a = scratch("single_a"), b = scratch("single_b");
  exp::cmd_solve(c, a, 1);
  exp::cmd_sweep(c, b, 1, {config::SweepAxis{"lattice.horizon_s", {c.horizon}}});
  std::ifstream fa(a / "policy_q_0.csv"), fb(b / "point_000" / "policy_q_0.csv");
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
}
