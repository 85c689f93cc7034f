#include "mfgcache/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include "mfgcache/demand.hpp"
#include "mfgcache/errors.hpp"
#include "mfgcache/grid_io.hpp"

#ifndef MFGCACHE_PRESET_DIR
#define MFGCACHE_PRESET_DIR "presets"
#endif

namespace mfgcache::config {

namespace {

// Reads one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!obj_.contains(key)) return;
    used_.insert(key);
    const Json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(key, "must be true or false");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) fail(key, "must be a number");
        if constexpr (std::is_integral_v<T>) {
          const double d = v.get<double>();
          if (d != std::floor(d)) fail(key, "must be an integer");
          if (std::is_unsigned_v<T> && d < 0) fail(key, "must be >= 0");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(key, "must be a string");
      }
      out = v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(key, e.what());
    }
  }

  const Json& child(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) fail(it.key(), "unknown key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    std::string where = path_;
    if (!key.empty()) where += where.empty() ? key : "." + key;
    throw ConfigError((where.empty() ? std::string("config") : where) + ": " + why);
  }

  const std::string& path() const { return path_; }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

std::string join(const std::string& a, const std::string& b) {
  return a.empty() ? b : a + "." + b;
}

void parse_radio(Section s, radio::RadioEnvironment& env) {
  s.read("sbs_density_per_m2", env.sbs_density);
  s.read("user_density_per_m2", env.user_density);
  if (s.has("tx_power_dbm") && s.has("tx_power_w"))
    s.fail("tx_power_w", "give the power once, in dBm or in W");
  if (s.has("tx_power_dbm")) {
    double dbm = 0.0;
    s.read("tx_power_dbm", dbm);
    env.tx_power_w = radio::dbm_to_watts(dbm);
  }
  s.read("tx_power_w", env.tx_power_w);
  if (s.has("noise_dbm") && s.has("noise_w"))
    s.fail("noise_w", "give the noise once, in dBm or in W");
  if (s.has("noise_dbm")) {
    double dbm = 0.0;
    s.read("noise_dbm", dbm);
    env.noise_w = radio::dbm_to_watts(dbm);
  }
  s.read("noise_w", env.noise_w);
  s.read("pathloss_exponent", env.pathloss_exp);
  s.read("antennas", env.antennas);
  s.read("ball_radius_m", env.ball_radius_m);
  s.read("length_unit_m", env.length_unit_m);
  if (s.has("fading")) {
    std::string f;
    s.read("fading", f);
    if (f == "rayleigh") env.fading = radio::Fading::kRayleigh;
    else if (f == "none") env.fading = radio::Fading::kNone;
    else s.fail("fading", "expected \"rayleigh\" or \"none\"");
  }
  s.finish();
}

ContentSpec parse_content(Section s) {
  ContentSpec c;
  s.read("size_units", c.size);
  s.read("discard_rate_units_per_s", c.discard_rate);
  s.read("backhaul_units_per_s", c.backhaul);
  if (s.has("mean_popularity")) {
    const Json& v = s.child("mean_popularity");
    if (v.is_string() && v.get<std::string>() == "crp") c.mean_popularity.reset();
    else if (v.is_number()) c.mean_popularity = v.get<double>();
    else s.fail("mean_popularity", "must be a number or \"crp\"");
  }
  s.read("x0", c.x0);
  s.read("x0_sd", c.x0_sd);
  s.read("q0_units", c.q0);
  s.read("q0_sd_units", c.q0_sd);
  s.finish();
  return c;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate(const RunConfig& c) {
  try {
    c.radio.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("radio: ") + e.what());
  }
  check(c.reversion_rate >= 0.0, "demand.reversion_rate_per_s must be >= 0");
  check(c.volatility >= 0.0, "demand.volatility_per_sqrt_s must be >= 0");
  check(c.crp_theta > 0.0, "demand.crp_theta must be > 0");
  check(c.crp_discount >= 0.0 && c.crp_discount < 1.0, "demand.crp_discount must lie in [0, 1)");
  check(c.crp_catalog_size >= 1, "demand.crp_catalog_size must be >= 1");
  check(std::isfinite(c.storage_cost), "cost.storage_cost_per_s must be finite");
  check(c.storage_capacity > 0.0, "cost.storage_capacity_units must be > 0");
  check(c.peers > 0.0, "cost.peers must be > 0");
  check(!c.contents.empty(), "contents must not be empty");
  for (std::size_t j = 0; j < c.contents.size(); ++j) {
    const auto& s = c.contents[j];
    const std::string at = "contents." + std::to_string(j) + ": ";
    check(s.size > 0.0, at + "size_units must be > 0");
    check(s.discard_rate >= 0.0, at + "discard_rate_units_per_s must be >= 0");
    check(s.backhaul > 0.0, at + "backhaul_units_per_s must be > 0");
    check(!s.mean_popularity || (*s.mean_popularity >= 0.0 && *s.mean_popularity <= 1.0),
          at + "mean_popularity must lie in [0, 1]");
    check(s.mean_popularity || j < c.crp_catalog_size,
          at + "CRP popularity needs the index inside demand.crp_catalog_size");
    check(s.x0 >= 0.0 && s.x0 <= 1.0, at + "x0 must lie in [0, 1]");
    check(s.q0 >= 0.0 && s.q0 <= c.storage_capacity, at + "q0_units must lie in [0, C]");
    check(s.x0_sd >= 0.0 && s.q0_sd >= 0.0, at + "spreads must be >= 0");
  }
  check(c.nx >= 2 && c.nq >= 2, "lattice.nx and lattice.nq must be >= 2");
  check(c.horizon > 0.0, "lattice.horizon_s must be > 0");
  check(c.sim_dt >= 0.0, "sim.dt_s must be >= 0");
  check(c.replications >= 1, "sim.replications must be >= 1");
  check(c.area.width_m > 0.0 && c.area.height_m > 0.0, "sim.area_m must be positive");
  check(c.request_range_m >= 0.0, "sim.request_range_m must be >= 0");
  check(!c.policies.empty(), "policies must not be empty");
  try {
    c.ipi.validate();
    auto s = c.solver;
    s.content.peers = c.peers;
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

RunConfig parse(const Json& doc) {
  RunConfig c;
  c.document = doc;
  Section top(doc, "");
  top.read("preset", c.preset);
  if (top.has("radio")) parse_radio(Section(top.child("radio"), "radio"), c.radio);
  if (top.has("demand")) {
    Section s(top.child("demand"), "demand");
    s.read("reversion_rate_per_s", c.reversion_rate);
    s.read("volatility_per_sqrt_s", c.volatility);
    s.read("crp_theta", c.crp_theta);
    s.read("crp_discount", c.crp_discount);
    s.read("crp_catalog_size", c.crp_catalog_size);
    s.read("crp_warmup_requests", c.crp_warmup_requests);
    s.finish();
  }
  if (top.has("cost")) {
    Section s(top.child("cost"), "cost");
    s.read("storage_cost_per_s", c.storage_cost);
    s.read("storage_capacity_units", c.storage_capacity);
    s.read("peers", c.peers);
    s.read("peers_from_request_range", c.peers_from_request_range);
    s.finish();
  }
  if (top.has("contents")) {
    const Json& list = top.child("contents");
    if (!list.is_array()) top.fail("contents", "must be a list");
    c.contents.clear();
    for (std::size_t j = 0; j < list.size(); ++j)
      c.contents.push_back(parse_content(Section(list[j], "contents." + std::to_string(j))));
  }
  if (top.has("lattice")) {
    Section s(top.child("lattice"), "lattice");
    s.read("nx", c.nx);
    s.read("nq", c.nq);
    s.read("horizon_s", c.horizon);
    s.finish();
  }
  if (top.has("solver")) {
    Section s(top.child("solver"), "solver");
    auto& v = c.solver;
    s.read("damping", v.damping);
    s.read("tol", v.tol);
    s.read("max_iters", v.max_iters);
    s.read("terminal_value", v.terminal_value);
    if (s.has("terminal")) {
      std::string t;
      s.read("terminal", t);
      if (t == "zero") c.terminal = Terminal::kZero;
      else if (t == "hold") c.terminal = Terminal::kHold;
      else if (t == "linear") c.terminal = Terminal::kLinear;
      else s.fail("terminal", "expected \"zero\", \"hold\" or \"linear\"");
    }
    s.read("terminal_storage_slope_per_unit", v.terminal_storage_slope);
    if (c.terminal != Terminal::kLinear && v.terminal_storage_slope != 0.0)
      s.fail("terminal_storage_slope_per_unit", "only used with terminal \"linear\"");
    s.read("denom_floor", v.denom_floor);
    s.read("barrier_margin_fraction", v.barrier_margin);
    s.read("popularity_floor", v.popularity_floor);
    s.read("mass_tolerance", v.mass_tolerance);
    s.finish();
  }
  if (top.has("sim")) {
    Section s(top.child("sim"), "sim");
    s.read("dt_s", c.sim_dt);
    s.read("replications", c.replications);
    s.read("seed", c.seed);
    if (s.has("area_m")) {
      const Json& a = s.child("area_m");
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        s.fail("area_m", "must be [width, height]");
      c.area = {a[0].get<double>(), a[1].get<double>()};
    }
    s.read("request_range_m", c.request_range_m);
    s.finish();
  }
  if (top.has("policies")) {
    const Json& list = top.child("policies");
    if (!list.is_array()) top.fail("policies", "must be a list");
    c.policies.clear();
    for (const auto& p : list) {
      if (!p.is_string()) top.fail("policies", "entries must be strings");
      try {
        const auto kind = policies::parse_kind(p.get<std::string>());
        if (std::find(c.policies.begin(), c.policies.end(), kind) != c.policies.end())
          top.fail("policies", "duplicate entry");
        c.policies.push_back(kind);
      } catch (const std::invalid_argument& e) {
        top.fail("policies", e.what());
      }
    }
  }
  if (top.has("ipi")) {
    Section s(top.child("ipi"), "ipi");
    s.read("bias", c.ipi.bias);
    s.read("sd", c.ipi.sd);
    s.read("compare_ppi", c.compare_ppi);
    s.finish();
  }
  if (top.has("sweep")) {
    Section s(top.child("sweep"), "sweep");
    s.read("simulate", c.sweep_simulate);
    if (s.has("axes")) {
      const Json& axes = s.child("axes");
      if (!axes.is_array()) s.fail("axes", "must be a list");
      for (std::size_t a = 0; a < axes.size(); ++a) {
        Section ax(axes[a], "sweep.axes." + std::to_string(a));
        SweepAxis axis;
        ax.read("key", axis.key);
        ax.read("values", axis.values);
        if (axis.key.empty()) ax.fail("key", "is required");
        ax.finish();
        c.sweep.push_back(std::move(axis));
      }
    }
    s.finish();
  }
  if (top.has("output")) {
    Section s(top.child("output"), "output");
    s.read("full_csv", c.full_csv);
    s.finish();
  }
  top.finish();
  validate(c);
  // Sweep keys must name numeric fields of the schema.
  for (const auto& axis : c.sweep) {
    Json probe = doc;
    set_number(probe, axis.key, axis.values.empty() ? 0.0 : axis.values.front());
    probe.erase("sweep");
    try {
      parse(probe);
    } catch (const ConfigError& e) {
      // Range errors depend on the probe value; schema errors do not.
      const std::string why = e.what();
      if (why.find("unknown key") != std::string::npos ||
          why.find("must be a") != std::string::npos)
        throw ConfigError("sweep key '" + axis.key + "': " + e.what());
    }
  }
  return c;
}

Json load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunConfig load(const std::filesystem::path& path) { return parse(load_document(path)); }

void set_number(Json& doc, const std::string& key, double value) {
  if (key.empty()) throw ConfigError("empty sweep key");
  Json* node = &doc;
  std::size_t start = 0;
  std::string walked;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("malformed key '" + key + "'");
    walked = join(walked, part);
    const bool last = dot == std::string::npos;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ConfigError("'" + walked + "' must index a list by number");
      }
      if (idx >= node->size()) throw ConfigError("'" + walked + "' is out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) throw ConfigError("'" + walked + "' is not a section");
      node = &(*node)[part];
    }
    if (last) break;
    start = dot + 1;
  }
  if (!node->is_null() && !node->is_number())
    throw ConfigError("'" + key + "' is not a numeric field");
  *node = value;
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("MFGCACHE_PRESET_DIR")) return env;
  return MFGCACHE_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(preset_dir(), ec))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path preset_path(const std::string& name) {
  const auto p = preset_dir() / (name + ".json");
  if (!std::filesystem::exists(p)) throw ConfigError("unknown preset '" + name + "'");
  return p;
}

std::string document_hash(const Json& doc) {
  return "fnv1a64:" + io::hex64(io::fnv1a64(doc.dump()));
}

std::vector<double> mean_popularities(const RunConfig& cfg) {
  std::vector<double> mu(cfg.contents.size());
  std::optional<demand::CrpState> crp;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (cfg.contents[j].mean_popularity) {
      mu[j] = *cfg.contents[j].mean_popularity;
      continue;
    }
    if (!crp) {
      auto rng = make_stream(cfg.seed, {0xc7b});
      crp = demand::crp_warmup(cfg.crp_catalog_size, cfg.crp_theta, cfg.crp_discount,
                               cfg.crp_warmup_requests, rng);
    }
    mu[j] = demand::crp_mean_popularity(*crp, j);
  }
  return mu;
}

mfg::SolverConfig solver_config(const RunConfig& cfg, std::size_t content) {
  const auto& spec = cfg.contents.at(content);
  mfg::SolverConfig s = cfg.solver;
  auto& c = s.content;
  c.size = spec.size;
  c.discard_rate = spec.discard_rate;
  c.backhaul = spec.backhaul;
  c.storage = cfg.storage_capacity;
  c.storage_cost = cfg.storage_cost;
  c.peers = cfg.peers;
  if (cfg.peers_from_request_range) {
    c.peers = cfg.radio.sbs_density * std::numbers::pi * cfg.request_range_m *
              cfg.request_range_m;
    if (!(c.peers > 0.0)) throw ConfigError("peer count from the request range is zero");
  }
  c.reversion_rate = cfg.reversion_rate;
  c.volatility = cfg.volatility;
  c.mean_popularity = mean_popularities(cfg)[content];
  s.rate = radio::average_rate(cfg.radio, radio::mean_field_interference(cfg.radio));
  switch (cfg.terminal) {
    case Terminal::kZero: s.terminal_storage_slope = 0.0; break;
    case Terminal::kHold: s.terminal_storage_slope = mfg::holding_slope(s, c.mean_popularity); break;
    case Terminal::kLinear: break;
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("contents." + std::to_string(content) + ": " + e.what());
  }
  return s;
}

mfg::Lattice lattice(const RunConfig& cfg, const mfg::SolverConfig& solver) {
  return mfg::make_lattice(cfg.nx, cfg.nq, cfg.horizon, solver);
}

sim::SimConfig sim_config(const RunConfig& cfg, std::size_t content,
                          const mfg::Lattice& lat) {
  const auto solver = solver_config(cfg, content);
  const auto& spec = cfg.contents.at(content);
  sim::SimConfig s;
  s.env = cfg.radio;
  s.area = cfg.area;
  s.content = solver.content;
  s.x0 = spec.x0;
  s.x0_sd = spec.x0_sd;
  s.q0 = spec.q0;
  s.q0_sd = spec.q0_sd;
  s.horizon = cfg.horizon;
  s.dt = cfg.sim_dt > 0.0 ? cfg.sim_dt : lat.dt();
  s.replications = cfg.replications;
  s.master_seed = cfg.seed;
  s.request_range_m = cfg.request_range_m;
  s.rate = solver.rate;
  s.popularity_floor = solver.popularity_floor;
  s.barrier_margin = solver.barrier_margin;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sim: " + std::string(e.what()));
  }
  return s;
}

}  // namespace mfgcache::config
