#pragma once

#include <memory>
#include <string_view>
#include <variant>

#include "mfgcache/lattice.hpp"
#include "mfgcache/random.hpp"

namespace mfgcache::policies {

enum class Kind { kMeanField, kBaseline, kUniformRandom };

std::string_view kind_name(Kind kind);
// "mf", "baseline" or "random"; throws std::invalid_argument otherwise.
Kind parse_kind(std::string_view name);

// Per-decision environment shared by every policy.
struct Context {
  double backhaul = 1.0;   // B
  double size = 1.0;       // L
  double storage = 1.0;    // C
  double rate = 1.0;       // R
  double barrier_margin = 1e-6;  // fraction of B kept free
};

// min(1, C/L, (B - delta_B)/L): the shared feasibility ceiling.
double feasible_upper(const Context& ctx);
double clamp_feasible(double p, const Context& ctx);

// [B - 1/(1 + R x)]^+ / L, before the shared clamp.
double baseline_fraction(double x, const Context& ctx);

// Bilinear lookup in (x, Q) on the nearest time slice. Queries may sit at
// most one cell outside the lattice; beyond that std::out_of_range.
class MeanFieldLookup {
 public:
  explicit MeanFieldLookup(std::shared_ptr<const mfg::PolicyField> field);
  double operator()(double x, double q, double t) const;
  const mfg::PolicyField& field() const noexcept { return *field_; }

 private:
  std::shared_ptr<const mfg::PolicyField> field_;
};

class Policy {
 public:
  static Policy mean_field(std::shared_ptr<const mfg::PolicyField> field);
  static Policy baseline();
  static Policy uniform_random(std::uint64_t seed);

  Kind kind() const noexcept;

  // Feasible caching fraction for an SBS at (x, Q, t). Only the random
  // policy consumes its stream.
  double decide(double x, double q, double t, const Context& ctx);

  // Copy with the random stream replaced; other kinds are returned as is.
  Policy reseeded(std::uint64_t seed) const;

 private:
  struct Baseline {};
  struct UniformRandom {
    RandomStream rng;
  };
  using Impl = std::variant<MeanFieldLookup, Baseline, UniformRandom>;
  explicit Policy(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

struct IpiModel {
  double bias = 0.0;
  double sd = 0.0;
  void validate() const;
  bool perfect() const noexcept { return bias == 0.0 && sd == 0.0; }
};

// clip(x + Delta, x_min, 1) with Delta ~ N(bias, sd^2). The perfect model
// returns x untouched and draws nothing.
double observe_popularity(double x, const IpiModel& ipi, RandomStream& rng,
                          double popularity_floor = 1e-3);

}  // namespace mfgcache::policies
