#include "mfgcache/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfgcache::policies {

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::kMeanField: return "mf";
    case Kind::kBaseline: return "baseline";
    case Kind::kUniformRandom: return "random";
  }
  return "?";
}

Kind parse_kind(std::string_view name) {
  if (name == "mf") return Kind::kMeanField;
  if (name == "baseline") return Kind::kBaseline;
  if (name == "random") return Kind::kUniformRandom;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

double feasible_upper(const Context& ctx) {
  if (!(ctx.size > 0.0)) throw std::invalid_argument("content size must be > 0");
  return std::max(0.0, std::min({1.0, ctx.storage / ctx.size,
                                 ctx.backhaul * (1.0 - ctx.barrier_margin) / ctx.size}));
}

double clamp_feasible(double p, const Context& ctx) {
  return std::clamp(p, 0.0, feasible_upper(ctx));
}

double baseline_fraction(double x, const Context& ctx) {
  const double bracket = ctx.backhaul - 1.0 / (1.0 + ctx.rate * x);
  return std::max(bracket, 0.0) / ctx.size;
}

MeanFieldLookup::MeanFieldLookup(std::shared_ptr<const mfg::PolicyField> field)
    : field_(std::move(field)) {
  if (!field_) throw std::invalid_argument("mean-field policy needs a field");
}

namespace {

// Position in cell-centre coordinates, clamped to the centre range.
struct Bracket {
  int lo;
  double w;  // weight of lo + 1
};

Bracket locate(double v, double step, int cells, double extent, const char* axis) {
  if (v < -step || v > extent + step)
    throw std::out_of_range(std::string("policy query outside the lattice in ") + axis);
  const double pos = std::clamp(v / step - 0.5, 0.0, static_cast<double>(cells - 1));
  const int lo = std::min(static_cast<int>(pos), cells - 2);
  return {lo, pos - lo};
}

}  // namespace

double MeanFieldLookup::operator()(double x, double q, double t) const {
  const auto& lat = field_->lattice();
  if (t < -lat.dt() || t > lat.horizon() + lat.dt())
    throw std::out_of_range("policy query outside the lattice in t");
  const int n = std::clamp(static_cast<int>(std::lround(t / lat.dt())), 0, lat.nt());
  const Bracket bx = locate(x, lat.dx(), lat.nx(), 1.0, "x");
  const Bracket bq = locate(q, lat.dq(), lat.nq(), lat.storage(), "Q");
  const auto& f = *field_;
  const double p00 = f(n, bx.lo, bq.lo), p01 = f(n, bx.lo, bq.lo + 1);
  const double p10 = f(n, bx.lo + 1, bq.lo), p11 = f(n, bx.lo + 1, bq.lo + 1);
  return (1 - bx.w) * ((1 - bq.w) * p00 + bq.w * p01) +
         bx.w * ((1 - bq.w) * p10 + bq.w * p11);
}

Policy Policy::mean_field(std::shared_ptr<const mfg::PolicyField> field) {
  return Policy(MeanFieldLookup(std::move(field)));
}

Policy Policy::baseline() { return Policy(Baseline{}); }

Policy Policy::uniform_random(std::uint64_t seed) {
  return Policy(UniformRandom{make_stream(seed)});
}

Kind Policy::kind() const noexcept {
  switch (impl_.index()) {
    case 0: return Kind::kMeanField;
    case 1: return Kind::kBaseline;
    default: return Kind::kUniformRandom;
  }
}

double Policy::decide(double x, double q, double t, const Context& ctx) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("popularity outside [0, 1]");
  double p = 0.0;
  if (auto* mf = std::get_if<MeanFieldLookup>(&impl_)) {
    p = (*mf)(x, q, t);
  } else if (std::holds_alternative<Baseline>(impl_)) {
    p = baseline_fraction(x, ctx);
  } else {
    auto& r = std::get<UniformRandom>(impl_);
    p = std::uniform_real_distribution<double>(0.0, feasible_upper(ctx))(r.rng);
  }
  return clamp_feasible(p, ctx);
}

Policy Policy::reseeded(std::uint64_t seed) const {
  if (std::holds_alternative<UniformRandom>(impl_)) return uniform_random(seed);
  return *this;
}

void IpiModel::validate() const {
  if (!std::isfinite(bias)) throw std::invalid_argument("IPI bias must be finite");
  if (!(sd >= 0.0) || !std::isfinite(sd))
    throw std::invalid_argument("IPI sd must be finite and >= 0");
}

double observe_popularity(double x, const IpiModel& ipi, RandomStream& rng,
                          double popularity_floor) {
  if (ipi.perfect()) return x;
  double delta = ipi.bias;
  if (ipi.sd > 0.0) delta += ipi.sd * std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::clamp(x + delta, popularity_floor, 1.0);
}

}  // namespace mfgcache::policies
