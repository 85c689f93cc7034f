#include "mfgcache/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mfgcache::radio {

namespace {

struct GaussLegendre {
  std::array<double, 64> nodes{};
  std::array<double, 64> weights{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_64.
const GaussLegendre& gauss_legendre_64() {
  static const GaussLegendre rule = [] {
    GaussLegendre g;
    constexpr int n = 64;
    for (int i = 0; i < n / 2; ++i) {
      long double z = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) /
                               (n + 0.5L));
      long double dp = 0.0L;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1.0L, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2.0L * k - 1.0L) * z * p1 - (k - 1.0L) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0L);
        const long double step = p1 / dp;
        z -= step;
        if (std::fabs(step) < 1e-19L) break;
      }
      const long double w = 2.0L / ((1.0L - z * z) * dp * dp);
      g.nodes[i] = static_cast<double>(-z);
      g.nodes[n - 1 - i] = static_cast<double>(z);
      g.weights[i] = g.weights[n - 1 - i] = static_cast<double>(w);
    }
    return g;
  }();
  return rule;
}

double path_loss(double distance_m, const RadioEnvironment& env) {
  const double d = distance_m / env.length_unit_m;
  if (d <= 1.0) return 1.0;
  return std::pow(d, -env.pathloss_exp);
}

double fading_draw(Fading f, RandomStream& rng) {
  if (f == Fading::kNone) return 1.0;
  std::exponential_distribution<double> expo(1.0);
  return expo(rng);
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double RadioEnvironment::sbs_density_scaled() const {
  return sbs_density * length_unit_m * length_unit_m;
}
double RadioEnvironment::user_density_scaled() const {
  return user_density * length_unit_m * length_unit_m;
}
double RadioEnvironment::ball_radius_scaled() const {
  return ball_radius_m / length_unit_m;
}

std::vector<std::string> RadioEnvironment::validate() const {
  std::vector<std::string> warnings;
  if (!(user_density > 0.0))
    throw std::invalid_argument("user density must be > 0");
  if (!(sbs_density > user_density))
    throw std::invalid_argument(
        "SBS density must exceed user density (ultra-dense regime)");
  if (sbs_density < 10.0 * user_density)
    warnings.push_back("SBS density is less than 10x the user density");
  if (!(pathloss_exp > 2.0))
    throw std::invalid_argument("path-loss exponent must be > 2");
  if (!(ball_radius_m > 0.0))
    throw std::invalid_argument("reception ball radius must be > 0");
  if (antennas < 1) throw std::invalid_argument("antenna count must be >= 1");
  if (!(tx_power_w > 0.0)) throw std::invalid_argument("tx power must be > 0");
  if (!(noise_w >= 0.0)) throw std::invalid_argument("noise must be >= 0");
  if (!(length_unit_m > 0.0))
    throw std::invalid_argument("length unit must be > 0");
  return warnings;
}

double active_probability(const RadioEnvironment& env) {
  const double ratio = env.user_density / (3.5 * env.sbs_density);
  return 1.0 - std::pow(1.0 + ratio, -3.5);
}

double mean_field_interference(const RadioEnvironment& env) {
  const double alpha = env.pathloss_exp;
  if (!(alpha > 2.0))
    throw std::invalid_argument("normalised interference needs alpha > 2");
  const double lu = env.user_density_scaled();
  const double lb = env.sbs_density_scaled();
  const double r = env.ball_radius_scaled();
  const double users_in_ball = lu * std::numbers::pi * r;
  const double bracket = 1.0 + (1.0 - std::pow(r, 2.0 - alpha)) / (alpha - 2.0);
  return users_in_ball * users_in_ball /
         std::sqrt(static_cast<double>(env.antennas)) *
         std::pow(lb, -alpha / 2.0) * bracket * env.tx_power_w;
}

double normalized_noise(const RadioEnvironment& env) {
  return env.noise_w / (static_cast<double>(env.antennas) *
                        std::pow(env.sbs_density_scaled(), env.pathloss_exp / 2.0));
}

double expected_log1p(double mean_signal, double denom, Fading fading) {
  if (mean_signal <= 0.0) return 0.0;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  if (!std::isfinite(denom)) return 0.0;
  if (fading == Fading::kNone) return std::log1p(mean_signal / denom);

  // S/d = u/k with u ~ Exp(1), k = d/mean. Substituting u = k(e^y - 1):
  // E log(1 + u/k) = int_0^inf y k e^y exp(-k(e^y - 1)) dy.
  const double k = denom / mean_signal;
  const double y_max = std::log1p(60.0 / k);
  const auto& gl = gauss_legendre_64();
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double y = 0.5 * y_max * (gl.nodes[i] + 1.0);
    const double u = k * std::expm1(y);
    sum += gl.weights[i] * y * k * std::exp(y - u);
  }
  return 0.5 * y_max * sum;
}

double average_rate(const RadioEnvironment& env, double ifield) {
  if (ifield < 0.0) throw std::invalid_argument("interference must be >= 0");
  const double signal = static_cast<double>(env.antennas) * env.tx_power_w;
  return expected_log1p(signal, normalized_noise(env) + ifield, env.fading);
}

double NetworkRealization::distance(Point a, Point b) const {
  double dx = std::fabs(a.x - b.x);
  double dy = std::fabs(a.y - b.y);
  dx = std::min(dx, area.width_m - dx);
  dy = std::min(dy, area.height_m - dy);
  return std::hypot(dx, dy);
}

std::size_t NetworkRealization::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

NetworkRealization sample_network(const RadioEnvironment& env, Area area,
                                  RandomStream& rng) {
  if (!(area.width_m > 0.0 && area.height_m > 0.0))
    throw std::invalid_argument("simulation area must be positive");
  NetworkRealization net;
  net.area = area;
  const double size = area.width_m * area.height_m;
  std::uniform_real_distribution<double> ux(0.0, area.width_m);
  std::uniform_real_distribution<double> uy(0.0, area.height_m);

  auto place = [&](double density, std::vector<Point>& out) {
    if (density <= 0.0) return;
    std::poisson_distribution<long long> count(density * size);
    const long long n = count(rng);
    out.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
      const double x = ux(rng);
      out.push_back({x, uy(rng)});
    }
  };
  place(env.sbs_density, net.sbs);
  place(env.user_density, net.users);

  const double pa =
      env.sbs_density > 0.0 ? active_probability(env) : 0.0;
  std::bernoulli_distribution coin(std::clamp(pa, 0.0, 1.0));
  net.active.resize(net.sbs.size());
  for (std::size_t k = 0; k < net.sbs.size(); ++k) net.active[k] = coin(rng);
  return net;
}

std::optional<double> empirical_sinr(const NetworkRealization& net,
                                     const RadioEnvironment& env, Point user,
                                     RandomStream& rng,
                                     std::span<const bool> has_content) {
  if (!has_content.empty() && has_content.size() != net.sbs.size())
    throw std::invalid_argument("content mask must cover every SBS");

  std::size_t serving = net.sbs.size();
  double serving_dist = std::numeric_limits<double>::infinity();
  // The serving SBS transmits because it serves this user, so it is not
  // subject to the activity thinning applied to interferers.
  for (std::size_t k = 0; k < net.sbs.size(); ++k) {
    if (!has_content.empty() && !has_content[k]) continue;
    const double d = net.distance(net.sbs[k], user);
    if (d <= env.ball_radius_m && d < serving_dist) {
      serving = k;
      serving_dist = d;
    }
  }
  if (serving == net.sbs.size()) return std::nullopt;

  const double na = static_cast<double>(env.antennas);
  const double beam_hit = 1.0 / std::sqrt(na);
  std::bernoulli_distribution hit(beam_hit);

  const double signal = na * env.tx_power_w * fading_draw(env.fading, rng) *
                        path_loss(serving_dist, env);
  double interference = 0.0;
  for (std::size_t k = 0; k < net.sbs.size(); ++k) {
    if (k == serving || !net.active[k]) continue;
    const double d = net.distance(net.sbs[k], user);
    if (d > env.ball_radius_m) continue;
    if (!hit(rng)) continue;
    interference += na * env.tx_power_w * fading_draw(env.fading, rng) *
                    path_loss(d, env);
  }
  return signal / (env.noise_w + interference);
}

std::optional<double> empirical_sinr(const NetworkRealization& net,
                                     const RadioEnvironment& env,
                                     std::size_t user_index, RandomStream& rng,
                                     std::span<const bool> has_content) {
  return empirical_sinr(net, env, net.users.at(user_index), rng, has_content);
}

}  // namespace mfgcache::radio
