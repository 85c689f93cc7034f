#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfgcache/random.hpp"

namespace mfgcache::radio {

enum class Fading {
  kRayleigh,  // |g|^2 ~ Exp(1)
  kNone,      // |g|^2 = 1
};

double dbm_to_watts(double dbm);

// Downlink environment of the ultra-dense network. Densities are per m^2 and
// lengths in metres; the normalised-interference and path-loss formulas are
// evaluated after rescaling to `length_unit_m` (kilometres by default), the
// unit the reception-ball radius is quoted in.
struct RadioEnvironment {
  double sbs_density = 0.05;       // lambda_b [1/m^2]
  double user_density = 1e-4;      // lambda_u [1/m^2]
  double tx_power_w = 0.19953;     // P
  double pathloss_exp = 4.0;       // alpha
  int antennas = 1;                // N_a
  double noise_w = 1e-10;          // sigma^2
  double ball_radius_m = 5641.895835477563;  // R = 10/sqrt(pi) km
  double length_unit_m = 1000.0;
  Fading fading = Fading::kRayleigh;

  // Throws std::invalid_argument on violated invariants; returns warnings.
  std::vector<std::string> validate() const;

  double sbs_density_scaled() const;
  double user_density_scaled() const;
  double ball_radius_scaled() const;
};

// Probability that an SBS has at least one user in its cell.
double active_probability(const RadioEnvironment& env);

// Interference normalised by SBS density and antenna count.
double mean_field_interference(const RadioEnvironment& env);

// Noise term sigma^2 / (N_a lambda_b^{alpha/2}) of the rate bound.
double normalized_noise(const RadioEnvironment& env);

// E_S log(1 + S/d) for S = mean_signal * |g|^2. Rayleigh fading is integrated
// with 64-point Gauss-Legendre in y = log(1 + S/d), which keeps the integrand
// smooth for any ratio mean_signal/d.
double expected_log1p(double mean_signal, double denom, Fading fading);

// Average downlink rate per unit bandwidth for a given normalised
// interference level (nats/s/Hz).
double average_rate(const RadioEnvironment& env, double ifield);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Area {
  double width_m = 200.0;
  double height_m = 200.0;
};

struct NetworkRealization {
  std::vector<Point> sbs;
  std::vector<Point> users;
  std::vector<bool> active;
  Area area;

  // Wrap-around distance on the torus [0,w) x [0,h), in metres.
  double distance(Point a, Point b) const;
  std::size_t active_count() const;
};

NetworkRealization sample_network(const RadioEnvironment& env, Area area,
                                  RandomStream& rng);

// Serving SBS: nearest SBS inside the ball whose `has_content` flag is
// set (all SBSs if empty). Interferers: the other active SBSs in the ball,
// each hitting the user's beam with probability 1/sqrt(N_a) and then adding
// N_a P |g|^2 l. Returns nullopt when no SBS can serve (miss / no coverage).
std::optional<double> empirical_sinr(const NetworkRealization& net,
                                     const RadioEnvironment& env,
                                     Point user, RandomStream& rng,
                                     std::span<const bool> has_content = {});

std::optional<double> empirical_sinr(const NetworkRealization& net,
                                     const RadioEnvironment& env,
                                     std::size_t user_index, RandomStream& rng,
                                     std::span<const bool> has_content = {});

}  // namespace mfgcache::radio
