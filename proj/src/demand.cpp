#include "mfgcache/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mfgcache::demand {

namespace {

void check_crp_params(double theta, double discount) {
  if (!(theta > 0.0)) throw std::invalid_argument("CRP theta must be > 0");
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("CRP discount must lie in [0, 1)");
}

}  // namespace

CrpState::CrpState(std::size_t catalog_size, double theta, double discount)
    : counts_(catalog_size, 0),
      order_(catalog_size),
      slot_(catalog_size),
      theta_(theta),
      discount_(discount) {
  if (catalog_size == 0)
    throw std::invalid_argument("CRP catalog must contain at least one file");
  check_crp_params(theta, discount);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::iota(slot_.begin(), slot_.end(), std::size_t{0});
}

CrpState::CrpState(std::vector<std::uint64_t> request_counts, double theta,
                   double discount)
    : CrpState(request_counts.size(), theta, discount) {
  for (std::size_t j = 0; j < request_counts.size(); ++j) {
    if (request_counts[j] == 0) continue;
    record(j);
    counts_[j] = request_counts[j];
  }
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

void CrpState::record(std::size_t j) {
  if (j >= counts_.size()) throw std::out_of_range("content index");
  if (counts_[j] == 0) {
    // Swap j into the requested prefix.
    const std::size_t s = slot_[j];
    const std::size_t other = order_[requested_];
    std::swap(order_[s], order_[requested_]);
    slot_[other] = s;
    slot_[j] = requested_;
    ++requested_;
  }
  ++counts_[j];
  ++total_;
}

double crp_mean_popularity(const CrpState& state, std::size_t j) {
  if (j >= state.catalog_size()) throw std::out_of_range("content index");
  const double n_total = static_cast<double>(state.total_requests());
  const double theta = state.theta();
  const double nu = state.discount();
  const double k = static_cast<double>(state.requested_size());
  if (state.unrequested_size() == 0) {
    return (static_cast<double>(state.request_count(j)) - nu) /
           (n_total - nu * k);
  }
  if (state.is_requested(j))
    return (static_cast<double>(state.request_count(j)) - nu) /
           (n_total + theta);
  const double new_mass = (nu * k + theta) / (n_total + theta);
  return new_mass / static_cast<double>(state.unrequested_size());
}

std::vector<double> crp_mean_popularities(const CrpState& state) {
  std::vector<double> mu(state.catalog_size());
  for (std::size_t j = 0; j < mu.size(); ++j)
    mu[j] = crp_mean_popularity(state, j);
  return mu;
}

std::size_t crp_sample_request(CrpState& state, RandomStream& rng) {
  const double n_total = static_cast<double>(state.total_requests());
  const double nu = state.discount();
  const double k = static_cast<double>(state.requested_size());
  const double old_mass = n_total - nu * k;
  const double new_mass =
      state.unrequested_size() > 0 ? nu * k + state.theta() : 0.0;

  std::uniform_real_distribution<double> unif(0.0, old_mass + new_mass);
  double u = unif(rng);
  std::size_t chosen;
  if (u < old_mass) {
    auto requested = state.requested_files();
    chosen = requested.back();
    for (std::size_t j : requested) {
      u -= static_cast<double>(state.request_count(j)) - nu;
      if (u < 0.0) {
        chosen = j;
        break;
      }
    }
  } else {
    auto fresh = state.unrequested_files();
    std::uniform_int_distribution<std::size_t> pick(0, fresh.size() - 1);
    chosen = fresh[pick(rng)];
  }
  state.record(chosen);
  return chosen;
}

CrpState crp_warmup(std::size_t catalog_size, double theta, double discount,
                    std::uint64_t requests, RandomStream& rng) {
  CrpState state(catalog_size, theta, discount);
  for (std::uint64_t i = 0; i < requests; ++i) crp_sample_request(state, rng);
  return state;
}

double expected_distinct_files(std::uint64_t total_requests, double theta,
                               double discount) {
  if (discount < 0.0)
    throw std::invalid_argument("CRP discount must be non-negative");
  if (!(theta > 0.0)) throw std::invalid_argument("CRP theta must be > 0");
  if (total_requests < 1)
    throw std::invalid_argument("need at least one request");
  const double n = static_cast<double>(total_requests);
  if (discount == 0.0) return theta * std::log(n + theta);
  const double log_ratio = std::lgamma(theta + 1.0) - std::lgamma(theta + discount);
  return std::exp(log_ratio) / discount * std::pow(n, discount);
}

void OuParams::validate() const {
  if (!(reversion_rate >= 0.0))
    throw std::invalid_argument("OU reversion rate must be >= 0");
  if (!(volatility >= 0.0))
    throw std::invalid_argument("OU volatility must be >= 0");
  if (!(mean >= 0.0 && mean <= 1.0))
    throw std::invalid_argument("OU mean must lie in [0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("OU dt must be > 0");
}

double ou_step(double x, const OuParams& p, RandomStream& rng) {
  double next = x + p.reversion_rate * (p.mean - x) * p.dt;
  if (p.volatility > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    next += p.volatility * std::sqrt(p.dt) * normal(rng);
  }
  return std::clamp(next, 0.0, 1.0);
}

DemandState ou_step(const DemandState& state, std::span<const OuParams> params,
                    RandomStream& rng) {
  if (params.size() != state.x.size())
    throw std::invalid_argument("one OU parameter set per content required");
  DemandState next{state.x, state.t};
  for (std::size_t j = 0; j < next.x.size(); ++j)
    next.x[j] = ou_step(state.x[j], params[j], rng);
  if (!params.empty()) next.t += params.front().dt;
  return next;
}

std::vector<double> ou_trajectory(double x0, const OuParams& params,
                                  std::size_t steps, RandomStream& rng) {
  params.validate();
  std::vector<double> path;
  path.reserve(steps + 1);
  path.push_back(std::clamp(x0, 0.0, 1.0));
  for (std::size_t i = 0; i < steps; ++i)
    path.push_back(ou_step(path.back(), params, rng));
  return path;
}

}  // namespace mfgcache::demand
