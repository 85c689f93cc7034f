#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfgcache/random.hpp"

namespace mfgcache::demand {

// Request probabilities are floored at this value wherever they divide a cost.
inline constexpr double kPopularityFloor = 1e-3;

// Long-term popularity state of one SBS: a Chinese restaurant process over a
// finite catalog. Files that have been requested at least once form the
// requested set; the remaining files share the new-file mass uniformly.
class CrpState {
 public:
  CrpState(std::size_t catalog_size, double theta, double discount);
  CrpState(std::vector<std::uint64_t> request_counts, double theta,
           double discount);

  std::size_t catalog_size() const noexcept { return counts_.size(); }
  double theta() const noexcept { return theta_; }
  double discount() const noexcept { return discount_; }
  std::uint64_t total_requests() const noexcept { return total_; }
  std::uint64_t request_count(std::size_t j) const { return counts_.at(j); }
  const std::vector<std::uint64_t>& request_counts() const noexcept {
    return counts_;
  }

  std::size_t requested_size() const noexcept { return requested_; }
  std::size_t unrequested_size() const noexcept {
    return counts_.size() - requested_;
  }
  bool is_requested(std::size_t j) const { return counts_.at(j) > 0; }

  // Records one request for file j.
  void record(std::size_t j);

  // order_[0, requested_) lists the requested files, the tail the others.
  std::span<const std::size_t> requested_files() const noexcept {
    return {order_.data(), requested_};
  }
  std::span<const std::size_t> unrequested_files() const noexcept {
    return {order_.data() + requested_, order_.size() - requested_};
  }

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> slot_;
  std::size_t requested_ = 0;
  std::uint64_t total_ = 0;
  double theta_;
  double discount_;
};

struct OuParams {
  double reversion_rate = 1.0;  // r
  double volatility = 0.0;      // eta
  double mean = 0.5;            // mu_j
  double dt = 0.01;

  void validate() const;
};

struct DemandState {
  std::vector<double> x;  // request probability per content
  double t = 0.0;
};

// Mean popularity of file j. Requested files get (n_j - nu)/(N + theta); each
// unrequested file gets an equal share of (nu*|U^r| + theta)/(N + theta).
// When every file has been requested the requested weights are renormalised.
double crp_mean_popularity(const CrpState& state, std::size_t j);
std::vector<double> crp_mean_popularities(const CrpState& state);

// Draws the next requested file from the mean-popularity law and records it.
std::size_t crp_sample_request(CrpState& state, RandomStream& rng);

// Runs `requests` draws from an empty history.
CrpState crp_warmup(std::size_t catalog_size, double theta, double discount,
                    std::uint64_t requests, RandomStream& rng);

// Asymptotic mean number of distinct requested files after N requests.
double expected_distinct_files(std::uint64_t total_requests, double theta,
                               double discount);

// One Euler-Maruyama step of dx = r(mu - x)dt + eta dW, clipped to [0,1].
double ou_step(double x, const OuParams& params, RandomStream& rng);
DemandState ou_step(const DemandState& state, std::span<const OuParams> params,
                    RandomStream& rng);

// x_0, x_1, ..., x_steps.
std::vector<double> ou_trajectory(double x0, const OuParams& params,
                                  std::size_t steps, RandomStream& rng);

}  // namespace mfgcache::demand
