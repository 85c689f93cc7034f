#include "mfgcache/mfg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mfgcache/errors.hpp"

namespace mfgcache::mfg {

namespace {

double upper_fraction(double backhaul, double size, double storage,
                      double margin) {
  return std::max(0.0, std::min({1.0, storage / size,
                                 backhaul * (1.0 - margin) / size}));
}

double max_storage_drift(const SolverConfig& cfg) {
  const auto& c = cfg.content;
  const double pmax = cfg.max_fraction();
  return std::max(std::fabs(c.discard_rate),
                  std::fabs(c.discard_rate - c.size * pmax));
}

double max_popularity_drift(const SolverConfig& cfg) {
  const auto& c = cfg.content;
  return c.reversion_rate *
         std::max(c.mean_popularity, 1.0 - c.mean_popularity);
}

// Finite differences of one slice with homogeneous extrapolation at the
// boundary (ghost value equals the boundary value).
struct Stencil {
  const Lattice& lat;
  std::span<const double> v;

  double at(int i, int k) const { return v[lat.node(i, k)]; }
  double fwd_x(int i, int k) const {
    return i + 1 < lat.nx() ? (at(i + 1, k) - at(i, k)) / lat.dx() : 0.0;
  }
  double bwd_x(int i, int k) const {
    return i > 0 ? (at(i, k) - at(i - 1, k)) / lat.dx() : 0.0;
  }
  double fwd_q(int i, int k) const {
    return k + 1 < lat.nq() ? (at(i, k + 1) - at(i, k)) / lat.dq() : 0.0;
  }
  double bwd_q(int i, int k) const {
    return k > 0 ? (at(i, k) - at(i, k - 1)) / lat.dq() : 0.0;
  }
  // Centred inside, one-sided on the boundary rows.
  double ctr_q(int i, int k) const {
    if (k == 0) return fwd_q(i, k);
    if (k + 1 == lat.nq()) return bwd_q(i, k);
    return 0.5 * (fwd_q(i, k) + bwd_q(i, k));
  }
  double ctr_x(int i, int k) const {
    if (i == 0) return fwd_x(i, k);
    if (i + 1 == lat.nx()) return bwd_x(i, k);
    return 0.5 * (fwd_x(i, k) + bwd_x(i, k));
  }
  double second_x(int i, int k) const {
    return (fwd_x(i, k) - bwd_x(i, k)) / lat.dx();
  }
};

// What the control needs at one node: the one-sided Q slopes of v(t+dt),
// R * max(x, x_min) and the feasibility cap.
struct NodeSlopes {
  double forward = 0.0;
  double backward = 0.0;
  double rx = 0.0;
  double cap = 0.0;
};

// Minimiser of J(p) + (e - L p)^+ D+v + (e - L p)^- D-v. The objective is
// convex on each side of p = e/L, so the closed form is applied per side
// with that side's slope and the better of the two is kept.
double node_control(const NodeSlopes& s, double overlap, const SolverConfig& cfg) {
  const auto& c = cfg.content;
  const double split = std::clamp(std::max(c.discard_rate, 0.0) / c.size, 0.0, s.cap);
  auto piece = [&](double lo, double hi, double slope) {
    const double d = s.rx * std::max(slope, cfg.denom_floor);
    if (!(d > 0.0)) return lo;
    return std::clamp((c.backhaul - (1.0 + overlap) / d) / c.size, lo, hi);
  };
  auto objective = [&](double p, double slope) {
    return -std::log(c.backhaul - c.size * p) * (1.0 + overlap) / s.rx +
           (c.discard_rate - c.size * p) * slope;
  };
  const double pa = piece(0.0, split, s.forward);
  if (split >= s.cap) return pa;
  const double pb = piece(split, s.cap, s.backward);
  return objective(pa, s.forward) <= objective(pb, s.backward) ? pa : pb;
}

void fill_slopes(const Lattice& lat, const SolverConfig& cfg, std::span<const double> v,
                 std::vector<NodeSlopes>& out) {
  const auto& c = cfg.content;
  const double upper = upper_fraction(c.backhaul, c.size, c.storage, cfg.barrier_margin);
  // A full store (Q = 0 row) can only replace what it discards.
  const double full_upper = std::min(upper, std::max(c.discard_rate, 0.0) / c.size);
  const Stencil st{lat, v};
  out.resize(lat.slice_size());
  for (int i = 0; i < lat.nx(); ++i) {
    const double rx = cfg.rate * std::max(lat.x(i), cfg.popularity_floor);
    for (int k = 0; k < lat.nq(); ++k)
      out[lat.node(i, k)] = {st.fwd_q(i, k), st.bwd_q(i, k), rx,
                             k == 0 ? full_upper : upper};
  }
}

// Solves I = mf_overlap(m, p*(I)) for one slice.
class SliceControl {
 public:
  SliceControl(const Lattice& lat, const SolverConfig& cfg,
               std::span<const NodeSlopes> slopes)
      : lat_(lat), cfg_(cfg), slopes_(slopes) {}

  double fraction(std::size_t node, double overlap) const {
    if (!(slopes_[node].rx > 0.0)) return 0.0;
    return node_control(slopes_[node], overlap, cfg_);
  }

  double overlap_of(std::span<const double> density, double overlap) const {
    const auto& c = cfg_.content;
    double s = 0.0;
    for (std::size_t n = 0; n < density.size(); ++n)
      if (density[n] != 0.0) s += density[n] * fraction(n, overlap);
    return s * lat_.cell_area() / (c.storage * c.peers);
  }

  // p*(I) is non-increasing in I (the barrier weight grows with I), so
  // g(I) = F(I) - I is decreasing with g(0) >= 0 and g(F(0)) <= 0.
  double solve(std::span<const double> density) const {
    if (std::isinf(cfg_.content.peers)) return 0.0;
    double lo = 0.0, hi = overlap_of(density, 0.0);
    if (hi <= 0.0) return 0.0;
    double glo = hi, ghi = overlap_of(density, hi) - hi;
    if (ghi >= 0.0) return hi;
    int side = 0;
    double mid = hi;
    for (int it = 0; it < 200; ++it) {
      mid = (lo * ghi - hi * glo) / (ghi - glo);
      const double gm = overlap_of(density, mid) - mid;
      if (std::fabs(gm) < 1e-15 || hi - lo < 1e-15) break;
      if (gm > 0.0) {
        lo = mid;
        glo = gm;
        if (side == 1) ghi *= 0.5;
        side = 1;
      } else {
        hi = mid;
        ghi = gm;
        if (side == -1) glo *= 0.5;
        side = -1;
      }
    }
    return mid;
  }

 private:
  const Lattice& lat_;
  const SolverConfig& cfg_;
  std::span<const NodeSlopes> slopes_;
};

}  // namespace

void SolverConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0))
    throw std::invalid_argument("damping must lie in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(denom_floor > 0.0)) throw std::invalid_argument("denominator floor must be > 0");
  if (!(barrier_margin > 0.0 && barrier_margin < 1.0))
    throw std::invalid_argument("barrier margin must lie in (0, 1)");
  if (!(popularity_floor > 0.0))
    throw std::invalid_argument("popularity floor must be > 0");
  if (!std::isfinite(terminal_value) || !std::isfinite(terminal_storage_slope))
    throw std::invalid_argument("terminal condition must be finite");
  const auto& c = content;
  if (!(c.size > 0.0)) throw std::invalid_argument("content size must be > 0");
  if (!(c.backhaul > 0.0)) throw std::invalid_argument("backhaul must be > 0");
  if (!(c.storage > 0.0)) throw std::invalid_argument("storage must be > 0");
  if (!(c.peers > 0.0)) throw std::invalid_argument("peer count must be > 0");
  if (!(c.reversion_rate >= 0.0))
    throw std::invalid_argument("reversion rate must be >= 0");
  if (!(c.volatility >= 0.0)) throw std::invalid_argument("volatility must be >= 0");
  if (!(c.mean_popularity >= 0.0 && c.mean_popularity <= 1.0))
    throw std::invalid_argument("mean popularity must lie in [0, 1]");
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("rate must be finite and >= 0");
}

double SolverConfig::max_fraction() const {
  return upper_fraction(content.backhaul, content.size, content.storage,
                        barrier_margin);
}

double holding_slope(const SolverConfig& cfg, double popularity) {
  const auto& c = cfg.content;
  const double hold = c.discard_rate / c.size;
  if (!(hold < cfg.max_fraction()))
    throw std::invalid_argument("holding fraction e/L is not feasible");
  if (!(cfg.rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  const double overlap = std::isinf(c.peers) ? 0.0 : hold / (c.storage * c.peers);
  return (1.0 + overlap) /
         (cfg.rate * std::max(popularity, cfg.popularity_floor) *
          (c.backhaul - c.discard_rate));
}

double stability_bound(int nx, int nq, const SolverConfig& cfg) {
  const double dx = 1.0 / nx;
  const double dq = cfg.content.storage / nq;
  const double eta = cfg.content.volatility;
  const double denom = eta * eta / (dx * dx) + max_popularity_drift(cfg) / dx +
                       max_storage_drift(cfg) / dq;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.9 / denom;
}

Lattice make_lattice(int nx, int nq, double horizon, const SolverConfig& cfg) {
  const double bound = stability_bound(nx, nq, cfg);
  const int nt = std::isinf(bound) ? 1 : Lattice::steps_for(horizon, bound);
  return Lattice(nx, nq, nt, horizon, cfg.content.storage);
}

void check_stability(const Lattice& lat, const SolverConfig& cfg) {
  const double bound = stability_bound(lat.nx(), lat.nq(), cfg);
  if (lat.dt() > bound * (1.0 + 1e-12)) throw CflViolation(lat.dt(), bound);
}

double optimal_caching_fraction(double backhaul, double size, double overlap,
                                double rate, double x, double dqv,
                                const SolverConfig& cfg) {
  if (!(size > 0.0)) throw std::invalid_argument("content size must be > 0");
  if (backhaul < 0.0) throw std::invalid_argument("backhaul must be >= 0");
  const double denom = rate * std::max(x, cfg.popularity_floor) *
                       std::max(dqv, cfg.denom_floor);
  if (!(denom > 0.0)) return 0.0;
  const double bracket = backhaul - (1.0 + overlap) / denom;
  const double upper = upper_fraction(backhaul, size, cfg.content.storage,
                                      cfg.barrier_margin);
  return std::clamp(std::max(bracket, 0.0) / size, 0.0, upper);
}

double running_cost(double p, double q, double x, double overlap, double rate,
                    const ContentParams& c, double popularity_floor) {
  const double headroom = c.backhaul - c.size * p;
  if (!(headroom > 0.0))
    throw BarrierViolation("download L*p = " + std::to_string(c.size * p) +
                           " reaches backhaul capacity " +
                           std::to_string(c.backhaul));
  const double storage = c.storage_cost * (c.storage - q) / c.storage;
  const double log_headroom = std::log(headroom);
  if (log_headroom == 0.0) return storage;
  return -log_headroom * (1.0 + overlap) /
             (rate * std::max(x, popularity_floor)) +
         storage;
}

double mf_overlap(const Lattice& lat, std::span<const double> density,
                  std::span<const double> policy, const SolverConfig& cfg) {
  if (density.size() != lat.slice_size() || policy.size() != lat.slice_size())
    throw std::invalid_argument("slice size does not match the lattice");
  const auto& c = cfg.content;
  if (std::isinf(c.peers)) return 0.0;
  double s = 0.0;
  for (std::size_t n = 0; n < density.size(); ++n) s += density[n] * policy[n];
  return s * lat.cell_area() / (c.storage * c.peers);
}

std::vector<double> initial_density(const Lattice& lat, Gaussian popularity,
                                    Gaussian storage) {
  auto marginal = [](int cells, double width, Gaussian g) {
    std::vector<double> w(static_cast<std::size_t>(cells), 0.0);
    if (g.sd <= 0.0) {
      // Linear split between the bracketing centres keeps the mean exact.
      const double pos = g.mean / width - 0.5;
      if (pos <= 0.0) {
        w.front() = 1.0;
      } else if (pos >= cells - 1) {
        w.back() = 1.0;
      } else {
        const int lo = static_cast<int>(std::floor(pos));
        const double frac = pos - lo;
        w[static_cast<std::size_t>(lo)] = 1.0 - frac;
        w[static_cast<std::size_t>(lo) + 1] = frac;
      }
    } else {
      // Cell masses from the normal CDF, truncated to the domain.
      auto cdf = [&](double z) {
        return 0.5 * std::erfc(-(z - g.mean) / (g.sd * std::numbers::sqrt2));
      };
      for (int c = 0; c < cells; ++c)
        w[static_cast<std::size_t>(c)] = cdf((c + 1) * width) - cdf(c * width);
    }
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0))
      throw std::invalid_argument("initial density has no mass on the lattice");
    for (double& v : w) v /= total * width;
    return w;
  };
  const auto mx = marginal(lat.nx(), lat.dx(), popularity);
  const auto mq = marginal(lat.nq(), lat.dq(), storage);
  std::vector<double> m(lat.slice_size());
  for (int i = 0; i < lat.nx(); ++i)
    for (int k = 0; k < lat.nq(); ++k)
      m[lat.node(i, k)] = mx[static_cast<std::size_t>(i)] *
                          mq[static_cast<std::size_t>(k)];
  return m;
}

DensitySurface solve_fpk_forward(const Lattice& lat, const PolicyField& policy,
                                 const SolverConfig& cfg,
                                 std::span<const double> m0,
                                 FpkDiagnostics* diag) {
  if (m0.size() != lat.slice_size())
    throw std::invalid_argument("initial density does not match the lattice");
  if (!(policy.lattice() == lat))
    throw std::invalid_argument("policy lattice mismatch");
  check_stability(lat, cfg);

  const auto& c = cfg.content;
  const double diffusion = 0.5 * c.volatility * c.volatility;
  const double cx = lat.dt() / lat.dx();
  const double cq = lat.dt() / lat.dq();
  const double cd = lat.dt() * diffusion / (lat.dx() * lat.dx());

  std::vector<double> drift_x(static_cast<std::size_t>(lat.nx()));
  for (int i = 0; i < lat.nx(); ++i)
    drift_x[static_cast<std::size_t>(i)] =
        c.reversion_rate * (c.mean_popularity - lat.x(i));

  FpkDiagnostics local;
  DensitySurface m(lat);
  std::copy(m0.begin(), m0.end(), m.slice(0).begin());
  for (double v : m0) {
    if (v < 0.0) throw std::invalid_argument("initial density must be >= 0");
  }

  for (int n = 0; n < lat.nt(); ++n) {
    auto cur = m.slice(n);
    auto next = m.slice(n + 1);
    const auto p = policy.slice(n);
    std::copy(cur.begin(), cur.end(), next.begin());

    for (int i = 0; i + 1 < lat.nx(); ++i) {
      const double a0 = drift_x[static_cast<std::size_t>(i)];
      const double a1 = drift_x[static_cast<std::size_t>(i) + 1];
      for (int k = 0; k < lat.nq(); ++k) {
        const double ml = cur[lat.node(i, k)];
        const double mr = cur[lat.node(i + 1, k)];
        const double flux = cx * (std::max(a0, 0.0) * ml + std::min(a1, 0.0) * mr) -
                            cd * (mr - ml);
        next[lat.node(i, k)] -= flux;
        next[lat.node(i + 1, k)] += flux;
      }
    }
    for (int i = 0; i < lat.nx(); ++i) {
      for (int k = 0; k + 1 < lat.nq(); ++k) {
        const std::size_t lo = lat.node(i, k);
        const std::size_t hi = lat.node(i, k + 1);
        const double b0 = c.discard_rate - c.size * p[lo];
        const double b1 = c.discard_rate - c.size * p[hi];
        const double flux =
            cq * (std::max(b0, 0.0) * cur[lo] + std::min(b1, 0.0) * cur[hi]);
        next[lo] -= flux;
        next[hi] += flux;
      }
    }

    double lowest = 0.0;
    for (double v : next) lowest = std::min(lowest, v);
    local.min_density = std::min(local.min_density, lowest);
    if (lowest < -1e-12)
      throw NegativeDensity("density reached " + std::to_string(lowest) +
                            " at step " + std::to_string(n + 1));
    for (double& v : next) v = std::max(v, 0.0);

    const double mass = integrate(lat, next);
    const double err = std::fabs(mass - 1.0);
    local.max_mass_error = std::max(local.max_mass_error, err);
    if (err > cfg.mass_tolerance)
      throw NumericError("density mass drifted by " + std::to_string(err));
    for (double& v : next) v /= mass;
  }
  if (diag) *diag = local;
  return m;
}

HjbSolution solve_hjb_backward(const Lattice& lat, const DensitySurface& m,
                               const SolverConfig& cfg) {
  if (!(m.lattice() == lat)) throw std::invalid_argument("density lattice mismatch");
  check_stability(lat, cfg);

  const auto& c = cfg.content;
  const double diffusion = 0.5 * c.volatility * c.volatility;
  HjbSolution out{ValueSurface(lat, cfg.terminal_value), PolicyField(lat, 0.0),
                  std::vector<double>(lat.slices(), 0.0)};
  if (cfg.terminal_storage_slope != 0.0) {
    auto vt = out.value.slice(lat.nt());
    for (int i = 0; i < lat.nx(); ++i)
      for (int k = 0; k < lat.nq(); ++k)
        vt[lat.node(i, k)] += cfg.terminal_storage_slope * lat.q(k);
  }

  std::vector<NodeSlopes> slopes;
  auto set_policy = [&](int n, std::span<const double> v_next) {
    fill_slopes(lat, cfg, v_next, slopes);
    const SliceControl control(lat, cfg, slopes);
    const double overlap = control.solve(m.slice(n));
    auto p = out.policy.slice(n);
    for (std::size_t node = 0; node < p.size(); ++node)
      p[node] = control.fraction(node, overlap);
    out.overlap[static_cast<std::size_t>(n)] = overlap;
    return overlap;
  };

  set_policy(lat.nt(), out.value.slice(lat.nt()));
  for (int n = lat.nt() - 1; n >= 0; --n) {
    const auto v_next = out.value.slice(n + 1);
    const double overlap = set_policy(n, v_next);
    const auto p = out.policy.slice(n);
    auto v = out.value.slice(n);
    const Stencil s{lat, v_next};
    for (int i = 0; i < lat.nx(); ++i) {
      const double x = lat.x(i);
      const double a = c.reversion_rate * (c.mean_popularity - x);
      for (int k = 0; k < lat.nq(); ++k) {
        const std::size_t node = lat.node(i, k);
        const double pk = p[node];
        const double b = c.discard_rate - c.size * pk;
        const double cost = running_cost(pk, lat.q(k), x, overlap, cfg.rate, c,
                                         cfg.popularity_floor);
        const double adv_q = b > 0.0 ? b * s.fwd_q(i, k) : b * s.bwd_q(i, k);
        const double adv_x = a > 0.0 ? a * s.fwd_x(i, k) : a * s.bwd_x(i, k);
        const double value =
            v_next[node] +
            lat.dt() * (cost + adv_q + adv_x + diffusion * s.second_x(i, k));
        if (!std::isfinite(value))
          throw NonFiniteValue("value became non-finite at t = " +
                               std::to_string(lat.t(n)));
        v[node] = value;
      }
    }
  }
  return out;
}

namespace {

double sup_change(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s = std::max(s, std::fabs(a[n] - b[n]));
  return s;
}

}  // namespace

MfeSolution solve_mfe(const Lattice& lat, const SolverConfig& cfg,
                      std::span<const double> m0) {
  cfg.validate();
  check_stability(lat, cfg);

  PolicyField policy(lat, 0.0);
  std::vector<double> residuals;
  FpkDiagnostics worst;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    FpkDiagnostics diag;
    DensitySurface m = solve_fpk_forward(lat, policy, cfg, m0, &diag);
    worst.max_mass_error = std::max(worst.max_mass_error, diag.max_mass_error);
    worst.min_density = std::min(worst.min_density, diag.min_density);

    HjbSolution hjb = solve_hjb_backward(lat, m, cfg);
    const double change = cfg.damping * sup_change(hjb.policy.data(), policy.data());
    residuals.push_back(change);
    if (change < cfg.tol) {
      // Return a consistent triple: the best response and the density it
      // induces.
      DensitySurface final_m = solve_fpk_forward(lat, hjb.policy, cfg, m0, &diag);
      worst.max_mass_error = std::max(worst.max_mass_error, diag.max_mass_error);
      worst.min_density = std::min(worst.min_density, diag.min_density);
      return MfeSolution{std::move(hjb.value), std::move(final_m),
                         std::move(hjb.policy), std::move(hjb.overlap), it,
                         std::move(residuals), worst};
    }
    auto p = policy.data();
    const auto pn = hjb.policy.data();
    for (std::size_t n = 0; n < p.size(); ++n)
      p[n] = cfg.damping * pn[n] + (1.0 - cfg.damping) * p[n];
  }
  throw NonConvergence(cfg.max_iters, std::move(residuals));
}

double expected_cost(const Lattice& lat, const ValueSurface& v,
                     std::span<const double> m0) {
  const auto v0 = v.slice(0);
  double s = 0.0;
  for (std::size_t n = 0; n < v0.size(); ++n) s += v0[n] * m0[n];
  return s * lat.cell_area();
}

double hjb_residual(const Lattice& lat, const ValueSurface& v,
                    const PolicyField& p, std::span<const double> overlap,
                    const SolverConfig& cfg) {
  const auto& c = cfg.content;
  const double diffusion = 0.5 * c.volatility * c.volatility;
  std::vector<NodeSlopes> slopes;
  double worst = 0.0;
  for (int n = 0; n < lat.nt(); ++n) {
    const auto v_next = v.slice(n + 1);
    const auto v_now = v.slice(n);
    const auto pn = p.slice(n);
    const double ov = overlap[static_cast<std::size_t>(n)];
    const Stencil s{lat, v_next};
    fill_slopes(lat, cfg, v_next, slopes);
    for (int i = 0; i < lat.nx(); ++i) {
      const double x = lat.x(i);
      const double a = c.reversion_rate * (c.mean_popularity - x);
      for (int k = 0; k < lat.nq(); ++k) {
        const std::size_t node = lat.node(i, k);
        const NodeSlopes& sl = slopes[node];
        auto hamiltonian = [&](double pk) {
          const double b = c.discard_rate - c.size * pk;
          return running_cost(pk, lat.q(k), x, ov, cfg.rate, c, cfg.popularity_floor) +
                 (b > 0.0 ? b * sl.forward : b * sl.backward);
        };
        // The stored p must attain the infimum and v must satisfy the scheme.
        const double h_stored = hamiltonian(pn[node]);
        const double h_best = std::min(h_stored, hamiltonian(node_control(sl, ov, cfg)));
        const double step = (v_next[node] - v_now[node]) / lat.dt() +
                            (a > 0.0 ? a * s.fwd_x(i, k) : a * s.bwd_x(i, k)) +
                            diffusion * s.second_x(i, k);
        const double r = std::max(std::fabs(step + h_stored), std::fabs(step + h_best));
        worst = std::max(worst, r);
      }
    }
  }
  return worst;
}

double hjb_residual_centred(const Lattice& lat, const ValueSurface& v,
                            const PolicyField& p, std::span<const double> overlap,
                            const SolverConfig& cfg) {
  const auto& c = cfg.content;
  const double diffusion = 0.5 * c.volatility * c.volatility;
  double worst = 0.0;
  for (int n = 0; n < lat.nt(); ++n) {
    const auto v_next = v.slice(n + 1);
    const auto v_now = v.slice(n);
    const auto pn = p.slice(n);
    const Stencil s{lat, v_next};
    for (int i = 2; i + 2 < lat.nx(); ++i) {
      const double x = lat.x(i);
      const double a = c.reversion_rate * (c.mean_popularity - x);
      for (int k = 2; k + 2 < lat.nq(); ++k) {
        const std::size_t node = lat.node(i, k);
        const double b = c.discard_rate - c.size * pn[node];
        const double r =
            (v_next[node] - v_now[node]) / lat.dt() +
            running_cost(pn[node], lat.q(k), x, overlap[static_cast<std::size_t>(n)],
                         cfg.rate, c, cfg.popularity_floor) +
            b * s.ctr_q(i, k) + a * s.ctr_x(i, k) + diffusion * s.second_x(i, k);
        worst = std::max(worst, std::fabs(r));
      }
    }
  }
  return worst;
}

}  // namespace mfgcache::mfg
