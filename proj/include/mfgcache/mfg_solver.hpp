#pragma once

#include <span>
#include <vector>

#include "mfgcache/lattice.hpp"

namespace mfgcache::mfg {

// Per-content model parameters.
struct ContentParams {
  double size = 1.0;             // L_j
  double discard_rate = 0.1;     // e_j
  double backhaul = 1.0;         // B_j (constant in time)
  double storage = 1.0;          // C
  double storage_cost = 1.0;     // gamma; negative values credit occupancy
  double peers = 20.0;           // N_r(j); +inf removes the overlap coupling
  double reversion_rate = 1.0;   // r
  double volatility = 0.1;       // eta
  double mean_popularity = 0.5;  // mu_j
};

struct SolverConfig {
  double damping = 0.5;
  double tol = 1e-4;
  int max_iters = 200;
  double terminal_value = 0.0;
  double terminal_storage_slope = 0.0;  // v(T, x, Q) = terminal_value + slope * Q
  double denom_floor = 1e-6;        // floor on dQ v in the closed-form control
  double barrier_margin = 1e-6;     // delta_B as a fraction of B
  double popularity_floor = 1e-3;   // x_min in cost denominators
  double mass_tolerance = 1e-3;
  ContentParams content;
  double rate = 1.0;                // average rate R (nats/s/Hz)

  void validate() const;

  // Upper clamp on the caching fraction: min(1, C/L, (B - delta_B)/L).
  double max_fraction() const;
};

// Terminal slope under which holding the storage level (L p = e) is the
// optimal control at t = T for popularity x, with every peer holding too.
double holding_slope(const SolverConfig& cfg, double popularity);

// Largest dt satisfying
//   dt <= 0.9 / (eta^2/dx^2 + max|r(mu-x)|/dx + max|e - L p|/dq).
double stability_bound(int nx, int nq, const SolverConfig& cfg);

// Lattice with nt chosen from the stability bound.
Lattice make_lattice(int nx, int nq, double horizon, const SolverConfig& cfg);

// Throws CflViolation when lat.dt() exceeds the bound.
void check_stability(const Lattice& lat, const SolverConfig& cfg);

// Closed-form minimiser of J(p) + (e - L p) dQv over the feasible fractions:
//   p* = clamp((1/L)[B - (1 + I)/(R x max(dQv, eps))]^+, 0, max_fraction).
double optimal_caching_fraction(double backhaul, double size, double overlap,
                                double rate, double x, double dqv,
                                const SolverConfig& cfg);

// Instantaneous cost -log(B - L p)(1 + I)/(R x) + gamma (C - Q)/C with x
// floored at the popularity floor. Throws BarrierViolation when L p >= B.
double running_cost(double p, double q, double x, double overlap, double rate,
                    const ContentParams& c, double popularity_floor);

// Mean-field overlap: integral of m p / (C N_r) over one slice.
double mf_overlap(const Lattice& lat, std::span<const double> density,
                  std::span<const double> policy, const SolverConfig& cfg);

struct Gaussian {
  double mean = 0.5;
  double sd = 0.05;  // sd == 0 places the mass on the two bracketing cells
};

// Product of two truncated normals on the lattice, normalised to unit mass.
std::vector<double> initial_density(const Lattice& lat, Gaussian popularity,
                                    Gaussian storage);

struct FpkDiagnostics {
  double max_mass_error = 0.0;   // |mass - 1| before renormalisation, worst slice
  double min_density = 0.0;      // before clipping round-off negatives
};

// Conservative donor-cell upwinding for the x and Q drifts, central
// differences for the x diffusion, zero flux through every boundary.
DensitySurface solve_fpk_forward(const Lattice& lat, const PolicyField& policy,
                                 const SolverConfig& cfg,
                                 std::span<const double> m0,
                                 FpkDiagnostics* diag = nullptr);

struct HjbSolution {
  ValueSurface value;
  PolicyField policy;
  std::vector<double> overlap;  // I(t_n), consistent with the emitted policy
};

// Backward sweep from v(T) = terminal_value + terminal_storage_slope * Q. At each slice the control comes
// from the closed form, with the overlap solved as the scalar fixed point
// I = mf_overlap(m_n, p*(I)).
HjbSolution solve_hjb_backward(const Lattice& lat, const DensitySurface& m,
                               const SolverConfig& cfg);

struct MfeSolution {
  ValueSurface value;
  DensitySurface density;
  PolicyField policy;
  std::vector<double> overlap;
  int iterations = 0;
  std::vector<double> residuals;  // sup-norm policy change per iteration
  FpkDiagnostics fpk;
};

// Damped Picard iteration from p = 0. Throws NonConvergence (with the
// residual history) after cfg.max_iters.
MfeSolution solve_mfe(const Lattice& lat, const SolverConfig& cfg,
                      std::span<const double> m0);

// Expected cost-to-go at t = 0 under the initial density.
double expected_cost(const Lattice& lat, const ValueSurface& v,
                     std::span<const double> m0);

// L-inf residual of the discrete HJB on every node: the upwind scheme with
// the infimum over p re-evaluated exactly (the upwind Hamiltonian is convex
// on each side of e - L p = 0), against the stored (v, p) and overlap.
// Nonzero when p is suboptimal for the scheme or v does not solve it.
double hjb_residual(const Lattice& lat, const ValueSurface& v,
                    const PolicyField& p, std::span<const double> overlap,
                    const SolverConfig& cfg);

// Same check with centred differences and the stored p on nodes whose
// stencil avoids the boundary cells. Large across kinks of v (state
// constraints at Q = 0 and Q = C); diagnostic only.
double hjb_residual_centred(const Lattice& lat, const ValueSurface& v,
                            const PolicyField& p, std::span<const double> overlap,
                            const SolverConfig& cfg);

}  // namespace mfgcache::mfg
