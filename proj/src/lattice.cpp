#include "mfgcache/lattice.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfgcache::mfg {

Lattice::Lattice(int nx, int nq, int nt, double horizon, double storage)
    : nx_(nx), nq_(nq), nt_(nt), horizon_(horizon), storage_(storage) {
  if (nx < 2 || nq < 2) throw std::invalid_argument("lattice needs nx, nq >= 2");
  if (nt < 1) throw std::invalid_argument("lattice needs nt >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(storage > 0.0)) throw std::invalid_argument("storage must be > 0");
  dx_ = 1.0 / nx;
  dq_ = storage / nq;
  dt_ = horizon / nt;
}

int Lattice::steps_for(double horizon, double max_dt) {
  if (!(max_dt > 0.0)) throw std::invalid_argument("max_dt must be > 0");
  const double n = std::ceil(horizon / max_dt - 1e-12);
  return std::max(1, static_cast<int>(n));
}

double integrate(const Lattice& lat, std::span<const double> slice) {
  return std::accumulate(slice.begin(), slice.end(), 0.0) * lat.cell_area();
}

}  // namespace mfgcache::mfg
