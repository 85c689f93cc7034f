#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfgcache::mfg {

// Cell-centred discretisation of (t, x, Q) on [0,T] x [0,1] x [0,C].
// Slices are stored t-major; within a slice the Q index runs fastest.
class Lattice {
 public:
  Lattice(int nx, int nq, int nt, double horizon, double storage);

  int nx() const noexcept { return nx_; }
  int nq() const noexcept { return nq_; }
  int nt() const noexcept { return nt_; }
  double dx() const noexcept { return dx_; }
  double dq() const noexcept { return dq_; }
  double dt() const noexcept { return dt_; }
  double horizon() const noexcept { return horizon_; }
  double storage() const noexcept { return storage_; }

  double x(int i) const noexcept { return (i + 0.5) * dx_; }
  double q(int k) const noexcept { return (k + 0.5) * dq_; }
  double t(int n) const noexcept { return n * dt_; }
  double cell_area() const noexcept { return dx_ * dq_; }

  std::size_t slice_size() const noexcept {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(nq_);
  }
  std::size_t slices() const noexcept { return static_cast<std::size_t>(nt_) + 1; }
  std::size_t node(int i, int k) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nq_) +
           static_cast<std::size_t>(k);
  }

  // Smallest nt whose step satisfies dt <= max_dt.
  static int steps_for(double horizon, double max_dt);

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  int nx_;
  int nq_;
  int nt_;
  double horizon_;
  double storage_;
  double dx_;
  double dq_;
  double dt_;
};

// Values on every lattice node and time slice.
class Grid3 {
 public:
  explicit Grid3(const Lattice& lat, double fill = 0.0)
      : lat_(lat), data_(lat.slices() * lat.slice_size(), fill) {}

  const Lattice& lattice() const noexcept { return lat_; }

  std::span<double> slice(int n) {
    return {data_.data() + static_cast<std::size_t>(n) * lat_.slice_size(),
            lat_.slice_size()};
  }
  std::span<const double> slice(int n) const {
    return {data_.data() + static_cast<std::size_t>(n) * lat_.slice_size(),
            lat_.slice_size()};
  }
  double& operator()(int n, int i, int k) {
    return data_[static_cast<std::size_t>(n) * lat_.slice_size() + lat_.node(i, k)];
  }
  double operator()(int n, int i, int k) const {
    return data_[static_cast<std::size_t>(n) * lat_.slice_size() + lat_.node(i, k)];
  }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

 private:
  Lattice lat_;
  std::vector<double> data_;
};

// Distinct wrappers so a density cannot be passed where a policy is expected.
template <class Tag>
struct Field : Grid3 {
  using Grid3::Grid3;
  explicit Field(Grid3 g) : Grid3(std::move(g)) {}
};

using ValueSurface = Field<struct ValueTag>;
using DensitySurface = Field<struct DensityTag>;
using PolicyField = Field<struct PolicyTag>;

// Sum of a slice times the cell area.
double integrate(const Lattice& lat, std::span<const double> slice);

}  // namespace mfgcache::mfg
