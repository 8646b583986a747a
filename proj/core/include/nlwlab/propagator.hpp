#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nlwlab/field.hpp"

namespace nlwlab {

/// Radial tables of the free wave flow for one (grid, t):
/// cos(t w), sin(t w)/w (t at w = 0) and w sin(t w), with w = 2 pi |xi|.
/// Immutable; safe to share between threads.
class PropagatorCache {
 public:
  PropagatorCache(const Grid& grid, double t);

  const Grid& grid() const noexcept { return grid_; }
  double time() const noexcept { return t_; }

  /// Per-radius values (indexed by Grid::radial_id).
  std::span<const double> cos_table() const noexcept { return cos_; }
  std::span<const double> sinc_table() const noexcept { return sinc_; }
  std::span<const double> wsin_table() const noexcept { return wsin_; }

  double cos_at(std::size_t flat) const noexcept { return cos_[grid_.radial_id(flat)]; }
  double sinc_at(std::size_t flat) const noexcept { return sinc_[grid_.radial_id(flat)]; }
  double wsin_at(std::size_t flat) const noexcept { return wsin_[grid_.radial_id(flat)]; }

  /// Shared cache keyed by grid and the exact bits of t.
  static std::shared_ptr<const PropagatorCache> get(const Grid& grid, double t);

 private:
  Grid grid_;
  double t_;
  std::vector<double> cos_, sinc_, wsin_;
};

/// S(t)(u0, u1): pos = cos(t|D|)u0 + sin(t|D|)/|D| u1, vel = -|D|sin(t|D|)u0 + cos(t|D|)u1.
FieldPair linear_evolve(const FieldPair& pair, double t);
void linear_evolve_inplace(FieldPair& pair, const PropagatorCache& cache);

/// -int_{t0}^{t_end} S(t_end - t') (0, F(t')) dt' by the composite trapezoid
/// rule on a uniform grid; the kernel is applied exactly per mode.
FieldPair duhamel_integral(std::span<const SpectralField> forcing, std::span<const double> times);

/// 1/2 ||d_t u||^2 + 1/2 ||u||^2_{dot H^1}.
double linear_energy(const FieldPair& pair);

}  // namespace nlwlab
