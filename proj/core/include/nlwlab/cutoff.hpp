#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "nlwlab/grid.hpp"

namespace nlwlab {

enum class CutoffKind { smooth, sharp };

std::string_view to_string(CutoffKind kind) noexcept;
CutoffKind parse_cutoff_kind(std::string_view name);

/// One-dimensional C^infinity plateau: 1 on [-1/2, 1/2], 0 outside (-1, 1),
/// and h(1-t) / (h(1-t) + h(t)) with h(t) = exp(-1/t), t = 2(|x| - 1/2), in between.
double plateau_bump(double x) noexcept;

/// plateau_bump(x) / sum_m plateau_bump(x - m); sums to one over integer shifts.
double normalized_bump(double x) noexcept;

/// Integer cube center m with xi in Q_m for the sharp family. Ties on cube
/// faces are resolved away from zero so that Q_{-m} = -Q_m on the lattice.
int sharp_cube_of(double xi) noexcept;

/// The family psi(xi - m), m in Z^d, restricted to the cubes that touch the
/// grid's frequency lattice. Both kinds are tensor products of a 1-d family,
/// stored per axis index as at most two (cube coordinate, weight) entries.
class CutoffFamily {
 public:
  struct AxisWeight {
    int cube;
    double weight;
  };

  CutoffFamily(CutoffKind kind, const Grid& grid);

  CutoffKind kind() const noexcept { return kind_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Cube centers satisfy |m_i| <= radius().
  int radius() const noexcept { return radius_; }
  std::size_t cube_count() const noexcept { return cube_count_; }
  std::size_t cube_id(const LatticeIndex& center) const noexcept;
  LatticeIndex cube_center(std::size_t id) const noexcept;
  bool in_range(const LatticeIndex& center) const noexcept;
  std::size_t zero_cube() const noexcept;

  /// Nonzero 1-d weights for an axis index j (frequency of grid.signed_frequency(j)).
  const std::vector<AxisWeight>& axis_weights(int j) const noexcept { return axis_[j]; }

  /// psi(xi_k - m) at a flat spectral index.
  double value(const LatticeIndex& center, std::size_t flat) const noexcept;

 private:
  CutoffKind kind_;
  Grid grid_;
  int radius_ = 0;
  std::size_t cube_count_ = 0;
  std::vector<std::vector<AxisWeight>> axis_;
};

}  // namespace nlwlab
