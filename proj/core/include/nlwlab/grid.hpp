#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nlwlab {

inline constexpr int kMaxDim = 5;

using LatticeIndex = std::array<int, kMaxDim>;

namespace detail {
struct GridTables;
}

/// Periodic box [-L/2, L/2)^d sampled by n points per axis, together with
/// its frequency lattice xi_k = k / L, k in {-n/2, ..., n/2 - 1}^d.
///
/// Spectral arrays are stored row-major with every axis in FFT natural order
/// (index j holds frequency j for j < n/2 and j - n otherwise). Rows where any
/// axis sits on the Nyquist index n/2 are kept at zero on every field.
class Grid {
 public:
  Grid(int dim, int points, double length);

  int dim() const noexcept { return dim_; }
  int points() const noexcept { return points_; }
  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return length_ / points_; }
  double cell_volume() const noexcept;

  /// Axis index j in [0, n) -> signed integer frequency k.
  int signed_frequency(int j) const noexcept { return j < points_ / 2 ? j : j - points_; }
  /// Signed integer frequency k -> axis index j.
  int axis_index(int k) const noexcept { return k >= 0 ? k : k + points_; }

  LatticeIndex unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const LatticeIndex& axis_indices) const noexcept;
  /// Signed frequency vector of a flat index (entries beyond dim() are 0).
  LatticeIndex frequency_index(std::size_t flat) const noexcept;
  /// Flat index of the mode -k.
  std::size_t negated(std::size_t flat) const noexcept;

  bool is_nyquist(std::size_t flat) const noexcept;
  /// max_i |k_i| of the mode.
  int max_abs_index(std::size_t flat) const noexcept;
  double frequency_norm(std::size_t flat) const noexcept;

  /// Distinct values of |xi| on the lattice and the per-mode id into them.
  std::span<const double> radial_values() const noexcept;
  std::uint32_t radial_id(std::size_t flat) const noexcept;

  /// Physical coordinate of grid point j along an axis.
  double coordinate(int j) const noexcept { return -0.5 * length_ + j * spacing(); }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.points_ == b.points_ && a.length_ == b.length_;
  }

 private:
  int dim_;
  int points_;
  double length_;
  std::size_t size_;
  std::shared_ptr<const detail::GridTables> tables_;
};

}  // namespace nlwlab
