#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nlwlab/grid.hpp"

namespace nlwlab {

using Complex = std::complex<double>;

/// Real samples on the grid points, row-major with axis coordinate
/// x_j = -L/2 + j dx.
class RealField {
 public:
  explicit RealField(Grid grid);
  RealField(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  double max_abs() const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients f^(k) = L^{d/2} n^{-d} sum_x f(x) exp(-2 pi i x . xi_k),
/// so that sum_x |f|^2 dx^d = sum_k |f^(k)|^2.
class SpectralField {
 public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, std::vector<Complex> coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double factor) noexcept;
  /// this += factor * other
  SpectralField& add_scaled(double factor, const SpectralField& other);

  /// sum_k |f^(k)|^2, which equals the squared L^2 norm.
  double squared_l2() const noexcept;
  /// max_k |c(-k) - conj(c(k))|.
  double hermitian_defect() const noexcept;
  double max_abs() const noexcept;
  /// Forces the Nyquist rows to zero.
  void zero_nyquist() noexcept;

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double factor, SpectralField a);

/// A state (u, d_t u) in spectral form.
struct FieldPair {
  SpectralField pos;
  SpectralField vel;

  explicit FieldPair(const Grid& grid) : pos(grid), vel(grid) {}
  FieldPair(SpectralField p, SpectralField v);

  const Grid& grid() const noexcept { return pos.grid(); }

  FieldPair& operator+=(const FieldPair& other);
  FieldPair& operator-=(const FieldPair& other);
  FieldPair& operator*=(double factor) noexcept;
};

FieldPair operator+(FieldPair a, const FieldPair& b);
FieldPair operator-(FieldPair a, const FieldPair& b);
FieldPair operator*(double factor, FieldPair a);

void require_same_grid(const Grid& a, const Grid& b, const char* context);

}  // namespace nlwlab
