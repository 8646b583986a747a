#pragma once

#include <cmath>
#include <cstdint>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/field.hpp"
#include "nlwlab/norms.hpp"

namespace nlwlab::testing {

/// Real white noise with keyed normal samples.
inline RealField noise_field(const Grid& grid, std::uint64_t seed) {
  RealField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = keyed_normal({seed, 0}, i, 0, 0);
  return f;
}

/// Smooth random real field: noise filtered by exp(-(|xi| / width)^2), Nyquist zero.
inline SpectralField smooth_field(const Grid& grid, std::uint64_t seed, double width = 1.0) {
  SpectralField f = fft_forward(noise_field(grid, seed));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = grid.frequency_norm(i) / width;
    f[i] *= std::exp(-r * r);
  }
  f.zero_nyquist();
  return f;
}

/// Random field band-limited to max_i |k_i| <= kmax.
inline SpectralField band_limited_field(const Grid& grid, std::uint64_t seed, int kmax) {
  SpectralField f = fft_forward(noise_field(grid, seed));
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (grid.max_abs_index(i) > kmax) f[i] = 0.0;
  }
  f.zero_nyquist();
  return f;
}

inline FieldPair smooth_pair(const Grid& grid, std::uint64_t seed, double width = 1.0) {
  return {smooth_field(grid, seed, width), smooth_field(grid, seed + 1000003, width)};
}

/// Single real cosine cos(2 pi k . x / L) sampled on the grid.
inline RealField cosine_mode(const Grid& grid, const LatticeIndex& k) {
  RealField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LatticeIndex j = grid.unflatten(i);
    double phase = 0.0;
    for (int a = 0; a < grid.dim(); ++a) phase += k[a] * grid.coordinate(j[a]);
    f[i] = std::cos(2.0 * M_PI * phase / grid.length());
  }
  return f;
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// sqrt(sum |a - b|^2) over the coefficients, i.e. the L^2 distance.
inline double l2_distance(const SpectralField& a, const SpectralField& b) { return std::sqrt((a - b).squared_l2()); }

inline double pair_l2_distance(const FieldPair& a, const FieldPair& b) {
  return std::sqrt((a.pos - b.pos).squared_l2() + (a.vel - b.vel).squared_l2());
}

}  // namespace nlwlab::testing
