#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/field_io.hpp"
#include "nlwlab/norms.hpp"
#include "test_support.hpp"

using namespace nlwlab;
using namespace nlwlab::testing;

TEST_CASE("grid rejects invalid shapes") {
  CHECK_THROWS_AS(Grid(1, 8, 1.0), Error);
  CHECK_THROWS_AS(Grid(6, 8, 1.0), Error);
  CHECK_THROWS_AS(Grid(2, 7, 1.0), Error);
  CHECK_THROWS_AS(Grid(2, 2, 1.0), Error);
  CHECK_THROWS_AS(Grid(2, 8, 0.0), Error);
  CHECK_THROWS_AS(Grid(2, 8, -1.0), Error);
  CHECK_THROWS_AS(Grid(5, 1 << 14, 1.0), Error);  // n^d overflows the point budget
  CHECK_NOTHROW(Grid(5, 12, 8.0));
}

TEST_CASE("frequency lattice is symmetric away from the Nyquist row") {
  const Grid g(3, 8, 8.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t m = g.negated(i);
    CHECK(g.negated(m) == i);
    if (g.is_nyquist(i)) continue;
    const LatticeIndex k = g.frequency_index(i), km = g.frequency_index(m);
    for (int a = 0; a < 3; ++a) CHECK(km[a] == -k[a]);
    CHECK(g.frequency_norm(i) == doctest::Approx(g.frequency_norm(m)));
  }
}

TEST_CASE("constant field has a single coefficient") {
  const Grid g(2, 16, 8.0);
  RealField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 3.0;
  const SpectralField c = fft_forward(f);
  // f^(0) = L^{d/2} n^{-d} sum f = c L^{d/2}.
  CHECK(std::abs(c[0] - Complex(3.0 * 8.0, 0.0)) < 1e-12);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-12);
}

TEST_CASE("cosine along the first axis has two coefficients at +-e1") {
  const Grid g(2, 16, 8.0);
  const SpectralField c = fft_forward(cosine_mode(g, {1, 0}));
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) > 1e-12) {
      ++nonzero;
      const LatticeIndex k = g.frequency_index(i);
      CHECK(std::abs(k[0]) == 1);
      CHECK(k[1] == 0);
    }
  }
  CHECK(nonzero == 2);
}

TEST_CASE("Plancherel and round trip on random fields") {
  for (int dim : {2, 3, 4}) {
    const Grid g(dim, dim == 4 ? 8 : 16, 8.0);
    for (std::uint64_t seed = 0; seed < (dim == 2 ? 100u : 10u); ++seed) {
      const RealField f = noise_field(g, seed);
      const SpectralField c = fft_forward(f);
      const double l2 = lebesgue_norm(f, 2.0);
      // White noise has Nyquist content; Plancherel is checked before zeroing.
      double direct = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) direct += f[i] * f[i] * g.cell_volume();
      CHECK(rel_diff(std::sqrt(direct), l2) < 1e-12);
      SpectralField band = c;
      band.zero_nyquist();
      const RealField back = fft_inverse(band);
      CHECK(rel_diff(lebesgue_norm(back, 2.0), sobolev_norm(band, 0.0, false)) < 1e-12);
      const SpectralField again = fft_forward(back);
      CHECK(l2_distance(again, band) <= 1e-12 * std::sqrt(band.squared_l2()));
      CHECK(imaginary_residue(band) <= 1e-11 * back.max_abs());
    }
  }
}

TEST_CASE("Lebesgue norms of simple fields") {
  const Grid g(3, 8, 4.0);
  RealField one(g);
  for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
  for (double p : {1.0, 2.0, 3.0, 6.0}) CHECK(lebesgue_norm(one, p) == doctest::Approx(std::pow(4.0, 3.0 / p)).epsilon(1e-13));
  CHECK(lebesgue_norm(one, kInf) == 1.0);
  const RealField c = cosine_mode(g, {0, 2, 0});
  CHECK(lebesgue_norm(c, 2.0) == doctest::Approx(std::pow(4.0, 1.5) / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("Sobolev norms") {
  const Grid g(2, 16, 8.0);
  const SpectralField f = smooth_field(g, 3);
  CHECK(rel_diff(sobolev_norm(f, 0.0, false), lebesgue_norm(fft_inverse(f), 2.0)) < 1e-12);
  double prev = 0.0;
  for (double s = 0.0; s <= 1.0001; s += 0.25) {
    const double v = sobolev_norm(f, s, false);
    CHECK(v >= prev);
    prev = v;
  }
  // Single mode, homogeneous s = 1: (2 pi |k| / L) |f^(k)|.
  SpectralField single(g);
  const std::size_t k = g.flatten({3, 0});
  single[k] = Complex(0.5, 0.25);
  single[g.negated(k)] = std::conj(single[k]);
  const double expected = 2.0 * M_PI * 3.0 / 8.0 * std::abs(single[k]) * std::sqrt(2.0);
  CHECK(sobolev_norm(single, 1.0, true) == doctest::Approx(expected).epsilon(1e-13));
  // Negative homogeneous norms need mean zero.
  SpectralField mean(g);
  mean[0] = 1.0;
  CHECK_THROWS_AS(sobolev_norm(mean, -1.0, true), Error);
}

TEST_CASE("apply_symbol") {
  const Grid g(2, 32, 8.0);
  const SpectralField f = smooth_field(g, 5, 0.6);
  const SpectralField same = apply_symbol(f, [](std::span<const double>) { return 1.0; });
  CHECK(l2_distance(same, f) == 0.0);
  const SpectralField mean = apply_symbol(f, [](std::span<const double> xi) {
    return (xi[0] == 0.0 && xi[1] == 0.0) ? 1.0 : 0.0;
  });
  CHECK(mean[0] == f[0]);
  CHECK(mean.squared_l2() == doctest::Approx(std::norm(f[0])));
  CHECK_THROWS_AS(apply_radial_symbol(f, [](double r) { return 1.0 / r; }), Error);

  // (2 pi |xi|)^2 against second differences: error O(dx^2).
  double prev_err = 0.0;
  for (int n : {32, 64}) {
    const Grid gn(2, n, 8.0);
    RealField u(gn);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const LatticeIndex j = gn.unflatten(i);
      const double x = gn.coordinate(j[0]), y = gn.coordinate(j[1]);
      u[i] = std::exp(-(x * x + y * y));
    }
    const RealField lap =
        fft_inverse(apply_radial_symbol(fft_forward(u), [](double r) { return 4.0 * M_PI * M_PI * r * r; }));
    const double h = gn.spacing();
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const LatticeIndex j = gn.unflatten(i);
      auto at = [&](int a, int b) { return u[gn.flatten({(a + n) % n, (b + n) % n})]; };
      const double fd = -(at(j[0] + 1, j[1]) + at(j[0] - 1, j[1]) + at(j[0], j[1] + 1) + at(j[0], j[1] - 1) -
                          4.0 * u[i]) / (h * h);
      err = std::max(err, std::abs(fd - lap[i]));
    }
    if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.1));
    prev_err = err;
  }
}

TEST_CASE("rescale") {
  const Grid g(3, 16, 8.0);
  FieldPair p = smooth_pair(g, 11);
  p.vel[0] = 0.0;  // negative homogeneous orders need mean zero
  const FieldPair id = rescale(p, 1.0);
  CHECK(pair_l2_distance(id, p) == 0.0);
  CHECK_THROWS_AS(rescale(p, 3.0), Error);
  // Homogeneous H^s x H^{s-1} scales exactly like lambda^{s-1}.
  const FieldPair r = rescale(p, 2.0);
  CHECK(r.grid().length() == 4.0);
  CHECK(rel_diff(pair_sobolev_norm(r, 1.0, true), pair_sobolev_norm(p, 1.0, true)) < 1e-12);
  CHECK(rel_diff(pair_sobolev_norm(r, 0.5, true), std::pow(2.0, -0.5) * pair_sobolev_norm(p, 0.5, true)) < 1e-12);
  // Inhomogeneous norms on a high-frequency band-limited field: within 2%.
  SpectralField hi(g);
  const SpectralField noise = fft_forward(noise_field(g, 12));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.is_nyquist(i) && g.max_abs_index(i) >= 5) hi[i] = noise[i];
  }
  const FieldPair band(hi, hi);
  const double ratio = pair_sobolev_norm(rescale(band, 2.0), 0.5, false) / pair_sobolev_norm(band, 0.5, false);
  CHECK(ratio / std::pow(2.0, -0.5) >= 0.98);
  CHECK(ratio / std::pow(2.0, -0.5) <= 1.02);
}

TEST_CASE("NLWP round trip and layout") {
  const Grid g(2, 8, 6.0);
  const FieldPair p = smooth_pair(g, 21);
  std::stringstream buf;
  write_field_pair(buf, p);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "NLWP");
  CHECK(bytes.size() == 4 + 4 * 3 + 8 + 2 * 64 * 16);
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version, little-endian
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);  // d
  CHECK(static_cast<unsigned char>(bytes[12]) == 8);  // n
  const FieldPair back = read_field_pair(buf);
  CHECK(back.grid() == g);
  CHECK(pair_l2_distance(back, p) == 0.0);

  std::stringstream bad("NLWX");
  CHECK_THROWS_AS(read_field_pair(bad), Error);
  std::stringstream truncated(bytes.substr(0, 100));
  CHECK_THROWS_AS(read_field_pair(truncated), Error);
}
