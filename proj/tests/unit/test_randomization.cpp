#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"
#include "nlwlab/randomize.hpp"
#include "nlwlab/statistics.hpp"
#include "test_support.hpp"

using namespace nlwlab;
using namespace nlwlab::testing;

namespace {

double cube_sum(const CutoffFamily& c, std::size_t flat) {
  double s = 0.0;
  for (std::size_t id = 0; id < c.cube_count(); ++id) s += c.value(c.cube_center(id), flat);
  return s;
}

RandomizedDraw all_ones(const CutoffFamily& c) {
  return RandomizedDraw::from_coefficients(c, std::vector<Complex>(c.cube_count(), 1.0),
                                           std::vector<Complex>(c.cube_count(), 1.0));
}

double bump_derivative_gap(double x) {
  const double h = 1e-6;
  return std::abs(plateau_bump(x + h) - plateau_bump(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("plateau bump shape") {
  CHECK(plateau_bump(0.0) == 1.0);
  CHECK(plateau_bump(0.5) == 1.0);
  CHECK(plateau_bump(-0.5) == 1.0);
  CHECK(plateau_bump(1.0) == 0.0);
  CHECK(plateau_bump(-1.2) == 0.0);
  for (double x = -1.5; x <= 1.5; x += 0.01) {
    CHECK(plateau_bump(x) >= 0.0);
    CHECK(plateau_bump(x) <= 1.0);
    CHECK(plateau_bump(x) == plateau_bump(-x));
    double total = 0.0;
    for (int m = -3; m <= 3; ++m) total += normalized_bump(x - m);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Frozen values of the transition (exp(-1/t) glue).
  CHECK(plateau_bump(0.75) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(plateau_bump(0.6) == doctest::Approx(std::exp(-1.0 / 0.8) / (std::exp(-1.0 / 0.8) + std::exp(-1.0 / 0.2))).epsilon(1e-14));
  // Smooth glue: derivative vanishes at the plateau edges.
  CHECK(bump_derivative_gap(0.5) < 1e-6);
  CHECK(bump_derivative_gap(1.0) < 1e-6);
}

TEST_CASE("sharp cube assignment is odd") {
  for (double xi = -3.0; xi <= 3.0; xi += 0.125) CHECK(sharp_cube_of(-xi) == -sharp_cube_of(xi));
  CHECK(sharp_cube_of(0.5) == 1);
  CHECK(sharp_cube_of(-0.5) == -1);
  CHECK(sharp_cube_of(0.49) == 0);
}

TEST_CASE("partition of unity, evenness and disjointness") {
  for (CutoffKind kind : {CutoffKind::smooth, CutoffKind::sharp}) {
    for (const Grid& g : {Grid(2, 32, 8.0), Grid(3, 16, 4.0), Grid(4, 8, 6.0)}) {
      const CutoffFamily c(kind, g);
      // 200 keyed random lattice frequencies (all of them for small grids).
      const std::size_t picks = std::min<std::size_t>(200, g.size());
      for (std::size_t t = 0; t < picks; ++t) {
        const std::size_t i = picks == g.size() ? t : keyed_bits({77, t}, {}) % g.size();
        if (g.is_nyquist(i)) continue;
        CHECK(std::abs(cube_sum(c, i) - 1.0) <= 1e-12);
        const std::size_t m = g.negated(i);
        for (std::size_t id = 0; id < c.cube_count(); ++id) {
          LatticeIndex n = c.cube_center(id), neg{};
          for (int a = 0; a < g.dim(); ++a) neg[a] = -n[a];
          CHECK(c.value(n, i) == c.value(neg, m));  // psi(-xi + n) = psi(xi - n)
          CHECK(c.value(n, i) >= 0.0);
          CHECK(c.value(n, i) <= 1.0);
        }
        if (kind == CutoffKind::sharp) {
          int hits = 0;
          for (std::size_t id = 0; id < c.cube_count(); ++id) hits += c.value(c.cube_center(id), i) != 0.0;
          CHECK(hits == 1);
        }
      }
    }
  }
  const Grid g(2, 32, 8.0);
  const CutoffFamily smooth(CutoffKind::smooth, g);
  // psi(0) = 1 at a cube center frequency (xi = m exactly at k = m L).
  CHECK(smooth.value({1, 0}, g.flatten({g.axis_index(8), 0})) == 1.0);
  CHECK(smooth.value({0, 0}, g.flatten({g.axis_index(8), 0})) == 0.0);
}

TEST_CASE("index set partition") {
  CHECK(classify_index({0, 0, 0}, 3) == IndexClass::zero);
  CHECK(classify_index({1, 0, 0}, 3) == IndexClass::positive);
  CHECK(classify_index({5, -1, 0}, 3) == IndexClass::negative);
  CHECK(classify_index({-5, 0, 2}, 3) == IndexClass::positive);
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      const IndexClass p = classify_index({a, b}, 2), q = classify_index({-a, -b}, 2);
      if (a == 0 && b == 0) {
        CHECK(p == IndexClass::zero);
      } else {
        CHECK(p != q);
        CHECK(p != IndexClass::zero);
      }
    }
  }
}

TEST_CASE("draws are Hermitian, real at zero, and keyed") {
  const Grid g(3, 16, 8.0);
  const CutoffFamily c(CutoffKind::smooth, g);
  for (auto kind : {DistributionKind::gaussian, DistributionKind::rademacher, DistributionKind::uniform,
                    DistributionKind::unimodular}) {
    const CoefficientDistribution dist{kind, 1.0};
    const RandomizedDraw d1 = RandomizedDraw::generate({9, 4}, dist, c);
    const RandomizedDraw d2 = RandomizedDraw::generate({9, 4}, dist, c);
    const RandomizedDraw d3 = RandomizedDraw::generate({9, 5}, dist, c);
    CHECK(d1.symmetry_defect(c) == 0.0);
    for (int j = 0; j < 2; ++j) {
      CHECK(d1.coefficient(j, c.zero_cube()).imag() == 0.0);
      CHECK(d1.coefficients(j) == d2.coefficients(j));
      CHECK(d1.coefficients(j) != d3.coefficients(j));
    }
    if (kind == DistributionKind::unimodular) {
      for (std::size_t id = 0; id < c.cube_count(); ++id) CHECK(std::abs(d1.coefficient(0, id)) == doctest::Approx(1.0));
    }
  }
  // Draws do not depend on the grid size: the same cube gets the same coefficient.
  const CutoffFamily big(CutoffKind::smooth, Grid(3, 32, 8.0));
  const RandomizedDraw small_draw = RandomizedDraw::generate({1, 2}, {}, c);
  const RandomizedDraw big_draw = RandomizedDraw::generate({1, 2}, {}, big);
  for (std::size_t id = 0; id < c.cube_count(); ++id) {
    CHECK(small_draw.coefficient(1, id) == big_draw.coefficient(1, big.cube_id(c.cube_center(id))));
  }
  // Explicit coefficients violating the symmetry are rejected.
  std::vector<Complex> bad(c.cube_count(), 1.0);
  bad[0] = Complex(0.0, 1.0);
  CHECK_THROWS_AS(RandomizedDraw::from_coefficients(c, bad, bad), Error);
}

TEST_CASE("sub-Gaussian certificates") {
  for (auto kind : {DistributionKind::gaussian, DistributionKind::rademacher, DistributionKind::uniform,
                    DistributionKind::unimodular}) {
    const CoefficientDistribution d{kind, 2.0};
    REQUIRE(d.subgaussian_constant().has_value());
    CHECK(*d.subgaussian_constant() == doctest::Approx(2.0));
    CHECK(d.symmetric());
    // Empirical check of the moment generating bound on the real component.
    for (double gamma : {0.5, 1.0}) {
      double mgf = 0.0;
      const int n = 20000;
      for (int i = 0; i < n; ++i) mgf += std::exp(gamma * d.draw_complex({3, static_cast<std::uint64_t>(i)}, 1, 0).real());
      mgf /= n;
      CHECK(mgf <= 1.05 * std::exp(*d.subgaussian_constant() * gamma * gamma));
    }
  }
  const CoefficientDistribution constant{DistributionKind::constant, 1.0};
  CHECK_FALSE(constant.subgaussian_constant().has_value());
  CHECK_FALSE(constant.symmetric());
  CHECK_THROWS_AS((CoefficientDistribution{DistributionKind::gaussian, 0.0}.validate()), Error);
  CHECK_THROWS_AS(parse_distribution_kind("cauchy"), Error);
}

TEST_CASE("randomize_pair identities") {
  const Grid g(2, 32, 8.0);
  for (CutoffKind kind : {CutoffKind::smooth, CutoffKind::sharp}) {
    const CutoffFamily c(kind, g);
    const FieldPair p = smooth_pair(g, 31, 1.5);
    // All coefficients one: partition of unity reproduces the input.
    const FieldPair same = randomize_pair(p, c, {}, all_ones(c));
    CHECK(pair_l2_distance(same, p) <= 1e-12 * std::sqrt(p.pos.squared_l2() + p.vel.squared_l2()));
    // Realness.
    for (std::uint64_t i = 0; i < 20; ++i) {
      const FieldPair r = randomize_pair(p, c, {}, RandomizedDraw::generate({5, i}, {}, c));
      CHECK(r.pos.hermitian_defect() <= 1e-14 * r.pos.max_abs());
      CHECK(imaginary_residue(r.pos) <= 1e-11 * fft_inverse(r.pos).max_abs());
      CHECK(imaginary_residue(r.vel) <= 1e-11 * fft_inverse(r.vel).max_abs());
    }
  }
  // Unimodular + sharp preserves every Sobolev norm exactly.
  const CutoffFamily sharp(CutoffKind::sharp, g);
  const CoefficientDistribution uni{DistributionKind::unimodular, 1.0};
  const FieldPair p = smooth_pair(g, 32, 1.5);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const FieldPair r = randomize_pair(p, sharp, uni, RandomizedDraw::generate({6, i}, uni, sharp));
    for (double s : {0.0, 0.5, 1.0}) {
      CHECK(rel_diff(sobolev_norm(r.pos, s, false), sobolev_norm(p.pos, s, false)) <= 1e-12);
      CHECK(rel_diff(sobolev_norm(r.vel, s - 1.0, false), sobolev_norm(p.vel, s - 1.0, false)) <= 1e-12);
    }
  }
  // The constant law is refused unless the certificate is waived.
  const CoefficientDistribution constant{DistributionKind::constant, 1.0};
  const RandomizedDraw cd = RandomizedDraw::generate({1, 1}, constant, sharp);
  CHECK_THROWS_AS(randomize_pair(p, sharp, constant, cd), Error);
  CHECK_NOTHROW(randomize_pair(p, sharp, constant, cd, false));
}

TEST_CASE("Gaussian randomization: mean H^s energy matches the per-cube sum") {
  const Grid g(2, 16, 8.0);
  const CutoffFamily c(CutoffKind::smooth, g);
  const double s = 0.5;
  const FieldPair p = smooth_pair(g, 41, 1.0);
  double expected = 0.0;
  for (std::size_t id = 0; id < c.cube_count(); ++id) {
    const CubeProjection proj = cube_project(p.pos, c.cube_center(id), c);
    if (!proj.outside) expected += std::pow(sobolev_norm(proj.field, s, false), 2);
  }
  // E|Σ g_n a_n|^2 = Σ |a_n|^2 only for cubes with disjoint supports; smooth
  // cubes overlap, so compare against the exact second moment instead.
  double exact = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    double w2 = 0.0;
    for (std::size_t id = 0; id < c.cube_count(); ++id) w2 += std::pow(c.value(c.cube_center(id), i), 2);
    exact += w2 * std::norm(p.pos[i]) * std::pow(japanese_bracket(g.frequency_norm(i)), 2 * s);
  }
  std::vector<double> values;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const FieldPair r = randomize_pair(p, c, {}, RandomizedDraw::generate({8, static_cast<std::uint64_t>(i)}, {}, c));
    values.push_back(std::pow(sobolev_norm(r.pos, s, false), 2));
  }
  double mean = 0.0, var = 0.0;
  for (double v : values) mean += v / n;
  for (double v : values) var += (v - mean) * (v - mean) / (n - 1);
  const double se = std::sqrt(var / n);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
  CHECK(exact <= expected * (1.0 + 1e-12));  // sum psi^2 <= (sum psi)^2 = 1 per mode

  // With the sharp family the two oracles coincide.
  const CutoffFamily sharp(CutoffKind::sharp, g);
  double sharp_sum = 0.0;
  for (std::size_t id = 0; id < sharp.cube_count(); ++id) {
    const CubeProjection proj = cube_project(p.pos, sharp.cube_center(id), sharp);
    if (!proj.outside) sharp_sum += std::pow(sobolev_norm(proj.field, s, false), 2);
  }
  double sharp_mean = 0.0;
  values.clear();
  for (int i = 0; i < n; ++i) {
    const FieldPair r = randomize_pair(p, sharp, {}, RandomizedDraw::generate({8, static_cast<std::uint64_t>(i)}, {}, sharp));
    values.push_back(std::pow(sobolev_norm(r.pos, s, false), 2));
  }
  double svar = 0.0;
  for (double v : values) sharp_mean += v / n;
  for (double v : values) svar += (v - sharp_mean) * (v - sharp_mean) / (n - 1);
  CHECK(std::abs(sharp_mean - sharp_sum) <= 3.0 * std::sqrt(svar / n));
}

TEST_CASE("cube projections") {
  const Grid g(2, 32, 8.0);
  const CutoffFamily sharp(CutoffKind::sharp, g);
  // A field supported in the sharp cube (1, 0): xi in [0.5, 1.5) x [-0.5, 0.5).
  SpectralField f(g);
  const std::size_t k = g.flatten({g.axis_index(9), g.axis_index(1)});
  f[k] = Complex(1.0, 2.0);
  f[g.negated(k)] = std::conj(f[k]);
  SpectralField one_sided(g);
  one_sided[k] = f[k];
  const CubeProjection own = cube_project(one_sided, {1, 0}, sharp);
  CHECK(l2_distance(own.field, one_sided) == 0.0);
  for (std::size_t id = 0; id < sharp.cube_count(); ++id) {
    const LatticeIndex m = sharp.cube_center(id);
    if (m[0] == 1 && m[1] == 0) continue;
    CHECK(cube_project(one_sided, m, sharp).field.squared_l2() == 0.0);
  }
  CHECK(cube_project(f, {9, 9}, sharp).outside);

  for (CutoffKind kind : {CutoffKind::smooth, CutoffKind::sharp}) {
    const CutoffFamily c(kind, g);
    const SpectralField u = smooth_field(g, 51, 1.5);
    SpectralField total(g);
    for (std::size_t id = 0; id < c.cube_count(); ++id) {
      const LatticeIndex m = c.cube_center(id);
      const CubeProjection proj = cube_project(u, m, c);
      total += proj.field;
      // conj(psi(D + n) u) = psi(D - n) u for real u.
      LatticeIndex neg{};
      for (int a = 0; a < 2; ++a) neg[a] = -m[a];
      const SpectralField mirror = cube_project(u, neg, c).field;
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(mirror[g.negated(i)] - std::conj(proj.field[i])) <= 1e-15);
    }
    CHECK(l2_distance(total, u) <= 1e-12 * std::sqrt(u.squared_l2()));
  }
}

TEST_CASE("Bernstein ratio") {
  const Grid g(2, 32, 8.0);
  const CutoffFamily sharp(CutoffKind::sharp, g);
  const SpectralField u = smooth_field(g, 61, 2.0);
  CHECK(bernstein_ratio(u, {1, 0}, 3.0, 3.0, sharp) == 1.0);
  const SpectralField mode = fft_forward(cosine_mode(g, {8, 0}));
  // Cube (1, 0) keeps only the +k half of the cosine, (1/2) exp(2 pi i 8 x / L):
  // ||.||_inf / ||.||_2 = (1/2) / ((1/2) L^{d/2}) = 1/L.
  const double half = bernstein_ratio(mode, {1, 0}, 2.0, kInf, sharp);
  CHECK(half == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
  // The Bernstein constant does not depend on the cube: per-cube medians over
  // 50 random fields stay within 10% of each other (interior cubes). The zero
  // cube is checked separately: its piece of a real field is itself real, and
  // real Gaussian fields peak higher relative to L^2 than complex ones.
  std::vector<LatticeIndex> cubes;
  for (std::size_t id = 0; id < sharp.cube_count(); ++id) {
    const LatticeIndex m = sharp.cube_center(id);
    if (std::abs(m[0]) <= 1 && std::abs(m[1]) <= 1 && (m[0] != 0 || m[1] != 0)) cubes.push_back(m);
  }
  std::vector<std::vector<double>> per_cube(cubes.size());
  std::vector<double> zero_cube;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SpectralField f = band_limited_field(g, 100 + seed, 15);
    for (std::size_t c = 0; c < cubes.size(); ++c) per_cube[c].push_back(bernstein_ratio(f, cubes[c], 2.0, kInf, sharp));
    zero_cube.push_back(bernstein_ratio(f, {0, 0}, 2.0, kInf, sharp));
  }
  std::vector<double> medians;
  for (auto& v : per_cube) medians.push_back(median(v));
  const double typical = median(medians);
  CHECK(*std::max_element(medians.begin(), medians.end()) <= 1.1 * typical);
  CHECK(median(zero_cube) > typical);
  CHECK(median(zero_cube) <= 1.3 * typical);
  CHECK_THROWS_AS(bernstein_ratio(u, {1, 0}, 3.0, 2.0, sharp), Error);
}

TEST_CASE("modulation norms") {
  const Grid g(2, 32, 8.0);
  const CutoffFamily sharp(CutoffKind::sharp, g);
  const SpectralField u = smooth_field(g, 71, 1.5);
  CHECK(rel_diff(modulation_norm(u, 2.0, 2.0, 0.0, sharp), std::sqrt(u.squared_l2())) <= 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SpectralField f = smooth_field(g, 200 + seed, 1.5);
    CHECK(modulation_norm(f, 2.0, 1.0, 0.0, sharp) >= modulation_norm(f, 2.0, 2.0, 0.0, sharp));
  }
  // Single real mode cos(2 pi 8 x / L) lives in cubes (+-1, 0), each carrying half.
  const SpectralField mode = fft_forward(cosine_mode(g, {8, 0}));
  // The piece is (1/2) exp(2 pi i 8 x / L): modulus 1/2 everywhere.
  const double piece = 0.5 * std::pow(8.0, 2.0 / 3.0);
  CHECK(lebesgue_norm(g, fft_inverse_complex(cube_project(mode, {1, 0}, sharp).field), 3.0) ==
        doctest::Approx(piece).epsilon(1e-12));
  CHECK(modulation_norm(mode, 3.0, 1.0, 1.0, sharp) ==
        doctest::Approx(2.0 * japanese_bracket(1.0) * piece).epsilon(1e-12));
}

TEST_CASE("draw manifest record") {
  const auto rec = nlohmann::json::parse(draw_manifest_record({12, 34}, {DistributionKind::rademacher, 1.0}, CutoffKind::sharp));
  CHECK(rec["master_seed"] == 12);
  CHECK(rec["index"] == 34);
  CHECK(rec["distribution"] == "rademacher");
  CHECK(rec["cutoff"] == "sharp");
}
