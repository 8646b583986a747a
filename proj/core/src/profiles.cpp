#include "nlwlab/profiles.hpp"

#include <cmath>
#include <numbers>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"

namespace nlwlab {

namespace {

struct Bump {
  std::vector<double> center;
  double sign;
};

std::vector<Bump> bump_list(const ProfileSpec& spec, int dim) {
  std::vector<Bump> out;
  if (spec.profile == "gaussian-bump") {
    std::vector<double> c = spec.center;
    require(c.empty() || static_cast<int>(c.size()) == dim, ErrorCode::invalid_argument,
            "profile center must have one entry per dimension");
    c.resize(static_cast<std::size_t>(dim), 0.0);
    out.push_back({c, 1.0});
    return out;
  }
  require(spec.bumps >= 1, ErrorCode::invalid_argument, "multi-bump needs at least one bump");
  const DrawKey key{spec.seed, 0x62756d70ULL};
  for (int b = 0; b < spec.bumps; ++b) {
    Bump bump;
    for (int a = 0; a < dim; ++a) {
      const double u = keyed_uniform(key, {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(a)});
      bump.center.push_back(spec.spread * (2.0 * u - 1.0));
    }
    bump.sign = keyed_uniform(key, {static_cast<std::uint64_t>(b), 99}) < 0.5 ? -1.0 : 1.0;
    out.push_back(bump);
  }
  return out;
}

RealField bump_field(const Grid& grid, const ProfileSpec& spec) {
  require(spec.width >= grid.spacing(), ErrorCode::domain,
          "profile width is not resolved by the grid (needs >= 1 grid spacing)");
  const int d = grid.dim();
  const auto bumps = bump_list(spec, d);
  RealField f(grid);
  double edge = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const LatticeIndex j = grid.unflatten(i);
    double v = 0.0;
    for (const auto& b : bumps) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double dx = grid.coordinate(j[a]) - b.center[static_cast<std::size_t>(a)];
        r2 += dx * dx;
      }
      v += b.sign * std::exp(-0.5 * r2 / (spec.width * spec.width));
    }
    f[i] = v;
    peak = std::max(peak, std::abs(v));
    bool on_face = false;
    for (int a = 0; a < d; ++a) on_face = on_face || j[a] == 0;
    if (on_face) edge = std::max(edge, std::abs(v));
  }
  require(peak > 0.0 && edge <= spec.edge_tolerance * peak, ErrorCode::domain,
          "profile does not fit in the periodic box (edge/peak = " + std::to_string(edge / peak) + ")");
  return f;
}

SpectralField spectral_power_field(const Grid& grid, const ProfileSpec& spec, double order, std::uint64_t stream) {
  SpectralField f(grid);
  const DrawKey key{spec.seed, stream};
  const int d = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_nyquist(i)) continue;
    const LatticeIndex k = grid.frequency_index(i);
    // Phases keyed by the frequency vector, so nested grids share them; the
    // class of the index decides which mode carries the independent phase.
    int sign = 0;
    for (int a = d - 1; a >= 0 && sign == 0; --a) sign = k[a] > 0 ? 1 : (k[a] < 0 ? -1 : 0);
    LatticeIndex rep = k;
    if (sign < 0) {
      for (int a = 0; a < d; ++a) rep[a] = -k[a];
    }
    std::uint64_t counter = 0;
    for (int a = 0; a < d; ++a) counter = counter * 0x10001ULL + static_cast<std::uint64_t>(rep[a] + 0x8000);
    const double amp = std::pow(japanese_bracket(grid.frequency_norm(i)), -order - 0.5 * d - spec.delta);
    if (sign == 0) {
      f[i] = keyed_uniform(key, {counter}) < 0.5 ? -amp : amp;
    } else {
      const double theta = 2.0 * std::numbers::pi * keyed_uniform(key, {counter});
      const Complex c = std::polar(amp, theta);
      f[i] = sign > 0 ? c : std::conj(c);
    }
  }
  return f;
}

void project_band(SpectralField& f, DealiasRule band) {
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i) || (band == DealiasRule::two_thirds && 3 * g.max_abs_index(i) > g.points())) {
      f[i] = Complex{};
    }
  }
}

void normalize(SpectralField& f, double s, double target, const char* what) {
  if (target == 0.0) {
    f = SpectralField(f.grid());
    return;
  }
  const double norm = sobolev_norm(f, s, false);
  require(std::isfinite(norm) && norm > 1e-300, ErrorCode::domain,
          std::string("target norm for ") + what + " is unreachable on this grid");
  f *= target / norm;
}

}  // namespace

double profile_support_radius(const ProfileSpec& spec, int dim) {
  double offset = 0.0;
  if (spec.profile == "multi-bump") {
    offset = spec.spread * std::sqrt(static_cast<double>(dim));
  } else {
    for (double c : spec.center) offset += c * c;
    offset = std::sqrt(offset);
  }
  return offset + 6.0 * spec.width;
}

FieldPair make_profile(const Grid& grid, const ProfileSpec& spec) {
  require(std::isfinite(spec.pos_norm) && std::isfinite(spec.vel_norm) && spec.pos_norm >= 0.0 &&
              spec.vel_norm >= 0.0,
          ErrorCode::invalid_argument, "profile norms must be finite and nonnegative");
  require(spec.pos_norm > 0.0 || spec.vel_norm > 0.0, ErrorCode::invalid_argument,
          "profile amplitude is zero; refusing to write an all-zero field");
  FieldPair pair(grid);
  if (spec.profile == "gaussian-bump" || spec.profile == "multi-bump") {
    const SpectralField shape = fft_forward(bump_field(grid, spec));
    pair.pos = shape;
    pair.vel = shape;
  } else if (spec.profile == "spectral-power") {
    pair.pos = spectral_power_field(grid, spec, spec.s, 0x706f73ULL);
    pair.vel = spectral_power_field(grid, spec, spec.s - 1.0, 0x76656cULL);
  } else {
    fail(ErrorCode::invalid_argument, "unknown profile '" + spec.profile + "'");
  }
  project_band(pair.pos, spec.band);
  project_band(pair.vel, spec.band);
  normalize(pair.pos, spec.s, spec.pos_norm, "u0");
  normalize(pair.vel, spec.s - 1.0, spec.vel_norm, "u1");
  return pair;
}

}  // namespace nlwlab
