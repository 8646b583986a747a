#include "nlwlab/propagator.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

PropagatorCache::PropagatorCache(const Grid& grid, double t) : grid_(grid), t_(t) {
  require(std::isfinite(t), ErrorCode::invalid_argument, "propagation time must be finite");
  const auto radii = grid.radial_values();
  cos_.resize(radii.size());
  sinc_.resize(radii.size());
  wsin_.resize(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double w = kTwoPi * radii[r];
    if (w == 0.0) {
      cos_[r] = 1.0;
      sinc_[r] = t;
      wsin_[r] = 0.0;
    } else {
      const double s = std::sin(t * w);
      cos_[r] = std::cos(t * w);
      sinc_[r] = s / w;
      wsin_[r] = w * s;
    }
  }
}

std::shared_ptr<const PropagatorCache> PropagatorCache::get(const Grid& grid, double t) {
  using Key = std::tuple<int, int, std::uint64_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const PropagatorCache>> cache;
  const Key key{grid.dim(), grid.points(), std::bit_cast<std::uint64_t>(grid.length()),
                std::bit_cast<std::uint64_t>(t)};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 4096) cache.clear();
  auto entry = std::make_shared<const PropagatorCache>(grid, t);
  cache.emplace(key, entry);
  return entry;
}

void linear_evolve_inplace(FieldPair& pair, const PropagatorCache& cache) {
  const Grid& grid = pair.grid();
  require_same_grid(grid, cache.grid(), "linear_evolve");
  auto p = pair.pos.coeffs();
  auto v = pair.vel.coeffs();
  const auto c = cache.cos_table();
  const auto s = cache.sinc_table();
  const auto w = cache.wsin_table();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto r = grid.radial_id(i);
    const Complex u0 = p[i];
    const Complex u1 = v[i];
    p[i] = c[r] * u0 + s[r] * u1;
    v[i] = -w[r] * u0 + c[r] * u1;
  }
}

FieldPair linear_evolve(const FieldPair& pair, double t) {
  FieldPair out = pair;
  if (t == 0.0) return out;
  linear_evolve_inplace(out, *PropagatorCache::get(pair.grid(), t));
  return out;
}

FieldPair duhamel_integral(std::span<const SpectralField> forcing, std::span<const double> times) {
  require(forcing.size() == times.size(), ErrorCode::shape_mismatch,
          "duhamel_integral: one forcing sample per time");
  require(times.size() >= 2, ErrorCode::insufficient_samples, "duhamel_integral needs >= 2 samples");
  const double dt = times[1] - times[0];
  require(dt > 0.0, ErrorCode::invalid_argument, "duhamel_integral: times must increase");
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double step = times[j] - times[j - 1];
    require(std::abs(step - dt) <= 1e-9 * dt + 1e-13 * std::abs(times[j]),
            ErrorCode::invalid_argument, "duhamel_integral: time grid is not uniform");
  }
  const Grid& grid = forcing[0].grid();
  FieldPair out(grid);
  const double t_end = times.back();
  auto p = out.pos.coeffs();
  auto v = out.vel.coeffs();
  for (std::size_t j = 0; j < times.size(); ++j) {
    require_same_grid(grid, forcing[j].grid(), "duhamel_integral");
    const double weight = (j == 0 || j + 1 == times.size()) ? 0.5 * dt : dt;
    const auto cache = PropagatorCache::get(grid, t_end - times[j]);
    const auto f = forcing[j].coeffs();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto r = grid.radial_id(i);
      p[i] -= weight * cache->sinc_table()[r] * f[i];
      v[i] -= weight * cache->cos_table()[r] * f[i];
    }
  }
  return out;
}

double linear_energy(const FieldPair& pair) {
  const Grid& grid = pair.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = kTwoPi * grid.frequency_norm(i);
    acc += std::norm(pair.vel[i]) + w * w * std::norm(pair.pos[i]);
  }
  return 0.5 * acc;
}

}  // namespace nlwlab
