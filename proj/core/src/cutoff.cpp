#include "nlwlab/cutoff.hpp"

#include <cmath>
#include <string>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

double smooth_step_h(double t) noexcept { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

std::string_view to_string(CutoffKind kind) noexcept {
  return kind == CutoffKind::smooth ? "smooth" : "sharp";
}

CutoffKind parse_cutoff_kind(std::string_view name) {
  if (name == "smooth") return CutoffKind::smooth;
  if (name == "sharp") return CutoffKind::sharp;
  fail(ErrorCode::invalid_argument, "unknown cutoff kind '" + std::string(name) + "'");
}

double plateau_bump(double x) noexcept {
  const double a = std::abs(x);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double t = 2.0 * (a - 0.5);
  const double up = smooth_step_h(1.0 - t);
  return up / (up + smooth_step_h(t));
}

double normalized_bump(double x) noexcept {
  const double base = std::floor(x);
  double total = 0.0;
  for (int m = -1; m <= 2; ++m) total += plateau_bump(x - (base + m));
  return plateau_bump(x) / total;
}

int sharp_cube_of(double xi) noexcept { return static_cast<int>(std::round(xi)); }

CutoffFamily::CutoffFamily(CutoffKind kind, const Grid& grid) : kind_(kind), grid_(grid) {
  const int n = grid.points();
  axis_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int k = grid.signed_frequency(j);
    const double xi = k / grid.length();
    auto& entries = axis_[static_cast<std::size_t>(j)];
    if (kind == CutoffKind::sharp) {
      entries.push_back({sharp_cube_of(xi), 1.0});
    } else {
      const int lo = static_cast<int>(std::floor(xi)) - 1;
      for (int m = lo; m <= lo + 3; ++m) {
        const double w = normalized_bump(xi - m);
        if (w > 0.0) entries.push_back({m, w});
      }
    }
    // The Nyquist row is zero on every field and does not define cubes.
    if (j == n / 2) continue;
    for (const auto& e : entries) radius_ = std::max(radius_, std::abs(e.cube));
  }
  cube_count_ = 1;
  for (int a = 0; a < grid.dim(); ++a) cube_count_ *= static_cast<std::size_t>(2 * radius_ + 1);
}

std::size_t CutoffFamily::cube_id(const LatticeIndex& center) const noexcept {
  std::size_t id = 0;
  for (int a = 0; a < grid_.dim(); ++a) id = id * (2 * radius_ + 1) + static_cast<std::size_t>(center[a] + radius_);
  return id;
}

LatticeIndex CutoffFamily::cube_center(std::size_t id) const noexcept {
  LatticeIndex m{};
  const auto side = static_cast<std::size_t>(2 * radius_ + 1);
  for (int a = grid_.dim() - 1; a >= 0; --a) {
    m[a] = static_cast<int>(id % side) - radius_;
    id /= side;
  }
  return m;
}

bool CutoffFamily::in_range(const LatticeIndex& center) const noexcept {
  for (int a = 0; a < grid_.dim(); ++a) {
    if (std::abs(center[a]) > radius_) return false;
  }
  return true;
}

std::size_t CutoffFamily::zero_cube() const noexcept { return cube_id(LatticeIndex{}); }

double CutoffFamily::value(const LatticeIndex& center, std::size_t flat) const noexcept {
  const LatticeIndex j = grid_.unflatten(flat);
  double w = 1.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    double axis_w = 0.0;
    for (const auto& e : axis_[static_cast<std::size_t>(j[a])]) {
      if (e.cube == center[a]) axis_w = e.weight;
    }
    w *= axis_w;
    if (w == 0.0) break;
  }
  return w;
}

}  // namespace nlwlab
