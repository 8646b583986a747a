#include "nlwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace detail {

struct GridTables {
  std::vector<std::uint32_t> radial_id;
  std::vector<double> radial_values;
  std::vector<std::uint8_t> nyquist;
  std::vector<std::uint16_t> max_abs;
};

}  // namespace detail

namespace {

constexpr std::size_t kMaxPoints = std::size_t{1} << 28;

std::shared_ptr<const detail::GridTables> build_tables(int dim, int n, double length,
                                                       std::size_t size) {
  auto tables = std::make_shared<detail::GridTables>();
  tables->radial_id.resize(size);
  tables->nyquist.resize(size);
  tables->max_abs.resize(size);

  // |k|^2 is an integer, so distinct radii are enumerated exactly.
  std::map<long, std::uint32_t> radius_ids;
  LatticeIndex j{};
  for (std::size_t flat = 0; flat < size; ++flat) {
    long k2 = 0;
    int kmax = 0;
    bool nyq = false;
    for (int a = 0; a < dim; ++a) {
      const int k = j[a] < n / 2 ? j[a] : j[a] - n;
      k2 += static_cast<long>(k) * k;
      kmax = std::max(kmax, std::abs(k));
      nyq = nyq || j[a] == n / 2;
    }
    auto [it, inserted] = radius_ids.try_emplace(k2, 0u);
    (void)inserted;
    tables->radial_id[flat] = static_cast<std::uint32_t>(k2);  // remapped below
    tables->nyquist[flat] = nyq ? 1 : 0;
    tables->max_abs[flat] = static_cast<std::uint16_t>(kmax);
    for (int a = dim - 1; a >= 0; --a) {
      if (++j[a] < n) break;
      j[a] = 0;
    }
  }
  std::uint32_t next = 0;
  tables->radial_values.reserve(radius_ids.size());
  for (auto& [k2, id] : radius_ids) {
    id = next++;
    tables->radial_values.push_back(std::sqrt(static_cast<double>(k2)) / length);
  }
  for (auto& id : tables->radial_id) id = radius_ids.at(static_cast<long>(id));
  return tables;
}

}  // namespace

Grid::Grid(int dim, int points, double length) : dim_(dim), points_(points), length_(length) {
  require(dim >= 2 && dim <= kMaxDim, ErrorCode::invalid_argument,
          "grid dimension must lie in [2, 5], got " + std::to_string(dim));
  require(points >= 4 && points % 2 == 0, ErrorCode::invalid_argument,
          "points per axis must be even and >= 4, got " + std::to_string(points));
  require(std::isfinite(length) && length > 0.0, ErrorCode::invalid_argument,
          "box length must be positive and finite");
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    require(total <= kMaxPoints / static_cast<std::size_t>(points), ErrorCode::invalid_argument,
            "grid has too many points to address");
    total *= static_cast<std::size_t>(points);
  }
  size_ = total;
  tables_ = build_tables(dim, points, length, size_);
}

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

LatticeIndex Grid::unflatten(std::size_t flat) const noexcept {
  LatticeIndex idx{};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(points_));
    flat /= static_cast<std::size_t>(points_);
  }
  return idx;
}

std::size_t Grid::flatten(const LatticeIndex& axis_indices) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * points_ + static_cast<std::size_t>(axis_indices[a]);
  return flat;
}

LatticeIndex Grid::frequency_index(std::size_t flat) const noexcept {
  LatticeIndex idx = unflatten(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = signed_frequency(idx[a]);
  return idx;
}

std::size_t Grid::negated(std::size_t flat) const noexcept {
  LatticeIndex idx = unflatten(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = (points_ - idx[a]) % points_;
  return flatten(idx);
}

bool Grid::is_nyquist(std::size_t flat) const noexcept { return tables_->nyquist[flat] != 0; }

int Grid::max_abs_index(std::size_t flat) const noexcept { return tables_->max_abs[flat]; }

double Grid::frequency_norm(std::size_t flat) const noexcept {
  return tables_->radial_values[tables_->radial_id[flat]];
}

std::span<const double> Grid::radial_values() const noexcept { return tables_->radial_values; }

std::uint32_t Grid::radial_id(std::size_t flat) const noexcept { return tables_->radial_id[flat]; }

}  // namespace nlwlab
