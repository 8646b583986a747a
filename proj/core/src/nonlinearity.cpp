#include "nlwlab/nonlinearity.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <string>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/propagator.hpp"

namespace nlwlab {

namespace {

int padded_points(int n) {
  const int m = (3 * n + 1) / 2;
  return m % 2 == 0 ? m : m + 1;
}

// F(a) = |a|^p a with exact fast paths; every branch is odd in a.
struct Pointwise {
  int dim;
  double operator()(double a) const noexcept {
    switch (dim) {
      case 2:
      case 4:
        return a * a * a;
      case 3: {
        const double a2 = a * a;
        return a2 * a2 * a;
      }
      case 5:
        return a * std::cbrt(a * a * a * a);
      default:
        return std::pow(std::abs(a), 4.0 / (dim - 2)) * a;
    }
  }
};

double abs_power(int dim, double a) noexcept {
  switch (dim) {
    case 2:
    case 4:
      return a * a;
    case 3:
      return (a * a) * (a * a);
    case 5:
      return std::cbrt(a * a * a * a);
    default:
      return std::pow(std::abs(a), nonlinearity_power(dim));
  }
}

// Max |a|, or +inf if any entry is not finite.
double checked_max_abs(std::span<const double> values) noexcept {
  double m = 0.0;
  bool finite = true;
  for (double a : values) {
    finite = finite && std::isfinite(a);
    m = std::max(m, std::abs(a));
  }
  return finite ? m : std::numeric_limits<double>::infinity();
}

void check_dim(int dim) {
  require(dim >= 2 && dim <= kMaxDim, ErrorCode::invalid_argument,
          "nonlinearity dimension must be in [2, 5]");
}

}  // namespace

std::string_view to_string(DealiasRule rule) noexcept {
  switch (rule) {
    case DealiasRule::none: return "none";
    case DealiasRule::two_thirds: return "two-thirds";
    case DealiasRule::padded_three_halves: return "padded-3/2";
  }
  return "unknown";
}

DealiasRule parse_dealias_rule(std::string_view name) {
  for (auto r : {DealiasRule::none, DealiasRule::two_thirds, DealiasRule::padded_three_halves}) {
    if (name == to_string(r)) return r;
  }
  fail(ErrorCode::invalid_argument, "unknown dealias rule '" + std::string(name) + "'");
}

DealiasRule default_dealias_rule(int dim) {
  return dim == 5 ? DealiasRule::padded_three_halves : DealiasRule::two_thirds;
}

double nonlinearity_power(int dim) {
  check_dim(dim);
  return dim == 2 ? 2.0 : 4.0 / (dim - 2);
}

double nonlinearity(int dim, double u) noexcept { return Pointwise{dim}(u); }

void nonlinearity(int dim, std::span<const double> u, std::span<double> out) {
  check_dim(dim);
  require(u.size() == out.size(), ErrorCode::shape_mismatch, "nonlinearity: shape mismatch");
  const Pointwise f{dim};
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(u[i]);
}

RealField nonlinearity(const RealField& u, int dim) {
  RealField out(u.grid());
  nonlinearity(dim, u.values(), out.values());
  return out;
}

double potential_density(int dim, double u) noexcept {
  const double p = dim == 2 ? 2.0 : 4.0 / (dim - 2);
  return abs_power(dim, u) * u * u / (p + 2.0);
}

double difference_bound_constant(int dim) noexcept {
  // Mean value theorem: |F(u) - F(v)| <= (p + 1) max(|u|, |v|)^p |u - v|, and
  // max(|u|,|v|)^p <= |u|^p + |v|^p; p = 2 gives 3. For d = 5 we keep the
  // documented (p + 1) 2^{1/3} = 7/3 * 2^{1/3}.
  if (dim == 5) return 7.0 / 3.0 * std::cbrt(2.0);
  const double p = dim == 2 ? 2.0 : 4.0 / (dim - 2);
  return p + 1.0;
}

DifferenceBound nonlinearity_difference_bound(const RealField& u, const RealField& v, int dim) {
  check_dim(dim);
  require_same_grid(u.grid(), v.grid(), "nonlinearity_difference_bound");
  const Pointwise f{dim};
  DifferenceBound out;
  out.constant = difference_bound_constant(dim);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lhs = std::abs(f(u[i]) - f(v[i]));
    const double rhs = std::abs(u[i] - v[i]) * (abs_power(dim, u[i]) + abs_power(dim, v[i]));
    out.lhs = std::max(out.lhs, lhs);
    out.rhs = std::max(out.rhs, rhs);
    if (rhs > 0.0) out.max_ratio = std::max(out.max_ratio, lhs / rhs);
  }
  return out;
}

double energy(const FieldPair& pair, int dim) {
  check_dim(dim);
  const RealField u = fft_inverse(pair.pos);
  double pot = 0.0;
  for (double a : u.values()) pot += potential_density(dim, a);
  return linear_energy(pair) + pot * u.grid().cell_volume();
}

NonlinearForce::NonlinearForce(const Grid& grid, int dim_for_power, DealiasRule rule)
    : grid_(grid),
      eval_grid_(rule == DealiasRule::padded_three_halves
                     ? Grid(grid.dim(), padded_points(grid.points()), grid.length())
                     : grid),
      power_dim_(dim_for_power),
      rule_(rule) {
  check_dim(dim_for_power);
  keep_.assign(grid.size(), 1);
  const int n = grid.points();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_nyquist(i)) {
      keep_[i] = 0;
    } else if (rule == DealiasRule::two_thirds && 3 * grid.max_abs_index(i) > n) {
      keep_[i] = 0;
    }
  }
  if (rule == DealiasRule::padded_three_halves) {
    embed_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const LatticeIndex k = grid.frequency_index(i);
      LatticeIndex j{};
      for (int a = 0; a < grid.dim(); ++a) j[a] = eval_grid_.axis_index(k[a]);
      embed_[i] = eval_grid_.flatten(j);
    }
  }
  spec_.resize(eval_grid_.size());
  real_.resize(eval_grid_.size());
}

bool NonlinearForce::retained(std::size_t flat) const noexcept { return keep_[flat] != 0; }

void NonlinearForce::to_eval_grid(std::span<const Complex> u) {
  require(u.size() == grid_.size(), ErrorCode::shape_mismatch, "NonlinearForce: shape mismatch");
  if (rule_ == DealiasRule::padded_three_halves) {
    std::fill(spec_.begin(), spec_.end(), Complex{});
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (keep_[i]) spec_[embed_[i]] = u[i];
    }
    fft_inverse(eval_grid_, spec_, real_);
  } else {
    fft_inverse(eval_grid_, u, real_);
  }
  last_max_abs_ = checked_max_abs(real_);
}

void NonlinearForce::apply(std::span<const Complex> u, std::span<Complex> out) {
  require(out.size() == grid_.size(), ErrorCode::shape_mismatch, "NonlinearForce: shape mismatch");
  to_eval_grid(u);
  nonlinearity(power_dim_, real_, real_);
  if (rule_ == DealiasRule::padded_three_halves) {
    fft_forward(eval_grid_, real_, spec_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep_[i] ? spec_[embed_[i]] : Complex{};
  } else {
    fft_forward(eval_grid_, real_, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!keep_[i]) out[i] = Complex{};
    }
  }
}

void NonlinearForce::apply_physical(std::span<const double> u, std::span<Complex> out) {
  require(evaluates_on_native_grid(), ErrorCode::invalid_argument,
          "apply_physical is not available with padded dealiasing");
  require(u.size() == grid_.size() && out.size() == grid_.size(), ErrorCode::shape_mismatch,
          "NonlinearForce: shape mismatch");
  last_max_abs_ = checked_max_abs(u);
  nonlinearity(power_dim_, u, real_);
  fft_forward(grid_, real_, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!keep_[i]) out[i] = Complex{};
  }
}

SpectralField NonlinearForce::apply(const SpectralField& u) {
  require_same_grid(u.grid(), grid_, "NonlinearForce");
  SpectralField out(grid_);
  apply(u.coeffs(), out.coeffs());
  return out;
}

double NonlinearForce::potential(std::span<const Complex> u) {
  to_eval_grid(u);
  double pot = 0.0;
  for (double a : real_) pot += potential_density(power_dim_, a);
  return pot * eval_grid_.cell_volume();
}

double NonlinearForce::out_of_band_fraction(const SpectralField& u) const {
  double total = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::norm(u[i]);
    total += a;
    if (!keep_[i]) outside += a;
  }
  return total > 0.0 ? std::sqrt(outside / total) : 0.0;
}

void NonlinearForce::project(SpectralField& u) const {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!keep_[i]) u[i] = Complex{};
  }
}

}  // namespace nlwlab
