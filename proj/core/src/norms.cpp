#include "nlwlab/norms.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

template <class Pow>
double power_sum(std::span<const double> values, Pow pw) {
  double sum = 0.0;
  for (double v : values) sum += pw(std::abs(v));
  return sum;
}

}  // namespace

double lebesgue_norm(const Grid& grid, std::span<const Complex> values, double p) {
  std::vector<double> modulus(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) modulus[i] = std::abs(values[i]);
  return lebesgue_norm(grid, modulus, p);
}

double lebesgue_norm(const Grid& grid, std::span<const double> values, double p) {
  require(p >= 1.0, ErrorCode::domain, "Lebesgue exponent must be >= 1, got " + std::to_string(p));
  require(values.size() == grid.size(), ErrorCode::shape_mismatch, "lebesgue_norm: shape mismatch");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  if (p == 1.0) {
    sum = power_sum(values, [](double a) { return a; });
  } else if (p == 2.0) {
    sum = power_sum(values, [](double a) { return a * a; });
  } else if (p == 3.0) {
    sum = power_sum(values, [](double a) { return a * a * a; });
  } else if (p == 4.0) {
    sum = power_sum(values, [](double a) { return (a * a) * (a * a); });
  } else if (p == 6.0) {
    sum = power_sum(values, [](double a) {
      const double a3 = a * a * a;
      return a3 * a3;
    });
  } else if (p == 10.0) {
    sum = power_sum(values, [](double a) {
      const double a2 = a * a;
      const double a4 = a2 * a2;
      return a4 * a4 * a2;
    });
  } else {
    sum = power_sum(values, [p](double a) { return std::pow(a, p); });
  }
  return std::pow(sum * grid.cell_volume(), 1.0 / p);
}

double lebesgue_norm(const RealField& field, double p) {
  return lebesgue_norm(field.grid(), field.values(), p);
}

double japanese_bracket(double xi_norm) noexcept {
  const double w = 2.0 * std::numbers::pi * xi_norm;
  return std::sqrt(1.0 + w * w);
}

double sobolev_norm(const SpectralField& field, double s, bool homogeneous) {
  const Grid& grid = field.grid();
  const auto radii = grid.radial_values();
  std::vector<double> weight(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    if (homogeneous) {
      weight[r] = radii[r] == 0.0 ? 0.0 : std::pow(2.0 * std::numbers::pi * radii[r], 2.0 * s);
    } else {
      weight[r] = std::pow(japanese_bracket(radii[r]), 2.0 * s);
    }
  }
  if (homogeneous && s < 0.0) {
    const double zero_mode = std::abs(field[0]);
    require(zero_mode <= 1e-12 * std::sqrt(field.squared_l2()), ErrorCode::domain,
            "homogeneous Sobolev norm of negative order requested on a field with nonzero mean");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) sum += weight[grid.radial_id(i)] * std::norm(field[i]);
  return std::sqrt(sum);
}

double pair_sobolev_norm(const FieldPair& pair, double s, bool homogeneous) {
  const double a = sobolev_norm(pair.pos, s, homogeneous);
  const double b = sobolev_norm(pair.vel, s - 1.0, homogeneous);
  return std::sqrt(a * a + b * b);
}

SpectralField apply_symbol(const SpectralField& field, const Symbol& symbol) {
  const Grid& grid = field.grid();
  SpectralField out(grid);
  std::vector<double> xi(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < field.size(); ++i) {
    const LatticeIndex k = grid.frequency_index(i);
    for (int a = 0; a < grid.dim(); ++a) xi[a] = k[a] / grid.length();
    const double m = symbol(xi);
    require(std::isfinite(m), ErrorCode::domain, "apply_symbol: symbol produced a non-finite value");
    out[i] = m * field[i];
  }
  return out;
}

SpectralField apply_radial_symbol(const SpectralField& field, const RadialSymbol& symbol) {
  const Grid& grid = field.grid();
  const auto radii = grid.radial_values();
  std::vector<double> table(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    table[r] = symbol(radii[r]);
    require(std::isfinite(table[r]), ErrorCode::domain,
            "apply_radial_symbol: symbol produced a non-finite value");
  }
  SpectralField out(grid);
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = table[grid.radial_id(i)] * field[i];
  return out;
}

FieldPair rescale(const FieldPair& pair, double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::domain, "rescale: lambda must be positive");
  int exponent = 0;
  const double mantissa = std::frexp(lambda, &exponent);
  require(mantissa == 0.5 && std::abs(exponent - 1) <= 30, ErrorCode::domain,
          "rescale: lambda must be a dyadic scale 2^k");
  const Grid& g = pair.grid();
  Grid companion(g.dim(), g.points(), g.length() / lambda);
  // Grid values map point to point; only the coefficient normalization changes.
  std::vector<Complex> pos(pair.pos.coeffs().begin(), pair.pos.coeffs().end());
  for (auto& c : pos) c /= lambda;
  std::vector<Complex> vel(pair.vel.coeffs().begin(), pair.vel.coeffs().end());
  return FieldPair(SpectralField(companion, std::move(pos)), SpectralField(companion, std::move(vel)));
}

}  // namespace nlwlab
