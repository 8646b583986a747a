#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nlwlab/field.hpp"

namespace nlwlab {

enum class DealiasRule { none, two_thirds, padded_three_halves };

std::string_view to_string(DealiasRule rule) noexcept;
DealiasRule parse_dealias_rule(std::string_view name);
/// two-thirds for the polynomial cases (d = 2, 3, 4), padded-3/2 for d = 5.
DealiasRule default_dealias_rule(int dim);

/// Exponent p in F(u) = |u|^p u: 4/(d-2) for d >= 3; d = 2 uses the cubic
/// p = 2 as a smoke-test stand-in (the energy-critical exponent is infinite).
double nonlinearity_power(int dim);

/// F(u) = |u|^p u at one point.
double nonlinearity(int dim, double u) noexcept;

/// Pointwise F(u) = |u|^p u. `out` may alias `u`.
void nonlinearity(int dim, std::span<const double> u, std::span<double> out);
RealField nonlinearity(const RealField& u, int dim);

/// Pointwise G(u) = |u|^{p+2} / (p+2), so that G' = F.
double potential_density(int dim, double u) noexcept;

/// Constant C with |F(u) - F(v)| <= C |u - v| (|u|^p + |v|^p).
double difference_bound_constant(int dim) noexcept;

struct DifferenceBound {
  double lhs = 0.0;          // max_x |F(u) - F(v)|
  double rhs = 0.0;          // max_x |u - v| (|u|^p + |v|^p)
  double max_ratio = 0.0;    // max_x of the pointwise ratio (0 where the majorant is 0)
  double constant = 0.0;     // documented C
};

DifferenceBound nonlinearity_difference_bound(const RealField& u, const RealField& v, int dim);

/// E(u) = int 1/2 (d_t u)^2 + 1/2 |grad u|^2 + G(u) dx, potential on the field's own grid.
double energy(const FieldPair& pair, int dim);

/// Spectral evaluation of F with a dealiasing rule. Holds scratch buffers, so
/// one instance must not be shared between threads.
class NonlinearForce {
 public:
  NonlinearForce(const Grid& grid, int dim_for_power, DealiasRule rule);

  const Grid& grid() const noexcept { return grid_; }
  DealiasRule rule() const noexcept { return rule_; }
  int power_dim() const noexcept { return power_dim_; }

  /// out = dealiased F(u). For the padded rule F is evaluated on the
  /// 3/2-padded grid and truncated back.
  void apply(std::span<const Complex> u, std::span<Complex> out);
  SpectralField apply(const SpectralField& u);

  /// Same, starting from u already sampled on the native grid (rules other
  /// than padded-3/2 only). Saves one inverse transform in the solver.
  void apply_physical(std::span<const double> u, std::span<Complex> out);
  /// True when apply_physical is available.
  bool evaluates_on_native_grid() const noexcept { return rule_ != DealiasRule::padded_three_halves; }

  /// Potential energy int G(u) consistent with the rule (the discrete
  /// Hamiltonian the splitting conserves).
  double potential(std::span<const Complex> u);

  /// Relative L^2 mass of u outside the rule's retained band.
  double out_of_band_fraction(const SpectralField& u) const;
  /// Projection onto the retained band.
  void project(SpectralField& u) const;
  /// True if the mode is retained by the rule.
  bool retained(std::size_t flat) const noexcept;

  /// Largest |u(x)| seen in the last apply (blowup monitor).
  double last_max_abs() const noexcept { return last_max_abs_; }

 private:
  void to_eval_grid(std::span<const Complex> u);

  Grid grid_;
  Grid eval_grid_;
  int power_dim_;
  DealiasRule rule_;
  std::vector<std::size_t> embed_;   // native flat -> eval-grid flat (padded rule)
  std::vector<std::uint8_t> keep_;
  std::vector<Complex> spec_;
  std::vector<double> real_;
  double last_max_abs_ = 0.0;
};

}  // namespace nlwlab
