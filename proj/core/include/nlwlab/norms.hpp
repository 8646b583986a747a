#pragma once

#include <functional>
#include <limits>
#include <span>

#include "nlwlab/field.hpp"

namespace nlwlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Riemann-sum (sum_x |f|^p dx^d)^{1/p}; p = kInf gives the grid maximum.
double lebesgue_norm(const RealField& field, double p);
double lebesgue_norm(const Grid& grid, std::span<const double> values, double p);
/// Same for complex samples (norm of the modulus).
double lebesgue_norm(const Grid& grid, std::span<const Complex> values, double p);

/// <xi> = (1 + 4 pi^2 |xi|^2)^{1/2}.
double japanese_bracket(double xi_norm) noexcept;

/// Discrete H^s (weight <xi>^s) or homogeneous H^s (weight (2 pi |xi|)^s, zero
/// mode dropped). Homogeneous negative-order norms require a mean-zero field.
double sobolev_norm(const SpectralField& field, double s, bool homogeneous);

/// (||u0||_{H^s}^2 + ||u1||_{H^{s-1}}^2)^{1/2}
double pair_sobolev_norm(const FieldPair& pair, double s, bool homogeneous);

using Symbol = std::function<double(std::span<const double> xi)>;
using RadialSymbol = std::function<double(double xi_norm)>;

/// Multiplies each coefficient by symbol(xi_k). Throws if a non-finite value appears.
SpectralField apply_symbol(const SpectralField& field, const Symbol& symbol);
/// Same for symbols depending on |xi| only; evaluated once per distinct radius.
SpectralField apply_radial_symbol(const SpectralField& field, const RadialSymbol& symbol);

/// u_lambda(x) = lambda^{(d-2)/2} u(lambda x), d_t u_lambda = lambda^{d/2} u_1(lambda x),
/// represented on the companion grid of side L / lambda. lambda must be 2^k.
FieldPair rescale(const FieldPair& pair, double lambda);

}  // namespace nlwlab
