#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/field.hpp"

namespace nlwlab {

enum class DistributionKind { gaussian, rademacher, uniform, unimodular, constant };

std::string_view to_string(DistributionKind kind) noexcept;
DistributionKind parse_distribution_kind(std::string_view name);

/// Law of the randomization coefficients. `scale` fixes E|g|^2 = scale^2 for
/// every kind: real coefficients (the zero cube) have variance scale^2 and the
/// real and imaginary parts of the complex ones have variance scale^2 / 2.
///
/// `constant` (g == scale) is a degenerate diagnostic law. It has nonzero mean
/// and no sub-Gaussian certificate.
struct CoefficientDistribution {
  DistributionKind kind = DistributionKind::gaussian;
  double scale = 1.0;

  /// The constant c in  int e^{gamma x} dmu <= e^{c gamma^2}, valid for every
  /// real component law of this kind; nullopt when no such bound holds.
  ///   gaussian    N(0, v):            c = v / 2
  ///   rademacher  +-a:                cosh(a g) <= e^{a^2 g^2 / 2}
  ///   uniform     U[-a, a]:           sinh(a g)/(a g) <= e^{a^2 g^2 / 6}
  ///   unimodular  components in [-a, a], mean zero: Hoeffding, c = a^2 / 2
  /// With the scaling above all four give c = scale^2 / 2.
  std::optional<double> subgaussian_constant() const noexcept;

  bool symmetric() const noexcept { return kind != DistributionKind::constant; }

  /// E|g|^2 for the complex coefficients.
  double second_moment() const noexcept { return scale * scale; }

  /// Real coefficient g_{0,j}.
  double draw_real(const DrawKey& key, std::uint64_t cube, std::uint64_t j) const noexcept;
  /// Complex coefficient g_{n,j} for n in the index set I.
  Complex draw_complex(const DrawKey& key, std::uint64_t cube, std::uint64_t j) const noexcept;

  void validate() const;
};

}  // namespace nlwlab
