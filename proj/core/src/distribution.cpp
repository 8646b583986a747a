#include "nlwlab/distribution.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

// Counter layout: {cube, j, component}; component 0 = real part / the real
// coefficient, 1 = imaginary part.
double component(const CoefficientDistribution& dist, const DrawKey& key, std::uint64_t cube,
                 std::uint64_t j, std::uint64_t comp, double stddev) {
  switch (dist.kind) {
    case DistributionKind::gaussian:
      return stddev * keyed_normal(key, cube, j, comp);
    case DistributionKind::rademacher:
      return keyed_uniform(key, {cube, j, comp}) < 0.5 ? -stddev : stddev;
    case DistributionKind::uniform:
      return stddev * std::sqrt(3.0) * (2.0 * keyed_uniform(key, {cube, j, comp}) - 1.0);
    case DistributionKind::unimodular:
    case DistributionKind::constant:
      break;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(DistributionKind kind) noexcept {
  switch (kind) {
    case DistributionKind::gaussian: return "gaussian";
    case DistributionKind::rademacher: return "rademacher";
    case DistributionKind::uniform: return "uniform";
    case DistributionKind::unimodular: return "unimodular";
    case DistributionKind::constant: return "constant";
  }
  return "unknown";
}

DistributionKind parse_distribution_kind(std::string_view name) {
  for (auto kind : {DistributionKind::gaussian, DistributionKind::rademacher, DistributionKind::uniform,
                    DistributionKind::unimodular, DistributionKind::constant}) {
    if (name == to_string(kind)) return kind;
  }
  fail(ErrorCode::invalid_argument, "unknown distribution kind '" + std::string(name) + "'");
}

std::optional<double> CoefficientDistribution::subgaussian_constant() const noexcept {
  if (kind == DistributionKind::constant || !std::isfinite(scale) || scale <= 0.0) return std::nullopt;
  return 0.5 * scale * scale;
}

void CoefficientDistribution::validate() const {
  require(std::isfinite(scale) && scale > 0.0, ErrorCode::invalid_argument,
          "distribution scale must be positive and finite");
}

double CoefficientDistribution::draw_real(const DrawKey& key, std::uint64_t cube,
                                          std::uint64_t j) const noexcept {
  switch (kind) {
    case DistributionKind::unimodular:
      return keyed_uniform(key, {cube, j, 0}) < 0.5 ? -scale : scale;
    case DistributionKind::constant:
      return scale;
    default:
      return component(*this, key, cube, j, 0, scale);
  }
}

Complex CoefficientDistribution::draw_complex(const DrawKey& key, std::uint64_t cube,
                                              std::uint64_t j) const noexcept {
  switch (kind) {
    case DistributionKind::unimodular: {
      const double theta = 2.0 * std::numbers::pi * keyed_uniform(key, {cube, j, 0});
      return std::polar(scale, theta);
    }
    case DistributionKind::constant:
      return {scale, 0.0};
    default: {
      const double sd = scale / std::sqrt(2.0);
      return {component(*this, key, cube, j, 0, sd), component(*this, key, cube, j, 1, sd)};
    }
  }
}

}  // namespace nlwlab
