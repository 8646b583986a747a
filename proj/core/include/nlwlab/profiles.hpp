#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlwlab/field.hpp"
#include "nlwlab/nonlinearity.hpp"

namespace nlwlab {

/// Deterministic test data (u0, u1) in H^s x H^{s-1}.
struct ProfileSpec {
  std::string profile = "gaussian-bump";  // gaussian-bump | multi-bump | spectral-power
  double s = 0.0;
  double pos_norm = 1.0;  // target ||u0||_{H^s}
  double vel_norm = 0.0;  // target ||u1||_{H^{s-1}}
  double width = 1.0;
  std::vector<double> center;  // defaults to the origin
  int bumps = 3;
  double spread = 1.5;
  std::uint64_t seed = 0;
  double delta = 0.1;  // spectral-power decay margin
  /// Projection onto the retained band of a dealiasing rule (none keeps all
  /// non-Nyquist modes).
  DealiasRule band = DealiasRule::two_thirds;
  /// Largest tolerated |u| on the box faces relative to max |u| (bump profiles).
  double edge_tolerance = 1e-6;
};

FieldPair make_profile(const Grid& grid, const ProfileSpec& spec);

/// Radius beyond which the bump profiles are negligible (center offset plus 6 widths).
double profile_support_radius(const ProfileSpec& spec, int dim);

}  // namespace nlwlab
