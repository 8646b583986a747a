#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "nlwlab/field.hpp"
#include "nlwlab/nonlinearity.hpp"
#include "nlwlab/spacetime.hpp"

namespace nlwlab {

struct SolverConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  DealiasRule dealias = DealiasRule::two_thirds;
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  /// Series and states are recorded every `sample_stride` steps (and at t_end).
  int sample_stride = 1;
  /// false switches the kicks off (pure linear flow).
  bool nonlinear = true;
  /// Dimension whose exponent F uses; 0 means the grid dimension.
  int power_dim = 0;
  /// Spatial exponents r whose ||.||_{L^r} series are recorded for v (and z).
  std::vector<double> record_r;
  bool keep_states = false;
  /// Record ||F(v + z) - F(v)||_{L^2} (the error term of the forced equation).
  bool record_error_term = false;
  /// Refuse horizons beyond L/2 - support_radius (periodic wraparound).
  bool finite_box_horizon = false;
  double support_radius = 0.0;
  double blowup_threshold = 1e12;
  /// Largest tolerated relative L^2 mass outside the dealiasing band.
  double band_tolerance = 1e-8;

  int step_count() const;
  void validate(const Grid& grid) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FieldPair> states;
  /// Discrete energy of v (the Hamiltonian the splitting conserves).
  std::vector<double> energy;
  /// Spatial L^r series of v and of the forcing z, keyed by r.
  std::map<double, NormSeries> norms;
  std::map<double, NormSeries> z_norms;
  NormSeries error_l2;

  /// L^q_t L^r_x norm of v (or z) over [a, b].
  double spacetime(double q, double r, double a, double b, bool of_forcing = false) const;
  /// One JSON object per recorded time: t, energy and the recorded norms.
  void write_jsonl(std::ostream& out) const;
};

/// Kick-drift-kick splitting of the unforced equation.
Trajectory strang_evolve(const FieldPair& initial, const SolverConfig& cfg);

/// The same splitting for d_t^2 v - Delta v + F(v + z) = 0 with
/// z(t) = S(t) z_initial regenerated on the fly.
Trajectory solve_v_equation(const FieldPair& z_initial, const FieldPair& v_init,
                            const SolverConfig& cfg);

/// sup_t ||a(t) - b(t)||_{L^2} over the stored states (times must agree).
double sup_l2_difference(const Trajectory& a, const Trajectory& b, bool positions_only = true);

}  // namespace nlwlab
