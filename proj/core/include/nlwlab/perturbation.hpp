#pragma once

#include "nlwlab/solver.hpp"

namespace nlwlab {

struct PerturbationReport {
  double initial_difference = 0.0;  // ||(v0 - w0, v1 - w1)||_{dot H^1 x L^2}
  double sup_difference = 0.0;      // sup_t of the same
  double x_norm_difference = 0.0;   // ||v - w||_X over the whole range
  double v_x_norm = 0.0;            // ||v||_X (needs the X exponent recorded on v)
  double error_term = 0.0;          // ||e||_{L^1_t L^2_x}, 0 if not recorded
};

/// Compares a forced solution v with an unforced solution w on the same
/// time grid. Both trajectories must keep their states.
PerturbationReport perturbation_compare(const Trajectory& v_traj, const Trajectory& w_traj, int dim);

}  // namespace nlwlab
