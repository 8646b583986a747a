#include "nlwlab/perturbation.hpp"

#include <cmath>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"

namespace nlwlab {

namespace {

double energy_space_distance(const FieldPair& a, const FieldPair& b) {
  const FieldPair d = a - b;
  const double h1 = sobolev_norm(d.pos, 1.0, true);
  const double l2 = std::sqrt(d.vel.squared_l2());
  return std::sqrt(h1 * h1 + l2 * l2);
}

}  // namespace

PerturbationReport perturbation_compare(const Trajectory& v_traj, const Trajectory& w_traj, int dim) {
  require(!v_traj.states.empty() && v_traj.states.size() == w_traj.states.size() &&
              v_traj.times.size() == v_traj.states.size(),
          ErrorCode::shape_mismatch, "perturbation_compare: both trajectories must keep their states");
  const Grid& grid = v_traj.states.front().grid();
  const ExponentPair x = critical_pair(dim);
  PerturbationReport report;
  NormSeries diff;
  std::vector<double> real(grid.size());
  for (std::size_t i = 0; i < v_traj.states.size(); ++i) {
    require(v_traj.times[i] == w_traj.times[i], ErrorCode::shape_mismatch,
            "perturbation_compare: time grids differ");
    require_same_grid(grid, w_traj.states[i].grid(), "perturbation_compare");
    const double d = energy_space_distance(v_traj.states[i], w_traj.states[i]);
    if (i == 0) report.initial_difference = d;
    report.sup_difference = std::max(report.sup_difference, d);
    fft_inverse(grid, (v_traj.states[i].pos - w_traj.states[i].pos).coeffs(), real);
    diff.push(v_traj.times[i], lebesgue_norm(grid, real, x.r));
  }
  const double a = v_traj.times.front(), b = v_traj.times.back();
  const std::size_t min_samples = std::min<std::size_t>(8, diff.times.size());
  report.x_norm_difference = spacetime_norm(diff, x.q, a, b, min_samples);
  if (auto it = v_traj.norms.find(x.r); it != v_traj.norms.end()) {
    report.v_x_norm = spacetime_norm(it->second, x.q, a, b, min_samples);
  }
  if (!v_traj.error_l2.values.empty()) {
    report.error_term = spacetime_norm(v_traj.error_l2, 1.0, a, b, min_samples);
  }
  return report;
}

}  // namespace nlwlab
