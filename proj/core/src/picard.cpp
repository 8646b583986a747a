#include "nlwlab/picard.hpp"

#include <cmath>
#include <string>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"
#include "nlwlab/propagator.hpp"

namespace nlwlab {

PicardResult picard_local_solve(const FieldPair& z_at_t0, double t0, double length, int quad_points,
                                const SolverConfig& cfg, const std::optional<FieldPair>& v_init) {
  const Grid& grid = z_at_t0.grid();
  require(length > 0.0 && std::isfinite(length), ErrorCode::invalid_argument,
          "picard_local_solve: interval length must be positive");
  require(quad_points >= 3, ErrorCode::invalid_argument, "picard_local_solve needs >= 3 nodes");
  require(cfg.picard_tol > 0.0 && cfg.picard_max_iters >= 1, ErrorCode::invalid_argument,
          "picard_local_solve: invalid tolerance or iteration cap");
  if (v_init) require_same_grid(grid, v_init->grid(), "picard_local_solve");
  const double bytes = 32.0 * static_cast<double>(grid.size()) * quad_points;
  require(bytes < 2e9, ErrorCode::invalid_argument, "picard_local_solve: node storage too large");

  const int dim = cfg.power_dim == 0 ? grid.dim() : cfg.power_dim;
  const ExponentPair x = critical_pair(dim);
  const double p = nonlinearity_power(dim);
  const auto nodes = static_cast<std::size_t>(quad_points);
  const double h = length / (quad_points - 1);
  const std::size_t min_samples = std::min<std::size_t>(8, nodes);

  NonlinearForce force(grid, dim, cfg.dealias);
  PicardResult result;
  std::vector<FieldPair> z, free;
  std::vector<std::vector<double>> z_real(nodes), v_real(nodes, std::vector<double>(grid.size(), 0.0));
  NormSeries z_series;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double dt = static_cast<double>(i) * h;
    result.times.push_back(t0 + dt);
    z.push_back(linear_evolve(z_at_t0, dt));
    z_real[i].resize(grid.size());
    fft_inverse(grid, z[i].pos.coeffs(), z_real[i]);
    z_series.push(dt, lebesgue_norm(grid, z_real[i], x.r));
    free.push_back(v_init ? linear_evolve(*v_init, dt) : FieldPair(grid));
    if (v_init) fft_inverse(grid, free[i].pos.coeffs(), v_real[i]);
  }
  result.z_norm = spacetime_norm(z_series, x.q, 0.0, length, min_samples);
  result.states = free;

  const auto step = PropagatorCache::get(grid, h);
  std::vector<double> u(grid.size()), fresh(grid.size());
  SpectralField f(grid);
  double previous = 0.0;
  for (int iter = 1; iter <= cfg.picard_max_iters; ++iter) {
    FieldPair acc(grid);  // B_i of the node recursion
    NormSeries diff_series, v_series;
    std::vector<FieldPair> next;
    next.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      // F_i from the previous iterate.
      for (std::size_t k = 0; k < u.size(); ++k) u[k] = v_real[i][k] + z_real[i][k];
      if (force.evaluates_on_native_grid()) {
        force.apply_physical(u, f.coeffs());
      } else {
        force.apply((result.states[i].pos + z[i].pos).coeffs(), f.coeffs());
      }
      if (!std::isfinite(force.last_max_abs()) || force.last_max_abs() > cfg.blowup_threshold) {
        fail(ErrorCode::diverged, "picard_local_solve: iterate left the finite range at iteration " +
                                      std::to_string(iter));
      }
      FieldPair v = free[i];
      if (i > 0) {
        v -= acc;
        v.vel.add_scaled(-0.5 * h, f);
      }
      // B_{i+1} = S(h) (B_i + c_i (0, F_i)), c_0 = h/2, c_i = h.
      acc.vel.add_scaled(i == 0 ? 0.5 * h : h, f);
      linear_evolve_inplace(acc, *step);

      fft_inverse(grid, v.pos.coeffs(), fresh);
      for (std::size_t k = 0; k < u.size(); ++k) u[k] = fresh[k] - v_real[i][k];
      const double t = static_cast<double>(i) * h;
      diff_series.push(t, lebesgue_norm(grid, u, x.r));
      v_series.push(t, lebesgue_norm(grid, fresh, x.r));
      v_real[i].swap(fresh);
      next.push_back(std::move(v));
    }
    result.states = std::move(next);
    PicardIteration entry;
    entry.iteration = iter;
    entry.difference = spacetime_norm(diff_series, x.q, 0.0, length, min_samples);
    entry.ratio = iter == 1 || previous == 0.0 ? 0.0 : entry.difference / previous;
    entry.v_norm = spacetime_norm(v_series, x.q, 0.0, length, min_samples);
    entry.form_value = 2.0 * std::pow(entry.v_norm, p) + std::pow(result.z_norm, p);
    result.log.push_back(entry);
    if (!std::isfinite(entry.difference)) break;
    if (entry.difference <= cfg.picard_tol) return result;
    previous = entry.difference;
  }
  const double last = result.log.empty() ? 0.0 : result.log.back().difference;
  fail(ErrorCode::diverged, "picard_local_solve: no contraction after " +
                                std::to_string(result.log.size()) +
                                " iterations (last difference " + std::to_string(last) + ")");
}

}  // namespace nlwlab
