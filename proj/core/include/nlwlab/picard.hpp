#pragma once

#include <optional>
#include <vector>

#include "nlwlab/solver.hpp"

namespace nlwlab {

struct PicardIteration {
  int iteration = 0;
  double difference = 0.0;  // ||v_{k+1} - v_k||_X
  double ratio = 0.0;       // difference / previous difference (0 for the first)
  double v_norm = 0.0;      // ||v_{k+1}||_X
  double form_value = 0.0;  // 2 a^p + ||z||_X^p with a = ||v_{k+1}||_X
};

struct PicardResult {
  std::vector<double> times;
  std::vector<FieldPair> states;
  std::vector<PicardIteration> log;
  double z_norm = 0.0;  // ||z||_X on the interval
};

/// Fixed-point iteration v <- S(t - t0) v_init - int_{t0}^t S(t - t')(0, F(v + z)(t')) dt'
/// on `quad_points` uniform nodes of [t0, t0 + length], started from v = 0
/// (plus the free evolution of v_init, if given). The Duhamel sum is the
/// composite trapezoid rule with the exact per-mode kernel, accumulated node to
/// node. `z_at_t0` is the forcing state at t0. Stops once the X-norm of the
/// difference of successive iterates is <= cfg.picard_tol; throws
/// ErrorCode::diverged after cfg.picard_max_iters iterations.
PicardResult picard_local_solve(const FieldPair& z_at_t0, double t0, double length, int quad_points,
                                const SolverConfig& cfg,
                                const std::optional<FieldPair>& v_init = std::nullopt);

}  // namespace nlwlab
