#include "nlwlab/solver.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>
#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"
#include "nlwlab/propagator.hpp"

namespace nlwlab {

int SolverConfig::step_count() const {
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::invalid_argument, "dt must be positive");
  require(t_end > 0.0 && std::isfinite(t_end), ErrorCode::invalid_argument, "t_end must be positive");
  const double ratio = t_end / dt;
  const auto steps = std::llround(ratio);
  require(steps >= 1 && std::abs(ratio - static_cast<double>(steps)) <= 1e-9 * ratio,
          ErrorCode::invalid_argument, "t_end must be an integer multiple of dt");
  require(steps < (1LL << 30), ErrorCode::invalid_argument, "too many time steps");
  return static_cast<int>(steps);
}

void SolverConfig::validate(const Grid& grid) const {
  (void)step_count();
  require(sample_stride >= 1, ErrorCode::invalid_argument, "sample_stride must be >= 1");
  require(picard_tol > 0.0, ErrorCode::invalid_argument, "picard_tol must be positive");
  require(picard_max_iters >= 1, ErrorCode::invalid_argument, "picard_max_iters must be >= 1");
  require(blowup_threshold > 0.0, ErrorCode::invalid_argument, "blowup_threshold must be positive");
  for (double r : record_r) {
    require(r >= 1.0, ErrorCode::domain, "recorded Lebesgue exponents must be >= 1");
  }
  if (finite_box_horizon) {
    require(t_end <= 0.5 * grid.length() - support_radius, ErrorCode::domain,
            "t_end exceeds the finite-box horizon L/2 - support radius");
  }
}

double Trajectory::spacetime(double q, double r, double a, double b, bool of_forcing) const {
  const auto& table = of_forcing ? z_norms : norms;
  auto it = table.find(r);
  require(it != table.end(), ErrorCode::invalid_argument,
          "no L^" + std::to_string(r) + " series recorded");
  return spacetime_norm(it->second, q, a, b);
}

namespace {

std::string norm_key(const char* prefix, double r) {
  if (std::isinf(r)) return std::string(prefix) + "Linf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sL%g", prefix, r);
  return buf;
}

}  // namespace

void Trajectory::write_jsonl(std::ostream& out) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    nlohmann::ordered_json rec;
    rec["t"] = times[i];
    rec["energy"] = energy[i];
    for (const auto& [r, s] : norms) rec[norm_key("v_", r)] = s.values[i];
    for (const auto& [r, s] : z_norms) rec[norm_key("z_", r)] = s.values[i];
    if (!error_l2.values.empty()) rec["error_L2"] = error_l2.values[i];
    out << rec.dump() << '\n';
  }
}

namespace {

class Evolver {
 public:
  Evolver(const Grid& grid, const SolverConfig& cfg, std::optional<FieldPair> z0)
      : grid_(grid),
        cfg_(cfg),
        power_dim_(cfg.power_dim == 0 ? grid.dim() : cfg.power_dim),
        force_(grid, power_dim_, cfg.dealias),
        z0_(std::move(z0)),
        zt_(grid),
        v_real_(grid.size()),
        z_real_(grid.size()),
        u_real_(grid.size()),
        f_(grid) {}

  void check_band(const FieldPair& pair, const char* what) const {
    if (!cfg_.nonlinear) return;
    const double worst =
        std::max(force_.out_of_band_fraction(pair.pos), force_.out_of_band_fraction(pair.vel));
    require(worst <= cfg_.band_tolerance, ErrorCode::domain,
            std::string(what) + " is not band-limited under the " +
                std::string(to_string(cfg_.dealias)) + " rule (relative mass " +
                std::to_string(worst) + " outside the band)");
  }

  Trajectory run(FieldPair v) {
    const int steps = cfg_.step_count();
    const auto drift = PropagatorCache::get(grid_, cfg_.dt);
    Trajectory traj;
    for (double r : cfg_.record_r) {
      traj.norms[r].r = r;
      if (z0_) traj.z_norms[r].r = r;
    }
    evaluate(v, 0.0);
    record(traj, v, 0.0);
    last_good_ = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double t = (k + 1) * cfg_.dt;
      if (cfg_.nonlinear) v.vel.add_scaled(-0.5 * cfg_.dt, f_);
      linear_evolve_inplace(v, *drift);
      evaluate(v, t);
      if (cfg_.nonlinear) v.vel.add_scaled(-0.5 * cfg_.dt, f_);
      if ((k + 1) % cfg_.sample_stride == 0 || k + 1 == steps) record(traj, v, t);
      last_good_ = t;
    }
    return traj;
  }

 private:
  bool need_v_real() const {
    return !cfg_.record_r.empty() || cfg_.record_error_term ||
           (cfg_.nonlinear && force_.evaluates_on_native_grid());
  }

  void guard(double value, double t, const char* what) const {
    if (!std::isfinite(value) || value > cfg_.blowup_threshold) {
      throw BlowupError(last_good_, std::string("blowup guard: ") + what + " reached " +
                                        std::to_string(value) + " at t = " + std::to_string(t));
    }
  }

  static double checked_max(std::span<const double> values) {
    double m = 0.0;
    bool finite = true;
    for (double a : values) {
      finite = finite && std::isfinite(a);
      m = std::max(m, std::abs(a));
    }
    return finite ? m : std::numeric_limits<double>::infinity();
  }

  // Computes the physical fields and f_ = F(v + z) at time t.
  void evaluate(const FieldPair& v, double t) {
    if (z0_) {
      zt_ = *z0_;
      if (t != 0.0) linear_evolve_inplace(zt_, PropagatorCache(grid_, t));
      fft_inverse(grid_, zt_.pos.coeffs(), z_real_);
    }
    if (need_v_real()) {
      fft_inverse(grid_, v.pos.coeffs(), v_real_);
      guard(checked_max(v_real_), t, "max |v|");
    }
    if (!cfg_.nonlinear) return;
    if (force_.evaluates_on_native_grid()) {
      if (z0_) {
        for (std::size_t i = 0; i < u_real_.size(); ++i) u_real_[i] = v_real_[i] + z_real_[i];
        force_.apply_physical(u_real_, f_.coeffs());
      } else {
        force_.apply_physical(v_real_, f_.coeffs());
      }
    } else if (z0_) {
      force_.apply((v.pos + zt_.pos).coeffs(), f_.coeffs());
    } else {
      force_.apply(v.pos.coeffs(), f_.coeffs());
    }
    guard(force_.last_max_abs(), t, "max |u|");
    guard(f_.max_abs(), t, "max |F(u)^|");
  }

  void record(Trajectory& traj, const FieldPair& v, double t) {
    traj.times.push_back(t);
    double pot = 0.0;
    if (cfg_.nonlinear && !force_.evaluates_on_native_grid()) {
      pot = force_.potential(v.pos.coeffs());
    } else if (cfg_.nonlinear) {
      for (double a : v_real_) pot += potential_density(power_dim_, a);
      pot *= grid_.cell_volume();
    }
    const double e = linear_energy(v) + pot;
    guard(e, t, "energy");
    traj.energy.push_back(e);
    for (auto& [r, series] : traj.norms) series.push(t, lebesgue_norm(grid_, v_real_, r));
    for (auto& [r, series] : traj.z_norms) series.push(t, lebesgue_norm(grid_, z_real_, r));
    if (cfg_.record_error_term) {
      double acc = 0.0;
      for (std::size_t i = 0; i < v_real_.size(); ++i) {
        const double u = v_real_[i] + (z0_ ? z_real_[i] : 0.0);
        const double diff = nonlinearity(power_dim_, u) - nonlinearity(power_dim_, v_real_[i]);
        acc += diff * diff;
      }
      traj.error_l2.push(t, std::sqrt(acc * grid_.cell_volume()));
    }
    if (cfg_.keep_states) traj.states.push_back(v);
  }

  Grid grid_;
  const SolverConfig& cfg_;
  int power_dim_;
  NonlinearForce force_;
  std::optional<FieldPair> z0_;
  FieldPair zt_;
  std::vector<double> v_real_, z_real_, u_real_;
  SpectralField f_;
  double last_good_ = 0.0;
};

}  // namespace

Trajectory strang_evolve(const FieldPair& initial, const SolverConfig& cfg) {
  cfg.validate(initial.grid());
  Evolver ev(initial.grid(), cfg, std::nullopt);
  ev.check_band(initial, "initial data");
  return ev.run(initial);
}

Trajectory solve_v_equation(const FieldPair& z_initial, const FieldPair& v_init,
                            const SolverConfig& cfg) {
  require_same_grid(z_initial.grid(), v_init.grid(), "solve_v_equation");
  cfg.validate(v_init.grid());
  Evolver ev(v_init.grid(), cfg, z_initial);
  ev.check_band(z_initial, "forcing data");
  ev.check_band(v_init, "initial data");
  return ev.run(v_init);
}

double sup_l2_difference(const Trajectory& a, const Trajectory& b, bool positions_only) {
  require(a.states.size() == b.states.size() && !a.states.empty(), ErrorCode::shape_mismatch,
          "sup_l2_difference: trajectories must store the same number of states");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    require(std::abs(a.times[i] - b.times[i]) <= 1e-12 * std::max(1.0, std::abs(a.times[i])),
            ErrorCode::shape_mismatch, "sup_l2_difference: time grids differ");
    double d = (a.states[i].pos - b.states[i].pos).squared_l2();
    if (!positions_only) d += (a.states[i].vel - b.states[i].vel).squared_l2();
    worst = std::max(worst, std::sqrt(d));
  }
  return worst;
}

}  // namespace nlwlab
