#include "nlwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"
#include "nlwlab/picard.hpp"
#include "nlwlab/propagator.hpp"
#include "nlwlab/randomize.hpp"

namespace nlwlab {

using ojson = nlohmann::ordered_json;

namespace {

// JSON has no infinity; encode non-finite values as strings.
ojson number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ojson numbers(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

PlotData tail_plot(const std::string& name, const TailFit& fit) {
  PlotData p{name, "lambda^2", "log P(X > lambda)", {}};
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
    if (fit.survival[i] > 0.0) p.points.push_back({fit.lambdas[i] * fit.lambdas[i], std::log(fit.survival[i])});
  }
  return p;
}

SolverConfig with_exponents(SolverConfig cfg, const std::vector<double>& rs) {
  for (double r : rs) {
    if (std::find(cfg.record_r.begin(), cfg.record_r.end(), r) == cfg.record_r.end()) cfg.record_r.push_back(r);
  }
  return cfg;
}

std::string level_name(const char* prefix, std::size_t level) {
  return std::string(prefix) + std::to_string(level);
}

}  // namespace

ojson Verdict::to_json() const {
  ojson j;
  j["experiment"] = experiment;
  j["parameters"] = parameters;
  j["statistics"] = statistics;
  j["pass"] = pass;
  return j;
}

void PlotData::write(std::ostream& out) const {
  out << "# " << name << "\n# " << x_label << "  " << y_label << "\n";
  char buf[64];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", pt[0], pt[1]);
    out << buf;
  }
}

ojson describe(const EnsembleSpec& spec) {
  ojson j;
  const Grid& g = spec.base->grid();
  j["grid"] = {{"dim", g.dim()}, {"points", g.points()}, {"length", g.length()}};
  j["samples"] = spec.n_samples;
  j["master_seed"] = spec.master_seed;
  j["first_index"] = spec.first_index;
  j["distribution"] = {{"kind", std::string(to_string(spec.dist.kind))}, {"scale", spec.dist.scale}};
  j["cutoff"] = std::string(to_string(spec.cutoff));
  j["s"] = spec.s;
  j["pipeline"] = std::string(to_string(spec.pipeline));
  j["base_hs_norm"] = pair_sobolev_norm(*spec.base, spec.s, false);
  if (spec.pipeline == Pipeline::full_solve) {
    j["solver"] = {{"dt", spec.solver.dt},
                   {"dealias", std::string(to_string(spec.solver.dealias))},
                   {"sample_stride", spec.solver.sample_stride}};
  }
  return j;
}

ojson describe(const TailFit& fit) {
  ojson j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["samples"] = fit.sample_count;
  j["quantile_range"] = {fit.q_low, fit.q_high};
  return j;
}

// ---------------------------------------------------------------------------

ExperimentResult strichartz_tail_experiment(const StrichartzSpec& spec, int workers) {
  EnsembleSpec ens = spec.ensemble;
  ens.pipeline = Pipeline::linear_only;
  ens.norms = {spec.norm};
  ens.validate();
  const Grid& grid = ens.base->grid();
  const std::string column = "z_" + spec.norm.name;

  ExperimentResult result;
  Verdict& v = result.verdict;
  v.experiment = "strichartz-mc";
  v.parameters = describe(ens);
  v.parameters["q"] = number(spec.norm.q);
  v.parameters["r"] = number(spec.norm.r);
  v.parameters["interval"] = {spec.norm.t0, spec.norm.t1};
  v.parameters["admissible"] = spec.norm.admissible;
  if (spec.norm.admissible) v.parameters["gamma"] = spec.norm.gamma;
  v.parameters["time_samples"] = ens.time_samples;

  SampleTable table = run_ensemble(ens, workers);
  const std::vector<double> x = table.column(column);
  const TailFit fit = tail_fit(x, spec.q_low, spec.q_high);
  v.statistics["tail"] = describe(fit);
  result.plots.push_back(tail_plot("tail", fit));
  bool pass = fit.slope < 0.0 && fit.r2 >= spec.min_r2;

  // Exceedance of |I|^gamma (||u0||_{L^2} + ||u1||_{H^{-1}}).
  const double length = spec.norm.t1 - spec.norm.t0;
  const double base_size = std::sqrt(ens.base->pos.squared_l2()) + sobolev_norm(ens.base->vel, -1.0, false);
  ojson exceed = ojson::array();
  for (double gamma : spec.gammas) {
    const double lambda = std::pow(length, gamma) * base_size;
    const auto count = std::count_if(x.begin(), x.end(), [&](double s) { return s > lambda; });
    exceed.push_back({{"gamma", gamma}, {"threshold", lambda},
                      {"frequency", static_cast<double>(count) / static_cast<double>(x.size())}});
  }
  v.statistics["exceedance"] = exceed;
  v.statistics["median"] = median(x);

  if (spec.hs_tail) {
    const TailFit hs = tail_fit(table.column("hs_norm"), spec.q_low, spec.q_high);
    v.statistics["hs_tail"] = describe(hs);
    result.plots.push_back(tail_plot("hs_tail", hs));
  }

  if (spec.compare_halved) {
    EnsembleSpec half = ens;
    half.base = 0.5 * *ens.base;
    half.master_seed = ens.master_seed + 1;
    SampleTable half_table = run_ensemble(half, workers);
    const TailFit hfit = tail_fit(half_table.column(column), spec.q_low, spec.q_high);
    const double ratio = hfit.slope / fit.slope;
    v.statistics["halved_tail"] = describe(hfit);
    v.statistics["halved_master_seed"] = half.master_seed;
    v.statistics["slope_ratio"] = ratio;
    v.statistics["slope_ratio_expected"] = 4.0;
    const bool ratio_ok = std::abs(ratio / 4.0 - 1.0) <= spec.slope_ratio_tolerance;
    v.statistics["slope_ratio_pass"] = ratio_ok;
    pass = pass && ratio_ok;
    result.plots.push_back(tail_plot("tail_halved", hfit));
    SampleTable renamed("samples_halved", half_table.columns());
    for (auto& r : half_table.rows()) renamed.add(r);
    result.tables.push_back(std::move(renamed));
  }
  (void)grid;
  v.pass = pass;
  result.tables.insert(result.tables.begin(), std::move(table));
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult khintchine_experiment(const KhintchineSpec& spec, int workers) {
  const CutoffFamily cutoff(spec.cutoff, spec.grid);
  std::vector<Complex> c(cutoff.cube_count());
  const int d = spec.grid.dim();
  for (std::size_t id = 0; id < c.size(); ++id) {
    const LatticeIndex m = cutoff.cube_center(id);
    double m2 = 0.0;
    for (int a = 0; a < d; ++a) m2 += static_cast<double>(m[a]) * m[a];
    c[id] = std::exp(-0.5 * m2 / (spec.coefficient_width * spec.coefficient_width));
  }
  const KhintchineReport rep =
      khintchine_verdict(c, cutoff, spec.dist, spec.p_list, spec.n_samples, spec.master_seed, workers);

  ExperimentResult result;
  Verdict& v = result.verdict;
  v.experiment = "khintchine";
  v.parameters["grid"] = {{"dim", d}, {"points", spec.grid.points()}, {"length", spec.grid.length()}};
  v.parameters["cutoff"] = std::string(to_string(spec.cutoff));
  v.parameters["distribution"] = {{"kind", std::string(to_string(spec.dist.kind))}, {"scale", spec.dist.scale}};
  v.parameters["coefficient_width"] = spec.coefficient_width;
  v.parameters["p"] = numbers(spec.p_list);
  v.parameters["samples"] = spec.n_samples;
  v.parameters["master_seed"] = spec.master_seed;
  v.statistics["moments"] = numbers(rep.moments);
  v.statistics["ratios"] = numbers(rep.ratios);
  v.statistics["coefficient_l2"] = rep.coefficient_norm;
  v.statistics["moment_slope"] = rep.moment_slope;
  v.statistics["ratio_slope"] = rep.ratio_slope;
  v.statistics["max_ratio_over_r2"] = rep.max_ratio_over_r2;
  v.statistics["active_cubes"] = rep.active_cubes;
  v.statistics["slope_limit"] = kKhintchineSlopeLimit;
  v.statistics["ratio_limit"] = kKhintchineRatioLimit;
  v.pass = rep.pass && rep.active_cubes >= spec.min_active_cubes;

  SampleTable table("moments", {"p", "moment", "ratio"});
  PlotData plot{"moments", "log p", "log M_p", {}};
  for (std::size_t k = 0; k < rep.p.size(); ++k) {
    table.add({k, "ok", {rep.p[k], rep.moments[k], rep.ratios[k]}, ""});
    plot.points.push_back({std::log(rep.p[k]), std::log(rep.moments[k])});
  }
  result.tables.push_back(std::move(table));
  result.plots.push_back(std::move(plot));
  return result;
}

// ---------------------------------------------------------------------------

namespace {

// Pointwise-in-time majorant of |d/dt E(v)^{1/2}| (C = 1).
double differential_majorant(int dim, double sqrt_e, double za, double zb) {
  if (dim == 4) return za * za * za + zb * sqrt_e;                       // ||z||_6^3 + ||z||_inf E^{1/2}
  return std::pow(za, 7.0 / 3.0) + zb * std::pow(sqrt_e, 4.0 / 5.0);  // ||z||_{14/3}^{7/3} + ||z||_10 E^{2/5}
}

struct TwoBatch {
  double fit = 0.0;
  double check = 0.0;
  bool pass = false;
};

TwoBatch two_batch(const std::vector<double>& first, const std::vector<double>& second, double safety) {
  TwoBatch t{max_of(first), max_of(second), false};
  t.pass = t.check <= safety * t.fit;
  return t;
}

}  // namespace

ExperimentResult energy_bound_experiment(const EnergyBoundSpec& spec, int workers) {
  EnsembleSpec ens = spec.ensemble;
  ens.pipeline = Pipeline::full_solve;
  ens.validate();
  const Grid& grid = ens.base->grid();
  const int d = grid.dim();
  const std::vector<double> rs = energy_bound_exponents(d);
  const ExponentPair x = critical_pair(d);
  SolverConfig cfg = with_exponents(ens.solver, {x.r, rs[0], rs[1]});
  cfg.t_end = spec.horizon;
  cfg.validate(grid);
  const CutoffFamily cutoff(ens.cutoff, grid);

  const std::vector<std::string> columns{"sup_sqrt_energy", "rhs", "ratio", "z_x_norm", "z_l1_norm",
                                         "differential_ratio"};
  std::vector<SampleTable::Row> rows(ens.n_samples);
  std::vector<double> energy_curve_t, energy_curve_e;
  parallel_for(ens.n_samples, workers, [&](std::size_t k) {
    SampleTable::Row row;
    row.index = ens.first_index + k;
    const FieldPair data = randomized_sample(ens, cutoff, row.index);
    try {
      const Trajectory traj = solve_v_equation(data, FieldPair(grid), cfg);
      const ForcingNorms fn = forcing_norms(traj, spec.horizon, d);
      const double rhs = energy_bound_rhs(fn, d);
      double sup = 0.0;
      for (double e : traj.energy) sup = std::max(sup, std::sqrt(std::max(0.0, e)));
      const double ratio = rhs > 0.0 ? sup / rhs : (sup == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      double diff_ratio = 0.0;
      const auto& za = traj.z_norms.at(rs[0]).values;
      const auto& zb = traj.z_norms.at(rs[1]).values;
      for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        const double s0 = std::sqrt(std::max(0.0, traj.energy[i]));
        const double s1 = std::sqrt(std::max(0.0, traj.energy[i + 1]));
        const double rate = std::abs(s1 - s0) / (traj.times[i + 1] - traj.times[i]);
        const double g = 0.5 * (differential_majorant(d, s0, za[i], zb[i]) +
                                differential_majorant(d, s1, za[i + 1], zb[i + 1]));
        if (g > 0.0) diff_ratio = std::max(diff_ratio, rate / g);
      }
      row.values = {sup, rhs, ratio, *fn.x_norm, d == 4 ? *fn.l1_linf : *fn.l1_l10, diff_ratio};
      if (k == 0) {
        energy_curve_t = traj.times;
        energy_curve_e = traj.energy;
      }
    } catch (const BlowupError& e) {
      row.status = "diverged";
      row.note = e.what();
      row.values.assign(columns.size(), std::nan(""));
    }
    rows[k] = std::move(row);
  });
  SampleTable table("samples", columns);
  for (auto& r : rows) table.add(std::move(r));

  const std::size_t half = ens.n_samples / 2;
  std::vector<double> r1, r2, d1, d2;
  for (std::size_t k = 0; k < table.rows().size(); ++k) {
    const auto& row = table.rows()[k];
    if (row.status != "ok") continue;
    (k < half ? r1 : r2).push_back(row.values[2]);
    (k < half ? d1 : d2).push_back(row.values[5]);
  }
  const TwoBatch energy_check = two_batch(r1, r2, spec.safety);
  const TwoBatch diff_check = two_batch(d1, d2, spec.safety);
  const double diverged = static_cast<double>(table.diverged_count()) / static_cast<double>(ens.n_samples);

  ExperimentResult result;
  Verdict& v = result.verdict;
  v.experiment = "energy-bound";
  v.parameters = describe(ens);
  v.parameters["horizon"] = spec.horizon;
  v.parameters["safety"] = spec.safety;
  v.parameters["rhs_form"] = d == 4 ? "||z||_X^3 exp(||z||_{L^1_t L^inf_x})" : "||z||_X^{7/3} + ||z||_{L^1_t L^10_x}^5";
  v.statistics["batch_sizes"] = {r1.size(), r2.size()};
  v.statistics["fitted_constant"] = number(energy_check.fit);
  v.statistics["batch2_max_ratio"] = number(energy_check.check);
  v.statistics["energy_bound_pass"] = energy_check.pass;
  if (spec.differential_check) {
    v.statistics["differential_fitted_constant"] = number(diff_check.fit);
    v.statistics["differential_batch2_max"] = number(diff_check.check);
    v.statistics["differential_pass"] = diff_check.pass;
  }
  v.statistics["diverged_fraction"] = diverged;
  v.pass = energy_check.pass && (!spec.differential_check || diff_check.pass) &&
           diverged <= spec.max_diverged_fraction;

  PlotData ratio_plot{"ratio", "sample index", "sup E^{1/2} / rhs", {}};
  for (const auto& row : table.rows()) {
    if (row.status == "ok") ratio_plot.points.push_back({static_cast<double>(row.index), row.values[2]});
  }
  PlotData energy_plot{"energy_sample0", "t", "E(v)", {}};
  for (std::size_t i = 0; i < energy_curve_t.size(); ++i) energy_plot.points.push_back({energy_curve_t[i], energy_curve_e[i]});
  result.plots = {ratio_plot, energy_plot};
  result.tables.push_back(std::move(table));
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult smalldata_experiment(const SmallDataSpec& spec, int workers) {
  EnsembleSpec ens = spec.ensemble;
  ens.pipeline = Pipeline::full_solve;
  ens.validate();
  require(!spec.eps.empty(), ErrorCode::invalid_argument, "smalldata: empty eps list");
  for (std::size_t l = 0; l < spec.eps.size(); ++l) {
    require(spec.eps[l] >= 0.0, ErrorCode::invalid_argument, "smalldata: eps must be >= 0");
    if (l > 0) require(spec.eps[l] < spec.eps[l - 1], ErrorCode::invalid_argument, "smalldata: eps must decrease");
  }
  const Grid& grid = ens.base->grid();
  const int d = grid.dim();
  const ExponentPair x = critical_pair(d);
  SolverConfig cfg = with_exponents(ens.solver, {x.r});
  cfg.t_end = spec.horizon;
  cfg.validate(grid);
  const CutoffFamily cutoff(ens.cutoff, grid);
  const double power = nonlinearity_power(d) + 1.0;

  const std::size_t levels = spec.eps.size();
  std::vector<double> xn(levels * ens.n_samples, 0.0), tail(levels * ens.n_samples, 0.0);
  std::vector<std::string> notes(ens.n_samples);
  std::vector<std::uint8_t> bad(ens.n_samples, 0);
  parallel_for(levels * ens.n_samples, workers, [&](std::size_t task) {
    const std::size_t l = task / ens.n_samples, k = task % ens.n_samples;
    if (spec.eps[l] == 0.0) return;
    const FieldPair data = randomized_sample(ens, cutoff, ens.first_index + k, spec.eps[l]);
    try {
      const Trajectory traj = solve_v_equation(data, FieldPair(grid), cfg);
      const double total = traj.spacetime(x.q, x.r, 0.0, spec.horizon);
      xn[task] = total;
      tail[task] = total > 0.0 ? traj.spacetime(x.q, x.r, 0.5 * spec.horizon, spec.horizon) / total : 0.0;
    } catch (const BlowupError& e) {
      xn[task] = tail[task] = std::nan("");
      bad[k] = 1;
      notes[k] = e.what();
    }
  });

  std::vector<std::string> columns;
  for (std::size_t l = 0; l < levels; ++l) columns.push_back(level_name("x_norm_eps", l));
  for (std::size_t l = 0; l < levels; ++l) columns.push_back(level_name("trailing_fraction_eps", l));
  SampleTable table("samples", columns);
  for (std::size_t k = 0; k < ens.n_samples; ++k) {
    SampleTable::Row row{ens.first_index + k, bad[k] ? "diverged" : "ok", {}, notes[k]};
    for (std::size_t l = 0; l < levels; ++l) row.values.push_back(xn[l * ens.n_samples + k]);
    for (std::size_t l = 0; l < levels; ++l) row.values.push_back(tail[l * ens.n_samples + k]);
    table.add(std::move(row));
  }

  std::vector<double> medians, tail_medians, maxima;
  for (std::size_t l = 0; l < levels; ++l) {
    const auto col = table.column(level_name("x_norm_eps", l));
    medians.push_back(col.empty() ? std::nan("") : median(col));
    maxima.push_back(max_of(col));
    const auto tc = table.column(level_name("trailing_fraction_eps", l));
    tail_medians.push_back(tc.empty() ? std::nan("") : median(tc));
  }
  bool pass = table.diverged_count() == 0;
  ojson ratios = ojson::array();
  for (std::size_t l = 0; l + 1 < levels; ++l) {
    if (spec.eps[l + 1] == 0.0) continue;
    const double expected = std::pow(spec.eps[l] / spec.eps[l + 1], power);
    const double ratio = medians[l] / medians[l + 1];
    const bool ok = ratio >= spec.band_low * expected && ratio <= spec.band_high * expected;
    pass = pass && ok;
    ratios.push_back({{"from", spec.eps[l]}, {"to", spec.eps[l + 1]}, {"ratio", number(ratio)},
                      {"expected", expected}, {"pass", ok}});
  }
  const bool small = maxima.back() < spec.eta;
  pass = pass && small;

  ExperimentResult result;
  Verdict& v = result.verdict;
  v.experiment = "smalldata";
  v.parameters = describe(ens);
  v.parameters["eps"] = numbers(spec.eps);
  v.parameters["horizon"] = spec.horizon;
  v.parameters["eta"] = spec.eta;
  v.parameters["band"] = {spec.band_low, spec.band_high};
  v.statistics["median_x_norm"] = numbers(medians);
  v.statistics["max_x_norm"] = numbers(maxima);
  v.statistics["halving_ratios"] = ratios;
  v.statistics["smallest_eps_below_eta"] = small;
  v.statistics["trailing_window_fraction_median"] = numbers(tail_medians);
  v.statistics["diverged"] = table.diverged_count();
  v.pass = pass;
  PlotData plot{"median_x_norm", "log eps", "log median ||v||_X", {}};
  for (std::size_t l = 0; l < levels; ++l) {
    if (spec.eps[l] > 0.0 && medians[l] > 0.0) plot.points.push_back({std::log(spec.eps[l]), std::log(medians[l])});
  }
  result.plots.push_back(std::move(plot));
  result.tables.push_back(std::move(table));
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult continuity_probe(const ContinuitySpec& spec, int workers) {
  EnsembleSpec ens = spec.ensemble;
  ens.validate();
  require(ens.cutoff == CutoffKind::sharp, ErrorCode::invalid_argument,
          "continuity probe requires the sharp cutoff");
  require(ens.dist.symmetric(), ErrorCode::invalid_argument,
          "continuity probe requires a symmetric coefficient distribution");
  require(!spec.etas.empty(), ErrorCode::invalid_argument, "continuity probe: empty eta list");
  const Grid& grid = ens.base->grid();
  require_same_grid(grid, spec.rho.grid(), "continuity_probe");
  const double rho_norm = pair_sobolev_norm(spec.rho, ens.s, false);
  require(rho_norm > 0.0, ErrorCode::invalid_argument, "continuity probe: zero perturbation profile");
  const FieldPair rho = (1.0 / rho_norm) * spec.rho;
  SolverConfig cfg = ens.solver;
  cfg.t_end = spec.horizon;
  cfg.keep_states = true;
  cfg.record_r.clear();
  cfg.validate(grid);
  const CutoffFamily cutoff(ens.cutoff, grid);
  const std::size_t levels = spec.etas.size();
  const bool linear = ens.pipeline == Pipeline::linear_only;
  if (linear) cfg.nonlinear = false;

  std::vector<double> diff(levels * ens.n_samples, 0.0);
  std::vector<std::string> notes(ens.n_samples);
  std::vector<std::uint8_t> bad(ens.n_samples, 0);
  parallel_for(ens.n_samples, workers, [&](std::size_t k) {
    const std::uint64_t index = ens.first_index + k;
    const RandomizedDraw draw = RandomizedDraw::generate({ens.master_seed, index}, ens.dist, cutoff);
    const FieldPair data = randomize_pair(*ens.base, cutoff, ens.dist, draw, !ens.allow_uncertified);
    const FieldPair rho_w = randomize_pair(rho, cutoff, ens.dist, draw, !ens.allow_uncertified);
    try {
      const Trajectory ref = strang_evolve(data, cfg);
      for (std::size_t l = 0; l < levels; ++l) {
        const Trajectory pert = strang_evolve(data + spec.etas[l] * rho_w, cfg);
        double sup = 0.0;
        for (std::size_t i = 0; i < ref.states.size(); ++i) {
          sup = std::max(sup, pair_sobolev_norm(pert.states[i] - ref.states[i], ens.s, false));
        }
        diff[l * ens.n_samples + k] = sup;
      }
    } catch (const BlowupError& e) {
      bad[k] = 1;
      notes[k] = e.what();
      for (std::size_t l = 0; l < levels; ++l) diff[l * ens.n_samples + k] = std::nan("");
    }
  });

  std::vector<std::string> columns;
  for (std::size_t l = 0; l < levels; ++l) columns.push_back(level_name("sup_difference_eta", l));
  SampleTable table("samples", columns);
  for (std::size_t k = 0; k < ens.n_samples; ++k) {
    SampleTable::Row row{ens.first_index + k, bad[k] ? "diverged" : "ok", {}, notes[k]};
    for (std::size_t l = 0; l < levels; ++l) row.values.push_back(diff[l * ens.n_samples + k]);
    table.add(std::move(row));
  }
  std::vector<double> medians;
  for (std::size_t l = 0; l < levels; ++l) {
    const auto col = table.column(level_name("sup_difference_eta", l));
    medians.push_back(col.empty() ? std::nan("") : median(col));
  }
  // Order the levels by decreasing eta for the monotonicity check.
  std::vector<std::size_t> order(levels);
  for (std::size_t l = 0; l < levels; ++l) order[l] = l;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return spec.etas[a] > spec.etas[b]; });
  bool monotone = true;
  for (std::size_t i = 1; i < levels; ++i) monotone = monotone && medians[order[i]] <= medians[order[i - 1]];
  const double final_ratio = medians[order.back()] / medians[order.front()];
  const bool shrinks = final_ratio <= spec.final_fraction;

  ExperimentResult result;
  Verdict& v = result.verdict;
  v.experiment = "continuity";
  v.parameters = describe(ens);
  v.parameters["etas"] = numbers(spec.etas);
  v.parameters["horizon"] = spec.horizon;
  v.parameters["coupling"] =
      "pairs share coefficients: randomize(base) and randomize(base + eta rho) with the same draw";
  v.statistics["median_sup_difference"] = numbers(medians);
  v.statistics["monotone_nonincreasing"] = monotone;
  v.statistics["smallest_over_largest"] = number(final_ratio);
  v.statistics["diverged"] = table.diverged_count();
  v.pass = monotone && shrinks && table.diverged_count() == 0;
  PlotData plot{"median_difference", "eta", "median sup_t difference", {}};
  for (std::size_t l : order) plot.points.push_back({spec.etas[l], medians[l]});
  result.plots.push_back(std::move(plot));
  result.tables.push_back(std::move(table));
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult calibrate_tau(const CalibrationSpec& spec, int workers) {
  EnsembleSpec ens = spec.ensemble;
  ens.validate();
  const Grid& grid = ens.base->grid();
  require_same_grid(grid, spec.v_shape.grid(), "calibrate_tau");
  const CutoffFamily cutoff(ens.cutoff, grid);
  const FieldPair z_shape = randomized_sample(ens, cutoff, ens.first_index);
  const double z_size = pair_sobolev_norm(z_shape, ens.s, false);
  const double v_energy = linear_energy(spec.v_shape);
  require(z_size > 0.0 && v_energy > 0.0, ErrorCode::invalid_argument, "calibrate_tau: zero data");
  std::vector<double> taus = spec.taus;
  std::sort(taus.begin(), taus.end(), std::greater<>());

  const std::size_t na = spec.energy_levels.size(), nk = spec.forcing_levels.size();
  std::vector<double> found(na * nk, 0.0);
  std::vector<int> iterations(na * nk, 0);
  parallel_for(na * nk, workers, [&](std::size_t task) {
    const double a = spec.energy_levels[task / nk];
    const double kf = spec.forcing_levels[task % nk];
    const FieldPair z = (kf / z_size) * z_shape;
    const FieldPair v0 = std::sqrt(a / v_energy) * spec.v_shape;
    for (double tau : taus) {
      try {
        const PicardResult res = picard_local_solve(z, 0.0, tau, spec.quad_points, ens.solver, v0);
        found[task] = tau;
        iterations[task] = static_cast<int>(res.log.size());
        return;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::diverged) throw;
      }
    }
  });

  TauTable table;
  SampleTable samples("calibration", {"A", "K", "tau", "iterations"});
  bool all_found = true;
  for (std::size_t t = 0; t < na * nk; ++t) {
    const double a = spec.energy_levels[t / nk], kf = spec.forcing_levels[t % nk];
    samples.add({t, found[t] > 0.0 ? "ok" : "diverged", {a, kf, found[t], static_cast<double>(iterations[t])}, ""});
    if (found[t] > 0.0) {
      table.add({a, kf, found[t]});
    } else {
      all_found = false;
    }
  }
  std::ostringstream js;
  table.write_json(js);

  ExperimentResult result;
  Verdict& v = result.verdict;
  v.experiment = "calibrate-tau";
  v.parameters = describe(ens);
  v.parameters["energy_levels"] = numbers(spec.energy_levels);
  v.parameters["forcing_levels"] = numbers(spec.forcing_levels);
  v.parameters["taus"] = numbers(taus);
  v.parameters["quad_points"] = spec.quad_points;
  v.parameters["picard_tol"] = ens.solver.picard_tol;
  v.statistics["entries"] = table.entries().size();
  v.statistics["all_levels_calibrated"] = all_found;
  v.pass = all_found;
  result.files["tau_table.json"] = js.str();
  result.tables.push_back(std::move(samples));
  return result;
}

}  // namespace nlwlab
