#include "nlwlab_tools/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"
#include "nlwlab/propagator.hpp"
#include "nlwlab/randomize.hpp"

namespace nlwlab::tools {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

ojson number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
}

std::vector<std::string> manifest_for(const EnsembleSpec& spec, std::uint64_t seed_offset = 0) {
  std::vector<std::string> lines;
  lines.reserve(spec.n_samples);
  for (std::size_t k = 0; k < spec.n_samples; ++k) {
    lines.push_back(draw_manifest_record({spec.master_seed + seed_offset, spec.first_index + k}, spec.dist,
                                         spec.cutoff));
  }
  return lines;
}

FieldProvenance provenance_of(const RunConfig& cfg, const EnsembleSpec* spec, std::optional<std::uint64_t> index) {
  FieldProvenance p;
  p.s = cfg.resolved.has_table("data") ? std::optional<double>(cfg.resolved.tables.at("data").get_double("s"))
                                       : std::nullopt;
  p.extra["experiment"] = cfg.experiment;
  if (spec != nullptr && index) {
    p.seed = spec->master_seed;
    p.cutoff_kind = std::string(to_string(spec->cutoff));
    p.extra["sample_index"] = std::to_string(*index);
    p.extra["distribution"] = std::string(to_string(spec->dist.kind));
    p.extra["scale"] = fmt_g(spec->dist.scale);
  }
  return p;
}

// --- experiments ------------------------------------------------------------

RunArtifacts run_randomize(const RunConfig& cfg) {
  const EnsembleSpec spec = cfg.ensemble();
  const bool write = cfg.experiment_table().get_bool("write_fields");
  const Grid& grid = spec.base->grid();
  const CutoffFamily cutoff(spec.cutoff, grid);
  const double base_norm = pair_sobolev_norm(*spec.base, spec.s, false);
  spec.validate();

  std::vector<FieldPair> samples(spec.n_samples, FieldPair(grid));
  std::vector<double> residue(spec.n_samples, 0.0);
  parallel_for(spec.n_samples, cfg.workers, [&](std::size_t k) {
    samples[k] = randomized_sample(spec, cutoff, spec.first_index + k);
    residue[k] = std::max(imaginary_residue(samples[k].pos), imaginary_residue(samples[k].vel));
  });

  RunArtifacts art;
  SampleTable table("samples", {"hs_norm", "ratio_to_base", "imaginary_residue"});
  double worst = 0.0;
  for (std::size_t k = 0; k < spec.n_samples; ++k) {
    const double hs = pair_sobolev_norm(samples[k], spec.s, false);
    table.add({spec.first_index + k, "ok", {hs, base_norm > 0.0 ? hs / base_norm : 0.0, residue[k]}, ""});
    worst = std::max(worst, residue[k]);
    if (write) {
      char name[64];
      std::snprintf(name, sizeof name, "fields/sample_%06llu.nlwp",
                    static_cast<unsigned long long>(spec.first_index + k));
      art.fields.push_back({name, samples[k], provenance_of(cfg, &spec, spec.first_index + k)});
    }
  }
  Verdict& v = art.result.verdict;
  v.experiment = "randomize";
  v.parameters = describe(spec);
  v.statistics["cubes"] = cutoff.cube_count();
  v.statistics["max_imaginary_residue"] = worst;
  const auto hs = table.column("hs_norm");
  v.statistics["median_hs_norm"] = median(hs);
  v.pass = worst <= 1e-12;
  art.result.tables.push_back(std::move(table));
  art.manifest = manifest_for(spec);
  return art;
}

RunArtifacts run_linear_evolve(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  const double t = e.get_double("t");
  RunArtifacts art;
  FieldPair data = cfg.data_pair();
  std::optional<EnsembleSpec> spec;
  if (e.get_bool("randomize")) {
    spec = cfg.ensemble();
    spec->n_samples = 1;
    spec->first_index = static_cast<std::uint64_t>(e.get_int("index"));
    const CutoffFamily cutoff(spec->cutoff, data.grid());
    data = randomized_sample(*spec, cutoff, spec->first_index);
    art.manifest = manifest_for(*spec);
  }
  const FieldPair out = linear_evolve(data, t);
  const double e0 = linear_energy(data), e1 = linear_energy(out);
  const double drift = e0 > 0.0 ? std::abs(e1 - e0) / e0 : std::abs(e1 - e0);

  Verdict& v = art.result.verdict;
  v.experiment = "linear-evolve";
  v.parameters["t"] = t;
  v.parameters["randomize"] = spec.has_value();
  v.statistics["energy_initial"] = e0;
  v.statistics["energy_final"] = e1;
  v.statistics["relative_energy_drift"] = drift;
  v.pass = drift <= 1e-12;
  FieldProvenance prov = provenance_of(cfg, spec ? &*spec : nullptr,
                                       spec ? std::optional<std::uint64_t>(spec->first_index) : std::nullopt);
  prov.extra["time"] = fmt_g(t);
  art.fields.push_back({"evolved.nlwp", out, prov});
  return art;
}

RunArtifacts run_solve(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  const std::string mode = e.get_string("mode");
  if (mode != "strang" && mode != "v-equation") {
    fail(ErrorCode::config, "[parameters] mode must be 'strang' or 'v-equation'");
  }
  RunArtifacts art;
  FieldPair data = cfg.data_pair();
  std::optional<EnsembleSpec> spec;
  if (e.get_bool("randomize")) {
    spec = cfg.ensemble();
    spec->n_samples = 1;
    spec->first_index = static_cast<std::uint64_t>(e.get_int("index"));
    const CutoffFamily cutoff(spec->cutoff, data.grid());
    data = randomized_sample(*spec, cutoff, spec->first_index);
    art.manifest = manifest_for(*spec);
  }
  SolverConfig scfg = cfg.solver();
  const bool dump = e.get_bool("dump_states");
  const auto stride = e.get_int("dump_stride");
  if (dump && stride < 1) fail(ErrorCode::config, "[parameters] dump_stride must be >= 1");
  scfg.keep_states = dump;
  if (mode == "v-equation") scfg.record_error_term = true;

  Verdict& v = art.result.verdict;
  v.experiment = "solve";
  v.parameters["mode"] = mode;
  v.parameters["randomize"] = spec.has_value();
  v.parameters["dt"] = scfg.dt;
  v.parameters["t_end"] = scfg.t_end;
  v.parameters["dealias"] = std::string(to_string(scfg.dealias));
  v.parameters["nonlinear"] = scfg.nonlinear;
  try {
    const Trajectory traj =
        mode == "strang" ? strang_evolve(data, scfg) : solve_v_equation(data, FieldPair(data.grid()), scfg);
    std::ostringstream js;
    traj.write_jsonl(js);
    art.trajectory = js.str();
    const double e0 = traj.energy.front();
    double drift = 0.0;
    for (double en : traj.energy) drift = std::max(drift, std::abs(en - e0));
    v.statistics["energy_initial"] = e0;
    v.statistics["energy_final"] = traj.energy.back();
    v.statistics["max_energy_deviation"] = drift;
    v.statistics["relative_energy_deviation"] = number(e0 > 0.0 ? drift / e0 : drift);
    v.statistics["final_time"] = traj.times.back();
    v.statistics["records"] = traj.times.size();
    v.pass = true;
    PlotData plot{"energy", "t", "E", {}};
    for (std::size_t i = 0; i < traj.times.size(); ++i) plot.points.push_back({traj.times[i], traj.energy[i]});
    art.result.plots.push_back(std::move(plot));
    if (dump) {
      for (std::size_t i = 0; i < traj.states.size(); i += static_cast<std::size_t>(stride)) {
        char name[64];
        std::snprintf(name, sizeof name, "states/state_%06zu.nlwp", i);
        FieldProvenance prov = provenance_of(cfg, spec ? &*spec : nullptr,
                                             spec ? std::optional<std::uint64_t>(spec->first_index) : std::nullopt);
        prov.extra["time"] = fmt_g(traj.times[i]);
        art.fields.push_back({name, traj.states[i], prov});
      }
    }
  } catch (const BlowupError& err) {
    v.statistics["blowup"] = err.what();
    v.statistics["last_good_time"] = err.last_good_time();
    v.pass = false;
  }
  return art;
}

NormRecord strichartz_norm(const Table& e) {
  NormRecord n;
  n.q = e.get_double("q");
  n.r = e.get_double("r");
  n.t0 = e.get_double("t0");
  n.t1 = e.get_double("t1");
  n.admissible = e.get_bool("admissible");
  n.gamma = e.get_double("gamma");
  n.name = "L" + fmt_g(n.q) + "_L" + fmt_g(n.r);
  return n;
}

RunArtifacts run_strichartz(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  StrichartzSpec spec;
  spec.ensemble = cfg.ensemble();
  spec.norm = strichartz_norm(e);
  spec.gammas = e.get_doubles("gammas");
  spec.hs_tail = e.get_bool("hs_tail");
  spec.compare_halved = e.get_bool("compare_halved");
  spec.q_low = e.get_double("q_low");
  spec.q_high = e.get_double("q_high");
  spec.min_r2 = e.get_double("min_r2");
  spec.slope_ratio_tolerance = e.get_double("slope_ratio_tolerance");
  RunArtifacts art;
  art.result = strichartz_tail_experiment(spec, cfg.workers);
  art.manifest = manifest_for(spec.ensemble);
  if (spec.compare_halved) {
    auto halved = manifest_for(spec.ensemble, 1);
    art.manifest.insert(art.manifest.end(), halved.begin(), halved.end());
  }
  return art;
}

RunArtifacts run_khintchine(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  const EnsembleSpec ens = [&] {
    // Khintchine has no base data; build the distribution/cutoff part only.
    const Table& dist = cfg.resolved.tables.at("distribution");
    EnsembleSpec s;
    s.dist = {parse_distribution_kind(dist.get_string("kind")), dist.get_double("scale")};
    s.cutoff = parse_cutoff_kind(cfg.resolved.tables.at("cutoff").get_string("kind"));
    s.master_seed = cfg.seed;
    const auto n = cfg.resolved.tables.at("ensemble").get_int("samples");
    if (n < 2) fail(ErrorCode::config, "[ensemble] samples must be >= 2");
    s.n_samples = static_cast<std::size_t>(n);
    return s;
  }();
  KhintchineSpec spec;
  spec.grid = cfg.grid();
  spec.cutoff = ens.cutoff;
  spec.dist = ens.dist;
  spec.coefficient_width = e.get_double("coefficient_width");
  spec.p_list = e.get_doubles("p");
  spec.n_samples = ens.n_samples;
  spec.master_seed = cfg.seed;
  const auto active = e.get_int("min_active_cubes");
  if (active < 0) fail(ErrorCode::config, "[parameters] min_active_cubes must be >= 0");
  spec.min_active_cubes = static_cast<std::size_t>(active);
  RunArtifacts art;
  art.result = khintchine_experiment(spec, cfg.workers);
  art.manifest = manifest_for(ens);
  return art;
}

RunArtifacts run_energy_bound(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  EnergyBoundSpec spec;
  spec.ensemble = cfg.ensemble();
  spec.horizon = e.get_double("horizon");
  spec.safety = e.get_double("safety");
  spec.differential_check = e.get_bool("differential_check");
  spec.max_diverged_fraction = e.get_double("max_diverged_fraction");
  RunArtifacts art;
  art.result = energy_bound_experiment(spec, cfg.workers);
  art.manifest = manifest_for(spec.ensemble);
  return art;
}

RunArtifacts run_smalldata(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  SmallDataSpec spec;
  spec.ensemble = cfg.ensemble();
  spec.eps = e.get_doubles("eps");
  spec.horizon = e.get_double("horizon");
  spec.eta = e.get_double("eta");
  spec.band_low = e.get_double("band_low");
  spec.band_high = e.get_double("band_high");
  RunArtifacts art;
  art.result = smalldata_experiment(spec, cfg.workers);
  art.manifest = manifest_for(spec.ensemble);
  return art;
}

RunArtifacts run_continuity(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  ContinuitySpec spec;
  spec.ensemble = cfg.ensemble();
  spec.rho = cfg.data_pair("perturbation");
  spec.etas = e.get_doubles("etas");
  spec.horizon = e.get_double("horizon");
  spec.final_fraction = e.get_double("final_fraction");
  RunArtifacts art;
  art.result = continuity_probe(spec, cfg.workers);
  art.manifest = manifest_for(spec.ensemble);
  return art;
}

RunArtifacts run_calibrate(const RunConfig& cfg) {
  const Table& e = cfg.experiment_table();
  CalibrationSpec spec;
  spec.ensemble = cfg.ensemble();
  spec.v_shape = cfg.data_pair("v_data");
  spec.energy_levels = e.get_doubles("energy_levels");
  spec.forcing_levels = e.get_doubles("forcing_levels");
  spec.taus = e.get_doubles("taus");
  spec.quad_points = static_cast<int>(e.get_int("quad_points"));
  RunArtifacts art;
  art.result = calibrate_tau(spec, cfg.workers);
  EnsembleSpec first = spec.ensemble;
  first.n_samples = 1;
  art.manifest = manifest_for(first);
  return art;
}

bool directory_empty(const fs::path& dir) { return fs::directory_iterator(dir) == fs::directory_iterator(); }

}  // namespace

RunArtifacts execute_run(const RunConfig& cfg) {
  const std::string& x = cfg.experiment;
  if (x == "randomize") return run_randomize(cfg);
  if (x == "linear-evolve") return run_linear_evolve(cfg);
  if (x == "solve") return run_solve(cfg);
  if (x == "strichartz-mc") return run_strichartz(cfg);
  if (x == "khintchine") return run_khintchine(cfg);
  if (x == "energy-bound") return run_energy_bound(cfg);
  if (x == "smalldata") return run_smalldata(cfg);
  if (x == "continuity") return run_continuity(cfg);
  if (x == "calibrate-tau") return run_calibrate(cfg);
  fail(ErrorCode::config, "unknown experiment '" + x + "'");
}

void check_output_dir(const fs::path& dir, bool force) {
  if (!fs::exists(dir)) return;
  if (!fs::is_directory(dir)) fail(ErrorCode::config, "output path " + dir.string() + " is not a directory");
  if (directory_empty(dir)) return;
  if (!force) {
    fail(ErrorCode::config, "output directory " + dir.string() + " is not empty (use --force to overwrite)");
  }
  if (!fs::exists(dir / "run.json")) {
    fail(ErrorCode::config, "refusing to overwrite " + dir.string() + ": it does not hold a previous run");
  }
}

void prepare_output_dir(const fs::path& dir, bool force) {
  check_output_dir(dir, force);
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path());
  }
  fs::create_directories(dir);
}

void write_artifacts(const RunConfig& cfg, const RunArtifacts& art, const fs::path& dir) {
  std::vector<std::string> files;
  auto emit = [&](const fs::path& rel, const std::string& text) {
    write_text(dir / rel, text);
    files.push_back(rel.generic_string());
  };
  emit("config.resolved.toml", cfg.frozen_text());
  emit("verdict.json", art.result.verdict.to_json().dump(2) + "\n");
  for (const auto& table : art.result.tables) {
    std::ostringstream os;
    table.write_csv(os);
    emit(table.name() + ".csv", os.str());
  }
  for (const auto& plot : art.result.plots) {
    std::ostringstream os;
    plot.write(os);
    emit(fs::path("plots") / (plot.name + ".dat"), os.str());
  }
  for (const auto& [name, text] : art.result.files) emit(name, text);
  if (!art.manifest.empty()) {
    std::string text;
    for (const auto& line : art.manifest) text += line + "\n";
    emit("manifest.jsonl", text);
  }
  if (!art.trajectory.empty()) emit("trajectory.jsonl", art.trajectory);
  for (const auto& f : art.fields) {
    fs::create_directories((dir / f.path).parent_path());
    save_field_pair(dir / f.path, f.pair, f.provenance);
    files.push_back(f.path.generic_string());
    files.push_back(sidecar_path(f.path).generic_string());
  }
  ojson run;
  run["format_version"] = kArtifactFormatVersion;
  run["schema_version"] = kSchemaVersion;
  run["experiment"] = cfg.experiment;
  run["seed"] = cfg.seed;
  run["pass"] = art.result.verdict.pass;
  run["files"] = files;
  write_text(dir / "run.json", run.dump(2) + "\n");
}

int cmd_run(const fs::path& config, const GlobalOptions& global, std::ostream& log) {
  const RunConfig cfg = load_run_config(config, {global.seed, global.workers, global.out});
  fs::path dir = cfg.output;
  if (dir.empty()) dir = fs::path("runs") / (cfg.experiment + "-seed" + std::to_string(cfg.seed));
  // Check the overwrite policy before computing, touch the disk only after.
  check_output_dir(dir, global.force);
  const RunArtifacts art = execute_run(cfg);
  prepare_output_dir(dir, global.force);
  write_artifacts(cfg, art, dir);
  log << cfg.experiment << ": " << (art.result.verdict.pass ? "PASS" : "FAIL") << " -> " << dir.string() << "\n";
  return art.result.verdict.pass ? exit_pass : exit_fail;
}

int cmd_make_data(const MakeDataOptions& opts, const GlobalOptions& global, std::ostream& log) {
  fs::path path = opts.output;
  if (global.out) path = *global.out / (path.empty() ? fs::path("data.nlwp") : path.filename());
  if (path.empty()) fail(ErrorCode::config, "make-data needs --output (or --out)");
  if (fs::exists(path) && !global.force) {
    fail(ErrorCode::config, path.string() + " exists (use --force to overwrite)");
  }
  Grid grid = [&] {
    try {
      return Grid(opts.dim, opts.points, opts.length);
    } catch (const Error& e) {
      fail(ErrorCode::config, e.what());
    }
  }();
  ProfileSpec p = opts.profile;
  if (global.seed) p.seed = *global.seed;
  const DealiasRule band =
      opts.band == "auto" ? default_dealias_rule(opts.dim) : parse_dealias_rule(opts.band);
  p.band = band == DealiasRule::padded_three_halves ? DealiasRule::none : band;
  const FieldPair pair = make_profile(grid, p);
  FieldProvenance prov;
  prov.s = p.s;
  prov.extra["profile"] = p.profile;
  prov.extra["band"] = std::string(to_string(p.band));
  if (p.profile == "multi-bump" || p.profile == "spectral-power") prov.seed = p.seed;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_field_pair(path, pair, prov);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: ||u0||_H^%g = %.12g, ||u1||_H^%g = %.12g, energy = %.12g\n",
                path.string().c_str(), p.s, sobolev_norm(pair.pos, p.s, false), p.s - 1.0,
                sobolev_norm(pair.vel, p.s - 1.0, false), linear_energy(pair));
  log << buf;
  return exit_pass;
}

int cmd_report(const std::vector<fs::path>& dirs, const GlobalOptions& global, std::ostream& out) {
  struct Row {
    std::string dir, experiment, parameters, status, seed, note;
  };
  std::vector<Row> rows;
  // Verdict content -> first run directory that produced it.
  std::map<std::string, std::string> seen;
  bool any_failure = false;
  for (const auto& dir : dirs) {
    Row row;
    row.dir = dir.string();
    try {
      std::ifstream in(dir / "verdict.json");
      if (!in) fail(ErrorCode::io, "missing verdict.json");
      const ojson v = ojson::parse(in);
      if (!v.is_object() || !v.contains("experiment") || !v["experiment"].is_string() || !v.contains("pass") ||
          !v["pass"].is_boolean()) {
        fail(ErrorCode::io, "verdict.json lacks experiment/pass");
      }
      row.experiment = v["experiment"].get<std::string>();
      row.parameters = v.value("parameters", ojson::object()).dump();
      row.status = v["pass"].get<bool>() ? "pass" : "fail";
      std::ifstream rin(dir / "run.json");
      if (rin) {
        const ojson r = ojson::parse(rin, nullptr, false);
        if (!r.is_discarded() && r.contains("seed")) row.seed = r["seed"].dump();
      }
      const auto [it, fresh] = seen.emplace(v.dump() + row.seed, row.dir);
      if (!fresh) row.note = "duplicate of " + it->second;
    } catch (const std::exception& e) {
      row.status = "malformed";
      row.note = e.what();
    }
    if (row.status != "pass") any_failure = true;
    rows.push_back(row);
  }

  std::ostringstream md, csv;
  md << "| run | experiment | seed | parameters | status | note |\n|---|---|---|---|---|---|\n";
  csv << "run,experiment,seed,parameters,status,note\r\n";
  for (const auto& r : rows) {
    md << "| " << r.dir << " | " << r.experiment << " | " << r.seed << " | `" << r.parameters << "` | " << r.status
       << " | " << r.note << " |\n";
    csv << csv_escape(r.dir) << ',' << csv_escape(r.experiment) << ',' << csv_escape(r.seed) << ','
        << csv_escape(r.parameters) << ',' << csv_escape(r.status) << ',' << csv_escape(r.note) << "\r\n";
  }
  out << md.str();
  if (global.out) {
    write_text(*global.out / "summary.md", md.str());
    write_text(*global.out / "summary.csv", csv.str());
  }
  return any_failure ? exit_fail : exit_pass;
}

int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (const auto* ne = dynamic_cast<const Error*>(&e)) {
    if (ne->code() == ErrorCode::config || ne->code() == ErrorCode::invalid_argument) return exit_usage;
  }
  return exit_runtime;
}

}  // namespace nlwlab::tools
