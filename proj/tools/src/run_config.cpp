#include "nlwlab_tools/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlwlab/error.hpp"
#include "nlwlab/field_io.hpp"

namespace nlwlab::tools {

namespace {

KeySpec opt(std::string key, ValueType type, Value fallback) {
  return {std::move(key), type, std::move(fallback), false};
}
KeySpec req(std::string key, ValueType type) { return {std::move(key), type, std::nullopt, true}; }

Value num(double d) { return Value{d}; }
Value integer(std::int64_t i) { return Value{i}; }
Value str(const char* s) { return Value{std::string(s)}; }
Value flag(bool b) { return Value{b}; }
Value nums(std::initializer_list<double> v) {
  Array a;
  for (double d : v) a.push_back(Value{d});
  return Value{a};
}

TableSpec data_spec() {
  return {{opt("file", ValueType::string, str("")),
           opt("profile", ValueType::string, str("gaussian-bump")),
           opt("s", ValueType::number, num(0.0)),
           opt("pos_norm", ValueType::number, num(1.0)),
           opt("vel_norm", ValueType::number, num(0.0)),
           opt("width", ValueType::number, num(1.0)),
           opt("center", ValueType::number_array, nums({})),
           opt("bumps", ValueType::integer, integer(3)),
           opt("spread", ValueType::number, num(1.5)),
           opt("seed", ValueType::integer, integer(0)),
           opt("delta", ValueType::number, num(0.1)),
           opt("band", ValueType::string, str("auto"))},
          {},
          false};
}

TableSpec experiment_spec(const std::string& name) {
  using V = ValueType;
  if (name == "randomize") return {{opt("write_fields", V::boolean, flag(true))}, {}, false};
  if (name == "linear-evolve") {
    return {{opt("t", V::number, num(1.0)), opt("randomize", V::boolean, flag(false)),
             opt("index", V::integer, integer(0))},
            {},
            false};
  }
  if (name == "solve") {
    return {{opt("mode", V::string, str("strang")), opt("randomize", V::boolean, flag(true)),
             opt("index", V::integer, integer(0)), opt("dump_states", V::boolean, flag(false)),
             opt("dump_stride", V::integer, integer(10))},
            {},
            false};
  }
  if (name == "strichartz-mc") {
    return {{opt("q", V::number, num(3.0)), opt("r", V::number, num(6.0)), opt("t0", V::number, num(0.0)),
             opt("t1", V::number, num(1.0)), opt("admissible", V::boolean, flag(true)),
             opt("gamma", V::number, num(1.0)),
             opt("gammas", V::number_array, nums({0.0})), opt("hs_tail", V::boolean, flag(true)),
             opt("compare_halved", V::boolean, flag(true)), opt("q_low", V::number, num(0.5)),
             opt("q_high", V::number, num(0.995)), opt("min_r2", V::number, num(0.95)),
             opt("slope_ratio_tolerance", V::number, num(0.25))},
            {},
            false};
  }
  if (name == "khintchine") {
    return {{opt("p", V::number_array, nums({2, 4, 8, 16})), opt("coefficient_width", V::number, num(2.0)),
             opt("min_active_cubes", V::integer, integer(64))},
            {},
            false};
  }
  if (name == "energy-bound") {
    return {{opt("horizon", V::number, num(1.0)), opt("safety", V::number, num(2.0)),
             opt("differential_check", V::boolean, flag(true)),
             opt("max_diverged_fraction", V::number, num(0.01))},
            {},
            false};
  }
  if (name == "smalldata") {
    return {{opt("eps", V::number_array, nums({0.4, 0.2, 0.1, 0.05})), opt("horizon", V::number, num(1.0)),
             opt("eta", V::number, num(0.1)), opt("band_low", V::number, num(0.7)),
             opt("band_high", V::number, num(1.4))},
            {},
            false};
  }
  if (name == "continuity") {
    return {{opt("etas", V::number_array, nums({0.1, 0.05, 0.025, 0.0125})), opt("horizon", V::number, num(1.0)),
             opt("final_fraction", V::number, num(0.25))},
            {},
            false};
  }
  if (name == "calibrate-tau") {
    return {{opt("energy_levels", V::number_array, nums({0.1, 1.0})),
             opt("forcing_levels", V::number_array, nums({0.5, 1.0})),
             opt("taus", V::number_array, nums({0.4, 0.2, 0.1, 0.05, 0.025})),
             opt("quad_points", V::integer, integer(17))},
            {},
            false};
  }
  fail(ErrorCode::config, "unknown experiment '" + name + "'");
}

DealiasRule resolve_rule(const std::string& name, int dim) {
  return name == "auto" ? default_dealias_rule(dim) : parse_dealias_rule(name);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"randomize",     "linear-evolve", "solve",
                                              "strichartz-mc", "khintchine",    "energy-bound",
                                              "smalldata",     "continuity",    "calibrate-tau"};
  return names;
}

TableSpec run_schema(const std::string& experiment) {
  using V = ValueType;
  TableSpec root;
  root.keys = {req("schema_version", V::integer), req("experiment", V::string),
               opt("seed", V::integer, integer(0)), opt("workers", V::integer, integer(1)),
               opt("output", V::string, str(""))};
  root.tables["grid"] = {{req("dim", V::integer), req("points", V::integer), req("length", V::number)}, {}, true};
  root.tables["cutoff"] = {{opt("kind", V::string, str("smooth"))}, {}, false};
  root.tables["distribution"] = {{opt("kind", V::string, str("gaussian")), opt("scale", V::number, num(1.0)),
                                  opt("allow_uncertified", V::boolean, flag(false))},
                                 {},
                                 false};
  root.tables["solver"] = {{opt("dt", V::number, num(0.01)), opt("t_end", V::number, num(1.0)),
                            opt("dealias", V::string, str("auto")), opt("picard_tol", V::number, num(1e-10)),
                            opt("picard_max_iters", V::integer, integer(60)),
                            opt("sample_stride", V::integer, integer(1)),
                            opt("nonlinear", V::boolean, flag(true)), opt("record", V::number_array, nums({})),
                            opt("finite_box_horizon", V::boolean, flag(false)),
                            opt("support_radius", V::number, num(-1.0))},
                           {},
                           false};
  root.tables["ensemble"] = {{opt("samples", V::integer, integer(2)), opt("first_index", V::integer, integer(0)),
                              opt("pipeline", V::string, str("linear-only")),
                              opt("time_samples", V::integer, integer(17))},
                             {},
                             false};
  if (experiment != "khintchine") root.tables["data"] = data_spec();
  if (experiment == "continuity") root.tables["perturbation"] = data_spec();
  if (experiment == "calibrate-tau") root.tables["v_data"] = data_spec();
  root.tables["parameters"] = experiment_spec(experiment);
  return root;
}

RunConfig load_run_config(const Table& raw, const Overrides& overrides, const std::filesystem::path& base_dir) {
  const Value* exp = raw.find("experiment");
  if (exp == nullptr || !exp->is_string()) fail(ErrorCode::config, "missing required key 'experiment'");
  const std::string name = exp->as_string();
  if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end()) {
    fail(ErrorCode::config, "unknown experiment '" + name + "'");
  }
  RunConfig cfg;
  cfg.resolved = validate(raw, run_schema(name));
  if (cfg.resolved.get_int("schema_version") != kSchemaVersion) {
    fail(ErrorCode::config, "unsupported schema_version " + std::to_string(cfg.resolved.get_int("schema_version")) +
                                " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (overrides.seed) cfg.resolved.values["seed"] = Value{static_cast<std::int64_t>(*overrides.seed)};
  if (overrides.workers) cfg.resolved.values["workers"] = Value{static_cast<std::int64_t>(*overrides.workers)};
  if (overrides.out) cfg.resolved.values["output"] = Value{overrides.out->string()};
  cfg.experiment = name;
  const auto seed = cfg.resolved.get_int("seed");
  if (seed < 0) fail(ErrorCode::config, "seed must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.workers = static_cast<int>(cfg.resolved.get_int("workers"));
  if (cfg.workers < 1) fail(ErrorCode::config, "workers must be >= 1");
  cfg.output = cfg.resolved.get_string("output");
  cfg.base_dir = base_dir;

  // Semantic checks that do not need the (possibly expensive) data.
  (void)cfg.grid();
  parse_cutoff_kind(cfg.resolved.tables.at("cutoff").get_string("kind"));
  parse_distribution_kind(cfg.resolved.tables.at("distribution").get_string("kind"));
  const Table& solver = cfg.resolved.tables.at("solver");
  if (solver.get_string("dealias") != "auto") parse_dealias_rule(solver.get_string("dealias"));
  parse_pipeline(cfg.resolved.tables.at("ensemble").get_string("pipeline"));
  if (name == "strichartz-mc") {
    const Table& e = cfg.experiment_table();
    const double q = e.get_double("q"), r = e.get_double("r"), gamma = e.get_double("gamma");
    const int d = cfg.grid().dim();
    if (e.get_bool("admissible") && !admissible_pair_check(d, gamma, q, r)) {
      fail(ErrorCode::config, "(q, r) = (" + std::to_string(q) + ", " + std::to_string(r) +
                                  ") is tagged admissible but is not an H^" + std::to_string(gamma) +
                                  "-wave-admissible pair in d = " + std::to_string(d));
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& file, const Overrides& overrides) {
  return load_run_config(load_toml(file), overrides, file.parent_path());
}

std::string RunConfig::frozen_text() const {
  Table frozen = resolved;
  frozen.values.erase("output");
  frozen.values.erase("workers");
  return "# resolved configuration (artifact format " + std::to_string(kArtifactFormatVersion) + ")\n" +
         render_toml(frozen);
}

const Table& RunConfig::experiment_table() const { return resolved.tables.at("parameters"); }

Grid RunConfig::grid() const {
  const Table& g = resolved.tables.at("grid");
  try {
    return Grid(static_cast<int>(g.get_int("dim")), static_cast<int>(g.get_int("points")), g.get_double("length"));
  } catch (const Error& e) {
    fail(ErrorCode::config, std::string("[grid]: ") + e.what());
  }
}

ProfileSpec RunConfig::profile(const std::string& table) const {
  const Table& t = resolved.tables.at(table);
  ProfileSpec p;
  p.profile = t.get_string("profile");
  p.s = t.get_double("s");
  p.pos_norm = t.get_double("pos_norm");
  p.vel_norm = t.get_double("vel_norm");
  p.width = t.get_double("width");
  p.center = t.get_doubles("center");
  p.bumps = static_cast<int>(t.get_int("bumps"));
  p.spread = t.get_double("spread");
  p.seed = static_cast<std::uint64_t>(t.get_int("seed"));
  p.delta = t.get_double("delta");
  const DealiasRule band = resolve_rule(t.get_string("band"), grid().dim());
  p.band = band == DealiasRule::padded_three_halves ? DealiasRule::none : band;
  return p;
}

FieldPair RunConfig::data_pair(const std::string& table) const {
  const Table& t = resolved.tables.at(table);
  const std::string& file = t.get_string("file");
  // Unusable input data is a configuration problem, reported as such.
  try {
    if (!file.empty()) {
      std::filesystem::path path(file);
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      FieldPair pair = load_field_pair(path);
      if (!(pair.grid() == grid())) fail(ErrorCode::config, "file grid does not match [grid]");
      return pair;
    }
    return make_profile(grid(), profile(table));
  } catch (const Error& e) {
    fail(ErrorCode::config, "[" + table + "] " + e.what());
  }
}

double RunConfig::support_radius() const {
  const double given = resolved.tables.at("solver").get_double("support_radius");
  if (given >= 0.0) return given;
  const Table& d = resolved.tables.at("data");
  if (!d.get_string("file").empty() || d.get_string("profile") == "spectral-power") return 0.0;
  return profile_support_radius(profile("data"), grid().dim());
}

SolverConfig RunConfig::solver() const {
  const Table& t = resolved.tables.at("solver");
  SolverConfig s;
  s.dt = t.get_double("dt");
  s.t_end = t.get_double("t_end");
  s.dealias = resolve_rule(t.get_string("dealias"), grid().dim());
  s.picard_tol = t.get_double("picard_tol");
  s.picard_max_iters = static_cast<int>(t.get_int("picard_max_iters"));
  s.sample_stride = static_cast<int>(t.get_int("sample_stride"));
  s.nonlinear = t.get_bool("nonlinear");
  s.record_r = t.get_doubles("record");
  s.finite_box_horizon = t.get_bool("finite_box_horizon");
  if (s.finite_box_horizon) s.support_radius = support_radius();
  return s;
}

EnsembleSpec RunConfig::ensemble() const {
  const Table& e = resolved.tables.at("ensemble");
  const Table& dist = resolved.tables.at("distribution");
  EnsembleSpec spec;
  const auto samples = e.get_int("samples");
  const auto first = e.get_int("first_index");
  if (samples < 2) fail(ErrorCode::config, "[ensemble] samples must be >= 2");
  if (first < 0) fail(ErrorCode::config, "[ensemble] first_index must be >= 0");
  spec.n_samples = static_cast<std::size_t>(samples);
  spec.first_index = static_cast<std::uint64_t>(first);
  spec.master_seed = seed;
  spec.dist = {parse_distribution_kind(dist.get_string("kind")), dist.get_double("scale")};
  spec.allow_uncertified = dist.get_bool("allow_uncertified");
  spec.cutoff = parse_cutoff_kind(resolved.tables.at("cutoff").get_string("kind"));
  spec.pipeline = parse_pipeline(e.get_string("pipeline"));
  spec.time_samples = static_cast<int>(e.get_int("time_samples"));
  spec.solver = solver();
  if (resolved.has_table("data")) {
    spec.base = data_pair("data");
    spec.s = resolved.tables.at("data").get_double("s");
  }
  return spec;
}

}  // namespace nlwlab::tools
