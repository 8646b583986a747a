#include <iostream>

#include <CLI11.hpp>

#include "nlwlab_tools/commands.hpp"

using namespace nlwlab::tools;

int main(int argc, char** argv) {
  CLI::App app{"nlwlab: pseudospectral lab for randomized-data nonlinear wave experiments"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--force", global.force, "Overwrite an existing run directory");
  auto* out_opt = app.add_option("--out", out, "Output directory");

  MakeDataOptions md;
  std::string center;
  auto* make = app.add_subcommand("make-data", "Generate an NLWP field pair");
  make->add_option("--profile", md.profile.profile, "gaussian-bump | multi-bump | spectral-power")
      ->check(CLI::IsMember({"gaussian-bump", "multi-bump", "spectral-power"}));
  make->add_option("--dim", md.dim, "Dimension");
  make->add_option("--points", md.points, "Points per axis");
  make->add_option("--length", md.length, "Box side length");
  make->add_option("--s", md.profile.s, "Regularity s");
  make->add_option("--pos-norm", md.profile.pos_norm, "Target ||u0||_{H^s}");
  make->add_option("--vel-norm", md.profile.vel_norm, "Target ||u1||_{H^{s-1}}");
  make->add_option("--width", md.profile.width, "Bump width");
  make->add_option("--center", md.profile.center, "Bump center (one value per axis)")->delimiter(',');
  make->add_option("--bumps", md.profile.bumps, "Number of bumps (multi-bump)");
  make->add_option("--spread", md.profile.spread, "Bump spread (multi-bump)");
  make->add_option("--delta", md.profile.delta, "Decay margin (spectral-power)");
  make->add_option("--band", md.band, "Band: auto | none | two-thirds");
  make->add_option("--output,-o", md.output, "Output NLWP file");

  std::string config;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", config, "Config file")->required();

  std::vector<std::string> dirs;
  auto* report = app.add_subcommand("report", "Summarize run directories");
  report->add_option("dirs", dirs, "Run directories");

  // Global flags are accepted after the subcommand too.
  for (auto* sub : {make, run, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_usage;
  }
  if (*seed_opt) global.seed = seed;
  if (*workers_opt) global.workers = workers;
  if (*out_opt) global.out = out;

  try {
    if (*make) return cmd_make_data(md, global, std::cout);
    if (*run) return cmd_run(config, global, std::cout);
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    return cmd_report(paths, global, std::cout);
  } catch (const std::exception& e) {
    return report_error(e, std::cerr);
  }
}
