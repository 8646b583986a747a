#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlwlab/experiments.hpp"
#include "nlwlab/field_io.hpp"
#include "nlwlab_tools/run_config.hpp"

namespace nlwlab::tools {

/// Process exit codes.
enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_runtime = 3 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool force = false;
  std::optional<std::filesystem::path> out;
};

struct MakeDataOptions {
  ProfileSpec profile;
  std::string band = "auto";
  int dim = 2;
  int points = 32;
  double length = 8.0;
  std::filesystem::path output;
};

/// Everything a run produces, before anything touches the disk.
struct RunArtifacts {
  ExperimentResult result;
  std::vector<std::string> manifest;  // one JSON object per line
  /// Field files (plus sidecars) relative to the run directory.
  struct FieldFile {
    std::filesystem::path path;
    FieldPair pair;
    FieldProvenance provenance;
  };
  std::vector<FieldFile> fields;
  /// Trajectory export (JSONL), if the experiment produced one.
  std::string trajectory;
};

RunArtifacts execute_run(const RunConfig& cfg);

/// Writes run.json, config.resolved.toml, verdict.json, tables, plots,
/// manifest.jsonl and extra files into `dir` (which must already be prepared).
void write_artifacts(const RunConfig& cfg, const RunArtifacts& artifacts, const std::filesystem::path& dir);

/// Creates `dir`, refusing a non-empty directory unless `force` is set and it
/// holds a previous run (run.json); such a directory is cleared first.
void check_output_dir(const std::filesystem::path& dir, bool force);
void prepare_output_dir(const std::filesystem::path& dir, bool force);

int cmd_make_data(const MakeDataOptions& opts, const GlobalOptions& global, std::ostream& log);
int cmd_run(const std::filesystem::path& config, const GlobalOptions& global, std::ostream& log);
int cmd_report(const std::vector<std::filesystem::path>& dirs, const GlobalOptions& global, std::ostream& out);

/// Maps an exception to an exit code and prints it.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace nlwlab::tools
