#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlwlab/experiments.hpp"
#include "nlwlab/profiles.hpp"
#include "nlwlab_tools/config.hpp"

namespace nlwlab::tools {

inline constexpr std::int64_t kSchemaVersion = 1;
inline constexpr int kArtifactFormatVersion = 1;

/// Experiments `run` can dispatch to.
const std::vector<std::string>& experiment_names();

/// Schema for one experiment kind (common blocks plus its [parameters] keys).
TableSpec run_schema(const std::string& experiment);

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::filesystem::path> out;
};

/// A validated, resolved configuration.
struct RunConfig {
  Table resolved;           // with defaults filled in and overrides applied
  std::string experiment;
  std::uint64_t seed = 0;
  int workers = 1;
  std::filesystem::path output;
  std::filesystem::path base_dir;  // relative data paths resolve against this

  /// The frozen copy written next to the outputs (no output path, no worker
  /// count, so that reruns elsewhere or with other --workers are identical).
  std::string frozen_text() const;

  Grid grid() const;
  /// [data] (or another table with the same keys) as a field pair.
  FieldPair data_pair(const std::string& table = "data") const;
  ProfileSpec profile(const std::string& table = "data") const;
  double support_radius() const;
  SolverConfig solver() const;
  EnsembleSpec ensemble() const;
  const Table& experiment_table() const;
};

/// Parses, validates and resolves. Throws nlwlab::Error(ErrorCode::config).
RunConfig load_run_config(const Table& raw, const Overrides& overrides,
                          const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file, const Overrides& overrides);

}  // namespace nlwlab::tools
