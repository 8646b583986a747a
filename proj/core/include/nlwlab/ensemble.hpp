#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlwlab/cutoff.hpp"
#include "nlwlab/distribution.hpp"
#include "nlwlab/field.hpp"
#include "nlwlab/solver.hpp"

namespace nlwlab {

/// Runs fn(0..n-1) on up to `workers` threads. Every index runs exactly once;
/// if any call throws, the exception of the lowest failing index is rethrown
/// after all workers have joined.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Rows keyed by sample index with a fixed column order.
class SampleTable {
 public:
  struct Row {
    std::uint64_t index = 0;
    std::string status = "ok";  // "ok" or "diverged"
    std::vector<double> values;
    std::string note;
  };

  SampleTable() = default;
  SampleTable(std::string name, std::vector<std::string> columns);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::vector<Row>& rows() noexcept { return rows_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  void add(Row row);
  /// Values of one column over the rows with status "ok".
  std::vector<double> column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;
  std::size_t diverged_count() const;

  /// RFC-4180 CSV: header row, CRLF line ends, %.17g numbers, empty cells
  /// for missing values.
  void write_csv(std::ostream& out) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<Row> rows_;
};

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

enum class Pipeline { linear_only, full_solve };

std::string_view to_string(Pipeline p) noexcept;
Pipeline parse_pipeline(std::string_view name);

/// A recorded L^q_t L^r_x norm of the free evolution z (linear pipeline) or of
/// v (full pipeline) over [t0, t1].
struct NormRecord {
  std::string name;
  double q = 3.0;
  double r = 6.0;
  double t0 = 0.0;
  double t1 = 1.0;
  bool admissible = false;  // tagged admissible: validated by admissible_pair_check
  double gamma = 1.0;       // regularity of the admissibility claim (H^gamma)
};

struct EnsembleSpec {
  std::size_t n_samples = 2;
  std::uint64_t master_seed = 0;
  std::uint64_t first_index = 0;
  CoefficientDistribution dist;
  CutoffKind cutoff = CutoffKind::smooth;
  /// Diagnostic opt-out for laws without a sub-Gaussian certificate.
  bool allow_uncertified = false;
  std::optional<FieldPair> base;
  double s = 0.0;
  Pipeline pipeline = Pipeline::linear_only;
  std::vector<NormRecord> norms;
  /// Uniform time samples per recorded interval (linear pipeline).
  int time_samples = 17;
  SolverConfig solver;

  /// Scaling exponent gamma = d/2 - 1/q - d/r of a pair.
  static double scaling_gamma(int dim, double q, double r);
  void validate() const;
};

/// The randomized pair (u0^omega, u1^omega) for sample `index`.
FieldPair randomized_sample(const EnsembleSpec& spec, const CutoffFamily& cutoff, std::uint64_t index,
                            double amplitude = 1.0);

/// Linear-only: records ||(u0^w, u1^w)||_{H^s x H^{s-1}} and every NormRecord of
/// z = S(t)(u0^w, u1^w). Full-solve: additionally solves the v-equation with
/// zero data and records the norms of v and sup_t E(v)^{1/2}.
/// Rows are reproducible bit-for-bit from the EnsembleSpec, independent of `workers`.
SampleTable run_ensemble(const EnsembleSpec& spec, int workers = 1);

/// L^q_t L^r_x norm of S(t) pair over [t0, t1] sampled at `samples` uniform times.
double free_spacetime_norm(const FieldPair& pair, double q, double r, double t0, double t1, int samples);

}  // namespace nlwlab
