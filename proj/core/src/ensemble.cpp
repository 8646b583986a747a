#include "nlwlab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "nlwlab/error.hpp"
#include "nlwlab/fft.hpp"
#include "nlwlab/norms.hpp"
#include "nlwlab/propagator.hpp"
#include "nlwlab/randomize.hpp"
#include "nlwlab/spacetime.hpp"

namespace nlwlab {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SampleTable::SampleTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void SampleTable::add(Row row) {
  require(row.values.size() == columns_.size(), ErrorCode::shape_mismatch,
          "SampleTable: row width does not match the columns");
  rows_.push_back(std::move(row));
}

std::size_t SampleTable::column_index(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  require(it != columns_.end(), ErrorCode::invalid_argument, "SampleTable: no column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> SampleTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  for (const auto& row : rows_) {
    if (row.status == "ok") out.push_back(row.values[c]);
  }
  return out;
}

std::size_t SampleTable::diverged_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const Row& r) { return r.status != "ok"; }));
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void SampleTable::write_csv(std::ostream& out) const {
  out << "index,status";
  for (const auto& c : columns_) out << ',' << csv_escape(c);
  out << ",note\r\n";
  char buf[40];
  for (const auto& row : rows_) {
    out << row.index << ',' << csv_escape(row.status);
    for (double v : row.values) {
      out << ',';
      if (std::isfinite(v)) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
      }
    }
    out << ',' << csv_escape(row.note) << "\r\n";
  }
}

std::string_view to_string(Pipeline p) noexcept {
  return p == Pipeline::linear_only ? "linear-only" : "full-solve";
}

Pipeline parse_pipeline(std::string_view name) {
  if (name == "linear-only") return Pipeline::linear_only;
  if (name == "full-solve") return Pipeline::full_solve;
  fail(ErrorCode::invalid_argument, "unknown pipeline '" + std::string(name) + "'");
}

double EnsembleSpec::scaling_gamma(int dim, double q, double r) {
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  return 0.5 * dim - inv_q - dim * inv_r;
}

void EnsembleSpec::validate() const {
  require(n_samples >= 2, ErrorCode::invalid_argument, "an ensemble needs at least 2 samples");
  require(base.has_value(), ErrorCode::invalid_argument, "ensemble spec has no base pair");
  dist.validate();
  require(time_samples >= 8, ErrorCode::invalid_argument, "time_samples must be >= 8");
  const int d = base->grid().dim();
  for (const auto& n : norms) {
    require(n.q >= 1.0 && n.r >= 1.0 && n.t1 > n.t0, ErrorCode::invalid_argument,
            "norm record '" + n.name + "' has invalid exponents or interval");
    if (n.admissible) {
      require(admissible_pair_check(d, n.gamma, n.q, n.r), ErrorCode::domain,
              "norm record '" + n.name + "' is tagged admissible but (q, r) = (" + std::to_string(n.q) +
                  ", " + std::to_string(n.r) + ") is not an H^" + std::to_string(n.gamma) +
                  "-wave-admissible pair");
    }
  }
}

FieldPair randomized_sample(const EnsembleSpec& spec, const CutoffFamily& cutoff, std::uint64_t index,
                            double amplitude) {
  const RandomizedDraw draw = RandomizedDraw::generate({spec.master_seed, index}, spec.dist, cutoff);
  FieldPair out = randomize_pair(*spec.base, cutoff, spec.dist, draw, !spec.allow_uncertified);
  if (amplitude != 1.0) out *= amplitude;
  return out;
}

double free_spacetime_norm(const FieldPair& pair, double q, double r, double t0, double t1, int samples) {
  require(samples >= 2 && t1 > t0, ErrorCode::invalid_argument, "free_spacetime_norm: bad sampling");
  const Grid& grid = pair.grid();
  NormSeries series;
  std::vector<double> real(grid.size());
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    FieldPair z = pair;
    if (t != 0.0) linear_evolve_inplace(z, *PropagatorCache::get(grid, t));
    fft_inverse(grid, z.pos.coeffs(), real);
    series.push(t, lebesgue_norm(grid, real, r));
  }
  return spacetime_norm(series, q, t0, t1, std::min<std::size_t>(8, series.times.size()));
}

SampleTable run_ensemble(const EnsembleSpec& spec, int workers) {
  spec.validate();
  const CutoffFamily cutoff(spec.cutoff, spec.base->grid());
  std::vector<std::string> columns{"hs_norm"};
  for (const auto& n : spec.norms) columns.push_back("z_" + n.name);
  if (spec.pipeline == Pipeline::full_solve) {
    for (const auto& n : spec.norms) columns.push_back("v_" + n.name);
    columns.push_back("sup_sqrt_energy");
  }
  SolverConfig cfg = spec.solver;
  if (spec.pipeline == Pipeline::full_solve) {
    for (const auto& n : spec.norms) {
      if (std::find(cfg.record_r.begin(), cfg.record_r.end(), n.r) == cfg.record_r.end()) cfg.record_r.push_back(n.r);
    }
  }
  std::vector<SampleTable::Row> rows(spec.n_samples);
  parallel_for(spec.n_samples, workers, [&](std::size_t k) {
    const std::uint64_t index = spec.first_index + k;
    SampleTable::Row row;
    row.index = index;
    const FieldPair data = randomized_sample(spec, cutoff, index);
    row.values.push_back(pair_sobolev_norm(data, spec.s, false));
    for (const auto& n : spec.norms) {
      row.values.push_back(free_spacetime_norm(data, n.q, n.r, n.t0, n.t1, spec.time_samples));
    }
    if (spec.pipeline == Pipeline::full_solve) {
      try {
        const Trajectory traj = solve_v_equation(data, FieldPair(data.grid()), cfg);
        for (const auto& n : spec.norms) row.values.push_back(traj.spacetime(n.q, n.r, n.t0, n.t1));
        double sup = 0.0;
        for (double e : traj.energy) sup = std::max(sup, std::sqrt(e));
        row.values.push_back(sup);
      } catch (const BlowupError& e) {
        row.status = "diverged";
        row.note = e.what();
        row.values.resize(columns.size(), std::nan(""));
      }
    }
    rows[k] = std::move(row);
  });
  SampleTable table("samples", columns);
  for (auto& r : rows) table.add(std::move(r));
  return table;
}

}  // namespace nlwlab
