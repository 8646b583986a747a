#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlwlab/ensemble.hpp"
#include "nlwlab/interval_policy.hpp"
#include "nlwlab/statistics.hpp"

namespace nlwlab {

/// {experiment, parameters, statistics, pass}
struct Verdict {
  std::string experiment;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  nlohmann::ordered_json statistics = nlohmann::ordered_json::object();
  bool pass = false;

  nlohmann::ordered_json to_json() const;
};

/// Two-column series for gnuplot.
struct PlotData {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::array<double, 2>> points;

  void write(std::ostream& out) const;
};

struct ExperimentResult {
  Verdict verdict;
  std::vector<SampleTable> tables;
  std::vector<PlotData> plots;
  /// Extra artifacts (file name -> contents), e.g. a calibrated tau table.
  std::map<std::string, std::string> files;
};

nlohmann::ordered_json describe(const EnsembleSpec& spec);
nlohmann::ordered_json describe(const TailFit& fit);

// ---------------------------------------------------------------------------

struct StrichartzSpec {
  EnsembleSpec ensemble;
  NormRecord norm;
  /// Exponents gamma of the exceedance threshold |I|^gamma (||u0||_2 + ||u1||_{H^-1}).
  std::vector<double> gammas{0.0};
  bool hs_tail = true;
  /// Re-run with the base data halved (independent seed) and compare slopes.
  bool compare_halved = true;
  double q_low = 0.5;
  double q_high = 0.995;
  double min_r2 = 0.95;
  double slope_ratio_tolerance = 0.25;
};

ExperimentResult strichartz_tail_experiment(const StrichartzSpec& spec, int workers = 1);

struct KhintchineSpec {
  Grid grid{2, 32, 4.0};
  CutoffKind cutoff = CutoffKind::sharp;
  CoefficientDistribution dist;
  /// c_n = exp(-|n|^2 / (2 w^2)) on every cube (real and even, hence Hermitian).
  double coefficient_width = 2.0;
  std::vector<double> p_list{2, 4, 8, 16};
  std::size_t n_samples = 100000;
  std::uint64_t master_seed = 0;
  std::size_t min_active_cubes = 64;
};

ExperimentResult khintchine_experiment(const KhintchineSpec& spec, int workers = 1);

struct EnergyBoundSpec {
  EnsembleSpec ensemble;
  double horizon = 1.0;
  double safety = 2.0;
  double max_diverged_fraction = 0.01;
  /// Check the differential inequality along the trajectories too.
  bool differential_check = true;
};

ExperimentResult energy_bound_experiment(const EnergyBoundSpec& spec, int workers = 1);

struct SmallDataSpec {
  EnsembleSpec ensemble;
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  double horizon = 1.0;
  double eta = 0.1;
  double band_low = 0.7;
  double band_high = 1.4;
};

ExperimentResult smalldata_experiment(const SmallDataSpec& spec, int workers = 1);

struct ContinuitySpec {
  EnsembleSpec ensemble;
  FieldPair rho{Grid(2, 4, 1.0)};
  std::vector<double> etas{0.1, 0.05, 0.025, 0.0125};
  double horizon = 1.0;
  double final_fraction = 0.25;
};

ExperimentResult continuity_probe(const ContinuitySpec& spec, int workers = 1);

struct CalibrationSpec {
  EnsembleSpec ensemble;        // base pair = forcing shape; first sample used
  FieldPair v_shape{Grid(2, 4, 1.0)};  // data of v, scaled to each energy level
  std::vector<double> energy_levels{0.1, 1.0};
  std::vector<double> forcing_levels{0.5, 1.0};
  std::vector<double> taus{0.4, 0.2, 0.1, 0.05, 0.025};
  int quad_points = 17;
};

ExperimentResult calibrate_tau(const CalibrationSpec& spec, int workers = 1);

}  // namespace nlwlab
