#pragma once

#include <vector>

namespace nlwlab {

/// Spatial norms ||f(t_i)||_{L^r} sampled at increasing times; the raw
/// material of every L^q_t L^r_x quantity.
struct NormSeries {
  double r = 2.0;
  std::vector<double> times;
  std::vector<double> values;

  void push(double t, double value);
  double start() const { return times.front(); }
  double end() const { return times.back(); }
};

/// (int_a^b ||f(t)||_{L^r}^q dt)^{1/q} by the composite trapezoid rule, with
/// linearly interpolated values at the interval ends; q = inf takes the max.
/// Requires [a, b] inside the recorded range and at least `min_samples`
/// recorded samples in [a, b].
double spacetime_norm(const NormSeries& series, double q, double a, double b,
                      std::size_t min_samples = 8);

/// Cumulative norm over [t_0, t_i] for every recorded i (nondecreasing).
std::vector<double> running_spacetime_norm(const NormSeries& series, double q);

/// Exponents of the critical space X = L^q_t L^r_x: ((d+2)/(d-2), 2(d+2)/(d-2)).
/// d = 2 reuses the cubic pair (3, 6).
struct ExponentPair {
  double q;
  double r;
};
ExponentPair critical_pair(int dim);

/// H^gamma wave-admissible pair test.
bool admissible_pair_check(int dim, double gamma, double q, double r);

/// Disjoint closed intervals covering [t_0, t_end] with their X-norms.
struct IntervalPartition {
  std::vector<double> cuts;   // t_0 = cuts.front() < ... < cuts.back() = t_end
  std::vector<double> norms;  // one per interval
  std::size_t size() const noexcept { return norms.size(); }
};

/// Greedy left-to-right cuts at the first sample where the norm accumulated
/// since the previous cut reaches eta. Fails if a single time step already
/// carries more than eta.
IntervalPartition adaptive_partition(const NormSeries& series, double q, double eta);

}  // namespace nlwlab
