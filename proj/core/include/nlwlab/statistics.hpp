#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlwlab/cutoff.hpp"
#include "nlwlab/distribution.hpp"
#include "nlwlab/field.hpp"

namespace nlwlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::span<const double> sorted, double prob);
double median(std::vector<double> values);

struct MomentEstimate {
  double value = 0.0;
  double ci_low = 0.0;   // 95% percentile bootstrap interval
  double ci_high = 0.0;
};

/// (mean |X|^p)^{1/p} with a deterministic bootstrap (seeded by `seed`).
MomentEstimate moment_estimate(std::span<const double> samples, double p, int bootstrap = 200,
                               std::uint64_t seed = 0);

/// Bootstrap standard error of the median.
double bootstrap_median_se(std::span<const double> samples, int bootstrap = 200, std::uint64_t seed = 0);

struct TailFit {
  std::vector<double> lambdas;
  std::vector<double> survival;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t sample_count = 0;
  double q_low = 0.5;
  double q_high = 0.995;
};

inline constexpr std::size_t kTailFitPoints = 30;
inline constexpr std::size_t kTailFitMinSamples = 1000;

/// Regression of log P(X > lambda) against lambda^2 over 30 quantile-spaced
/// lambdas in [q_low, q_high]; P is the direct estimator #{X_i > lambda} / N.
TailFit tail_fit(std::span<const double> samples, double q_low = 0.5, double q_high = 0.995);

struct KhintchineReport {
  std::vector<double> p;
  std::vector<double> moments;  // M_p = (E|X|^p)^{1/p}
  std::vector<double> ratios;   // R_p = M_p / (sqrt(p) ||c||_{l^2})
  double coefficient_norm = 0.0;
  double moment_slope = 0.0;    // slope of log M_p against log p
  double ratio_slope = 0.0;     // slope of log R_p against log p
  double max_ratio_over_r2 = 0.0;
  std::size_t active_cubes = 0;
  bool pass = false;
};

inline constexpr double kKhintchineSlopeLimit = 0.55;
inline constexpr double kKhintchineRatioLimit = 1.5;

/// Monte Carlo of X = sum_n g_n c_n for Hermitian c (indexed by cube id of
/// `cutoff`) with coefficients g_n drawn as in the randomization.
KhintchineReport khintchine_verdict(std::span<const Complex> coefficients, const CutoffFamily& cutoff,
                                    const CoefficientDistribution& dist, std::span<const double> p_list,
                                    std::size_t n_samples, std::uint64_t master_seed, int workers = 1);

}  // namespace nlwlab
