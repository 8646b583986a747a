#include "nlwlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/ensemble.hpp"
#include "nlwlab/error.hpp"
#include "nlwlab/randomize.hpp"

namespace nlwlab {

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::shape_mismatch, "linear_regression: size mismatch");
  require(x.size() >= 2, ErrorCode::insufficient_samples, "linear_regression needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::degenerate_samples, "linear_regression: abscissas are constant");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double quantile(std::span<const double> sorted, double prob) {
  require(!sorted.empty(), ErrorCode::insufficient_samples, "quantile of an empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile(values, 0.5);
}

MomentEstimate moment_estimate(std::span<const double> samples, double p, int bootstrap,
                               std::uint64_t seed) {
  require(!samples.empty(), ErrorCode::insufficient_samples, "moment_estimate: empty sample set");
  require(p >= 1.0, ErrorCode::domain, "moment_estimate: p must be >= 1");
  for (double v : samples) require(std::isfinite(v), ErrorCode::invalid_argument, "moment_estimate: non-finite sample");
  std::vector<double> powered(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) powered[i] = std::pow(std::abs(samples[i]), p);
  MomentEstimate est;
  est.value = std::pow(std::accumulate(powered.begin(), powered.end(), 0.0) / powered.size(), 1.0 / p);
  if (bootstrap <= 1) {
    est.ci_low = est.ci_high = est.value;
    return est;
  }
  std::vector<double> reps(static_cast<std::size_t>(bootstrap));
  const DrawKey key{seed, 0x6b6f6f74ULL};
  const std::uint64_t n = samples.size();
  for (int b = 0; b < bootstrap; ++b) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      acc += powered[keyed_bits(key, {static_cast<std::uint64_t>(b), i}) % n];
    }
    reps[static_cast<std::size_t>(b)] = std::pow(acc / static_cast<double>(n), 1.0 / p);
  }
  std::sort(reps.begin(), reps.end());
  est.ci_low = quantile(reps, 0.025);
  est.ci_high = quantile(reps, 0.975);
  return est;
}

double bootstrap_median_se(std::span<const double> samples, int bootstrap, std::uint64_t seed) {
  require(samples.size() >= 2, ErrorCode::insufficient_samples, "bootstrap needs >= 2 samples");
  const DrawKey key{seed, 0x6d656469ULL};
  const std::uint64_t n = samples.size();
  std::vector<double> reps;
  std::vector<double> resample(n);
  for (int b = 0; b < bootstrap; ++b) {
    for (std::uint64_t i = 0; i < n; ++i) resample[i] = samples[keyed_bits(key, {static_cast<std::uint64_t>(b), i}) % n];
    reps.push_back(median(resample));
  }
  const double m = std::accumulate(reps.begin(), reps.end(), 0.0) / reps.size();
  double var = 0.0;
  for (double r : reps) var += (r - m) * (r - m);
  return std::sqrt(var / (reps.size() - 1));
}

TailFit tail_fit(std::span<const double> samples, double q_low, double q_high) {
  require(q_low > 0.0 && q_high < 1.0 && q_low < q_high, ErrorCode::invalid_argument,
          "tail_fit: quantile range must lie inside (0, 1)");
  require(samples.size() >= kTailFitMinSamples, ErrorCode::insufficient_samples,
          "tail_fit needs at least " + std::to_string(kTailFitMinSamples) + " samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) require(std::isfinite(v), ErrorCode::invalid_argument, "tail_fit: non-finite sample");
  std::sort(sorted.begin(), sorted.end());
  require(sorted.back() - sorted.front() > 1e-12 * std::max(1.0, std::abs(sorted.back())),
          ErrorCode::degenerate_samples, "tail_fit: samples are (numerically) constant");
  TailFit fit;
  fit.sample_count = sorted.size();
  fit.q_low = q_low;
  fit.q_high = q_high;
  std::vector<double> x, y;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t k = 0; k < kTailFitPoints; ++k) {
    const double prob = q_low + (q_high - q_low) * static_cast<double>(k) / (kTailFitPoints - 1);
    const double lambda = quantile(sorted, prob);
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lambda);
    const double surv = static_cast<double>(above) / n;
    fit.lambdas.push_back(lambda);
    fit.survival.push_back(surv);
    if (above > 0) {
      x.push_back(lambda * lambda);
      y.push_back(std::log(surv));
    }
  }
  const LinearFit lf = linear_regression(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  return fit;
}

KhintchineReport khintchine_verdict(std::span<const Complex> coefficients, const CutoffFamily& cutoff,
                                    const CoefficientDistribution& dist, std::span<const double> p_list,
                                    std::size_t n_samples, std::uint64_t master_seed, int workers) {
  require(coefficients.size() == cutoff.cube_count(), ErrorCode::shape_mismatch,
          "khintchine_verdict: one coefficient per cube");
  require(n_samples >= 2, ErrorCode::insufficient_samples, "khintchine_verdict needs >= 2 samples");
  require(p_list.size() >= 2, ErrorCode::invalid_argument, "khintchine_verdict needs >= 2 exponents");
  // Hermitian input check, reusing the draw symmetry test.
  const std::vector<Complex> c(coefficients.begin(), coefficients.end());
  (void)RandomizedDraw::from_coefficients(cutoff, c, c);

  KhintchineReport report;
  double norm2 = 0.0;
  std::vector<std::size_t> active;
  for (std::size_t id = 0; id < c.size(); ++id) {
    norm2 += std::norm(c[id]);
    if (c[id] != Complex{}) active.push_back(id);
  }
  report.coefficient_norm = std::sqrt(norm2);
  report.active_cubes = active.size();
  require(norm2 > 0.0, ErrorCode::degenerate_samples, "khintchine_verdict: zero coefficients");

  std::vector<double> x(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    const RandomizedDraw draw = RandomizedDraw::generate({master_seed, i}, dist, cutoff);
    Complex acc{};
    for (std::size_t id : active) acc += draw.coefficient(0, id) * c[id];
    x[i] = acc.real();
  });

  std::vector<double> logp, logm, logr;
  for (double p : p_list) {
    const double m = moment_estimate(x, p, 0).value;
    report.p.push_back(p);
    report.moments.push_back(m);
    report.ratios.push_back(m / (std::sqrt(p) * report.coefficient_norm));
    logp.push_back(std::log(p));
    logm.push_back(std::log(m));
    logr.push_back(std::log(report.ratios.back()));
  }
  report.moment_slope = linear_regression(logp, logm).slope;
  report.ratio_slope = linear_regression(logp, logr).slope;
  std::size_t ref = 0;
  for (std::size_t k = 0; k < report.p.size(); ++k) {
    if (report.p[k] == 2.0) ref = k;
  }
  const double r2 = report.ratios[ref];
  report.max_ratio_over_r2 = *std::max_element(report.ratios.begin(), report.ratios.end()) / r2;
  report.pass = report.moment_slope <= kKhintchineSlopeLimit &&
                report.max_ratio_over_r2 <= kKhintchineRatioLimit;
  return report;
}

}  // namespace nlwlab
