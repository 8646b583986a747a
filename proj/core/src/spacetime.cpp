#include "nlwlab/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlwlab/error.hpp"

namespace nlwlab {

namespace {

double interpolate(const NormSeries& s, double t) {
  auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
  if (it == s.times.end()) return s.values.back();
  const auto i = static_cast<std::size_t>(it - s.times.begin());
  if (*it == t || i == 0) return s.values[i];
  const double w = (t - s.times[i - 1]) / (s.times[i] - s.times[i - 1]);
  return (1.0 - w) * s.values[i - 1] + w * s.values[i];
}

double qpow(double v, double q) { return q == 1.0 ? v : q == 2.0 ? v * v : q == 3.0 ? v * v * v : std::pow(v, q); }

}  // namespace

void NormSeries::push(double t, double value) {
  require(times.empty() || t > times.back(), ErrorCode::invalid_argument,
          "NormSeries: times must be strictly increasing");
  times.push_back(t);
  values.push_back(value);
}

double spacetime_norm(const NormSeries& series, double q, double a, double b, std::size_t min_samples) {
  require(q >= 1.0, ErrorCode::domain, "time exponent must be >= 1");
  require(series.times.size() == series.values.size(), ErrorCode::shape_mismatch,
          "NormSeries: times and values differ in length");
  if (series.times.empty()) fail(ErrorCode::insufficient_samples, "empty norm series");
  require(a <= b, ErrorCode::invalid_argument, "spacetime_norm: empty interval");
  const double slack = 1e-12 * std::max(1.0, std::abs(series.end()));
  require(a >= series.start() - slack && b <= series.end() + slack, ErrorCode::domain,
          "spacetime_norm: interval outside the recorded range");
  a = std::max(a, series.start());
  b = std::min(b, series.end());
  const auto lo = std::lower_bound(series.times.begin(), series.times.end(), a) - series.times.begin();
  const auto hi = std::upper_bound(series.times.begin(), series.times.end(), b) - series.times.begin();
  require(static_cast<std::size_t>(hi - lo) >= min_samples, ErrorCode::insufficient_samples,
          "spacetime_norm: " + std::to_string(hi - lo) + " samples in interval, need " +
              std::to_string(min_samples));

  std::vector<double> t{a}, v{interpolate(series, a)};
  for (auto i = lo; i < hi; ++i) {
    if (series.times[i] > a && series.times[i] < b) {
      t.push_back(series.times[i]);
      v.push_back(series.values[i]);
    }
  }
  if (b > a) {
    t.push_back(b);
    v.push_back(interpolate(series, b));
  }
  if (std::isinf(q)) return *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    acc += 0.5 * (t[i] - t[i - 1]) * (qpow(v[i - 1], q) + qpow(v[i], q));
  }
  return std::pow(acc, 1.0 / q);
}

std::vector<double> running_spacetime_norm(const NormSeries& series, double q) {
  require(q >= 1.0, ErrorCode::domain, "time exponent must be >= 1");
  std::vector<double> out(series.times.size(), 0.0);
  if (out.empty()) return out;
  if (std::isinf(q)) {
    double m = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = m = std::max(m, series.values[i]);
    return out;
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    acc += 0.5 * (series.times[i] - series.times[i - 1]) *
           (qpow(series.values[i - 1], q) + qpow(series.values[i], q));
    out[i] = std::pow(acc, 1.0 / q);
  }
  return out;
}

ExponentPair critical_pair(int dim) {
  require(dim >= 2 && dim <= 5, ErrorCode::invalid_argument, "dimension must be in [2, 5]");
  if (dim == 2) return {3.0, 6.0};
  return {(dim + 2.0) / (dim - 2.0), 2.0 * (dim + 2.0) / (dim - 2.0)};
}

bool admissible_pair_check(int dim, double gamma, double q, double r) {
  require(dim >= 2, ErrorCode::invalid_argument, "admissible_pair_check needs d >= 2");
  constexpr double tol = 1e-12;
  if (!(q >= 2.0)) return false;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  if (std::isinf(r)) return false;
  if (!(r >= 2.0)) return false;
  if (std::isinf(q) && r != 2.0) {
    // (inf, r) with r > 2 is not part of the documented family.
    return false;
  }
  const double inv_r = 1.0 / r;
  if (inv_q + 0.5 * (dim - 1) * inv_r > 0.25 * (dim - 1) + tol) return false;
  return std::abs(inv_q + dim * inv_r - (0.5 * dim - gamma)) <= tol;
}

IntervalPartition adaptive_partition(const NormSeries& series, double q, double eta) {
  require(eta > 0.0, ErrorCode::invalid_argument, "adaptive_partition: eta must be positive");
  require(q >= 1.0 && std::isfinite(q), ErrorCode::domain, "adaptive_partition needs finite q >= 1");
  require(series.times.size() >= 2, ErrorCode::insufficient_samples,
          "adaptive_partition needs at least two samples");
  const double target = qpow(eta, q);
  IntervalPartition part;
  part.cuts.push_back(series.start());
  double acc = 0.0;
  for (std::size_t i = 1; i < series.times.size(); ++i) {
    const double step = 0.5 * (series.times[i] - series.times[i - 1]) *
                        (qpow(series.values[i - 1], q) + qpow(series.values[i], q));
    require(step <= target, ErrorCode::domain,
            "adaptive_partition: eta is below the time-sampling resolution");
    acc += step;
    if (acc >= target && i + 1 < series.times.size()) {
      part.cuts.push_back(series.times[i]);
      part.norms.push_back(std::pow(acc, 1.0 / q));
      acc = 0.0;
    }
  }
  part.cuts.push_back(series.end());
  part.norms.push_back(std::pow(acc, 1.0 / q));
  return part;
}

}  // namespace nlwlab
