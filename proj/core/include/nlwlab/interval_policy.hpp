#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nlwlab/solver.hpp"

namespace nlwlab {

/// Empirical first branch tau(A, K, gamma) of the step policy: for each
/// calibrated bracket (A_i, K_i) the largest tried step at which the Picard
/// iteration contracted.
class TauTable {
 public:
  struct Entry {
    double energy_level;  // A
    double forcing_level; // K
    double tau;
  };

  void add(Entry e);
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Largest tau over the brackets that dominate (A, K); throws if (A, K)
  /// lies outside the calibrated range.
  double lookup(double energy_level, double forcing_level) const;

  void write_json(std::ostream& out) const;
  static TauTable read_json(std::istream& in);

 private:
  std::vector<Entry> entries_;
};

/// 1/2 (c / (2 T^2 log(2T/eps)))^{(d+2) / (2(d-2-gamma(d+2)))} with c = 1.
double tau_star_second_branch(double gamma, double horizon, double eps, int dim, double c = 1.0);

/// min(table.lookup(A, K), second branch). Without a table only the second
/// branch is returned.
double tau_star(double energy_level, double forcing_level, double gamma, double horizon, double eps,
                int dim, const TauTable* table = nullptr);

/// (c^{1-alpha} + (1-alpha) int_0^t b)^{1/(1-alpha)}, the integral by the
/// trapezoid rule over the samples (times[0] = 0 .. times.back() = t).
double gronwall_bound(double c, double alpha, std::span<const double> b, std::span<const double> times);
double gronwall_closed_form(double c, double alpha, double integral_b);

/// The z-norms the energy bound is stated in.
struct ForcingNorms {
  std::optional<double> x_norm;   // L^{(d+2)/(d-2)}_t L^{2(d+2)/(d-2)}_x
  std::optional<double> l1_linf;  // L^1_t L^inf_x (d = 4)
  std::optional<double> l1_l10;   // L^1_t L^10_x (d = 5)
};

/// d = 4: ||z||_X^3 exp(||z||_{L^1 L^inf}); d = 5: ||z||_X^{7/3} + ||z||_{L^1 L^10}^5 (C = 1).
double energy_bound_rhs(const ForcingNorms& norms, int dim);
/// Reads the accumulators from the forcing series of a trajectory over [0, T].
double energy_bound_rhs(const Trajectory& traj, double horizon, int dim);
ForcingNorms forcing_norms(const Trajectory& traj, double horizon, int dim);
/// Spatial exponents the energy bound needs recorded for the given dimension.
std::vector<double> energy_bound_exponents(int dim);

}  // namespace nlwlab
