#include "nlwlab/interval_policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>
#include "nlwlab/error.hpp"

namespace nlwlab {

void TauTable::add(Entry e) {
  require(e.energy_level >= 0.0 && e.forcing_level >= 0.0 && e.tau > 0.0, ErrorCode::invalid_argument,
          "TauTable entry must have nonnegative levels and positive tau");
  entries_.push_back(e);
}

double TauTable::lookup(double energy_level, double forcing_level) const {
  // A step that contracts on a larger bracket also contracts on (A, K).
  double best = -1.0;
  for (const auto& e : entries_) {
    if (e.energy_level >= energy_level && e.forcing_level >= forcing_level) best = std::max(best, e.tau);
  }
  require(best > 0.0, ErrorCode::domain, "TauTable: (A, K) outside the calibrated range");
  return best;
}

void TauTable::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    doc.push_back({{"A", e.energy_level}, {"K", e.forcing_level}, {"tau", e.tau}});
  }
  out << doc.dump(2) << '\n';
}

TauTable TauTable::read_json(std::istream& in) {
  TauTable table;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& e : doc) table.add({e.at("A").get<double>(), e.at("K").get<double>(), e.at("tau").get<double>()});
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::io, std::string("malformed tau table: ") + ex.what());
  }
  return table;
}

double tau_star_second_branch(double gamma, double horizon, double eps, int dim, double c) {
  require(dim >= 3, ErrorCode::invalid_argument, "tau_star needs d >= 3");
  require(horizon > 0.0 && eps > 0.0 && c > 0.0 && gamma >= 0.0, ErrorCode::invalid_argument,
          "tau_star arguments must be positive");
  const double crit = (dim - 2.0) / (dim + 2.0);
  require(gamma < crit, ErrorCode::domain, "tau_star: gamma must be below (d-2)/(d+2)");
  require(eps < 2.0 * horizon, ErrorCode::domain, "tau_star: needs eps < 2T so that log(2T/eps) > 0");
  const double exponent = (dim + 2.0) / (2.0 * (dim - 2.0 - gamma * (dim + 2.0)));
  const double base = c / (2.0 * horizon * horizon * std::log(2.0 * horizon / eps));
  return 0.5 * std::pow(base, exponent);
}

double tau_star(double energy_level, double forcing_level, double gamma, double horizon, double eps,
                int dim, const TauTable* table) {
  require(energy_level > 0.0 && forcing_level > 0.0, ErrorCode::invalid_argument,
          "tau_star: A and K must be positive");
  const double second = tau_star_second_branch(gamma, horizon, eps, dim);
  if (table == nullptr || table->empty()) return second;
  return std::min(table->lookup(energy_level, forcing_level), second);
}

double gronwall_closed_form(double c, double alpha, double integral_b) {
  require(c >= 0.0 && integral_b >= 0.0, ErrorCode::invalid_argument, "gronwall: c and b must be >= 0");
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::domain, "gronwall: alpha must be in [0, 1)");
  const double beta = 1.0 - alpha;
  return std::pow(std::pow(c, beta) + beta * integral_b, 1.0 / beta);
}

double gronwall_bound(double c, double alpha, std::span<const double> b, std::span<const double> times) {
  require(b.size() == times.size() && !b.empty(), ErrorCode::shape_mismatch,
          "gronwall_bound: one b sample per time");
  double integral = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    require(b[i] >= 0.0, ErrorCode::invalid_argument, "gronwall_bound: b must be nonnegative");
    if (i > 0) integral += 0.5 * (times[i] - times[i - 1]) * (b[i] + b[i - 1]);
  }
  return gronwall_closed_form(c, alpha, integral);
}

std::vector<double> energy_bound_exponents(int dim) {
  switch (dim) {
    case 4: return {6.0, std::numeric_limits<double>::infinity()};
    case 5: return {14.0 / 3.0, 10.0};
    default: fail(ErrorCode::invalid_argument, "energy bound is stated for d = 4 and d = 5");
  }
}

double energy_bound_rhs(const ForcingNorms& norms, int dim) {
  require(norms.x_norm.has_value(), ErrorCode::invalid_argument, "energy_bound_rhs: missing X-norm");
  if (dim == 4) {
    require(norms.l1_linf.has_value(), ErrorCode::invalid_argument,
            "energy_bound_rhs: missing L^1_t L^inf_x accumulator");
    return std::pow(*norms.x_norm, 3.0) * std::exp(*norms.l1_linf);
  }
  if (dim == 5) {
    require(norms.l1_l10.has_value(), ErrorCode::invalid_argument,
            "energy_bound_rhs: missing L^1_t L^10_x accumulator");
    return std::pow(*norms.x_norm, 7.0 / 3.0) + std::pow(*norms.l1_l10, 5.0);
  }
  fail(ErrorCode::invalid_argument, "energy bound is stated for d = 4 and d = 5");
}

ForcingNorms forcing_norms(const Trajectory& traj, double horizon, int dim) {
  const ExponentPair x = critical_pair(dim);
  ForcingNorms n;
  n.x_norm = traj.spacetime(x.q, x.r, 0.0, horizon, true);
  if (dim == 4) n.l1_linf = traj.spacetime(1.0, std::numeric_limits<double>::infinity(), 0.0, horizon, true);
  if (dim == 5) n.l1_l10 = traj.spacetime(1.0, 10.0, 0.0, horizon, true);
  return n;
}

double energy_bound_rhs(const Trajectory& traj, double horizon, int dim) {
  return energy_bound_rhs(forcing_norms(traj, horizon, dim), dim);
}

}  // namespace nlwlab
