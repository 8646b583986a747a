#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "nlwlab/counter_rng.hpp"
#include "nlwlab/error.hpp"
#include "nlwlab/interval_policy.hpp"
#include "nlwlab/nonlinearity.hpp"
#include "nlwlab/perturbation.hpp"
#include "nlwlab/picard.hpp"
#include "nlwlab/propagator.hpp"
#include "nlwlab/solver.hpp"
#include "nlwlab/spacetime.hpp"
#include "test_support.hpp"

using namespace nlwlab;
using namespace nlwlab::testing;

namespace {

// Smooth data projected onto the dealiasing band and scaled to sup |u0| = amp.
FieldPair banded_pair(const Grid& g, std::uint64_t seed, double amp, double width = 0.4) {
  NonlinearForce force(g, g.dim(), default_dealias_rule(g.dim()));
  FieldPair p = smooth_pair(g, seed, width);
  force.project(p.pos);
  force.project(p.vel);
  const double s = amp / fft_inverse(p.pos).max_abs();
  p.pos *= s;
  p.vel *= s;
  return p;
}

SolverConfig config(double dt, double t_end) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.keep_states = true;
  return cfg;
}

double sup_energy_drift(const Trajectory& tr) {
  double worst = 0.0;
  for (double e : tr.energy) worst = std::max(worst, std::abs(e - tr.energy.front()));
  return worst / tr.energy.front();
}

NormSeries series(std::vector<double> t, std::vector<double> v) {
  NormSeries s;
  for (std::size_t i = 0; i < t.size(); ++i) s.push(t[i], v[i]);
  return s;
}

}  // namespace

TEST_CASE("nonlinearity pointwise") {
  CHECK(nonlinearity(4, 0.0) == 0.0);
  CHECK(nonlinearity(4, 2.0) == 8.0);
  CHECK(nonlinearity(5, -1.0) == -1.0);
  CHECK(nonlinearity(3, 2.0) == doctest::Approx(32.0).epsilon(1e-15));
  CHECK(nonlinearity(5, 8.0) == doctest::Approx(8.0 * 16.0).epsilon(1e-14));
  CHECK(nonlinearity_power(2) == 2.0);
  for (int d = 2; d <= 5; ++d) {
    double prev = -1e300;
    for (double u = -3.0; u <= 3.0; u += 0.125) {
      CHECK(nonlinearity(d, -u) == -nonlinearity(d, u));
      CHECK(nonlinearity(d, u) > prev);
      prev = nonlinearity(d, u);
      // G' = F by a central difference.
      const double h = 1e-5;
      CHECK((potential_density(d, u + h) - potential_density(d, u - h)) / (2 * h) ==
            doctest::Approx(nonlinearity(d, u)).epsilon(1e-7).scale(1.0));
    }
  }
  const Grid g(4, 8, 8.0);
  RealField u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0;
  const RealField fu = nonlinearity(u, 4);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(fu[i] == 8.0);
  // The dealiased force keeps a constant exactly.
  for (DealiasRule rule : {DealiasRule::none, DealiasRule::two_thirds, DealiasRule::padded_three_halves}) {
    NonlinearForce force(g, 4, rule);
    const RealField back = fft_inverse(force.apply(fft_forward(u)));
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(8.0).epsilon(1e-13));
  }
  CHECK(default_dealias_rule(4) == DealiasRule::two_thirds);
  CHECK(default_dealias_rule(5) == DealiasRule::padded_three_halves);
  CHECK_THROWS_AS(parse_dealias_rule("half"), Error);
}

TEST_CASE("nonlinearity difference bound") {
  const Grid g(4, 8, 8.0);
  RealField u(g), v(g);
  DifferenceBound same = nonlinearity_difference_bound(u, u, 4);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0;
  const DifferenceBound one = nonlinearity_difference_bound(u, v, 4);
  CHECK(one.lhs == 1.0);
  CHECK(one.rhs == 1.0);
  CHECK(one.constant == 3.0);
  for (int d : {4, 5}) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      RealField a = noise_field(g, 2 * s), b = noise_field(g, 2 * s + 1);
      // Mix nearby and distant pairs.
      if (s % 2 == 0) {
        for (std::size_t i = 0; i < a.size(); ++i) b[i] = a[i] + 1e-3 * b[i];
      }
      const DifferenceBound r = nonlinearity_difference_bound(a, b, d);
      CHECK(r.lhs <= r.constant * r.rhs);
      CHECK(r.max_ratio <= r.constant);
    }
  }
}

TEST_CASE("energy functional") {
  const Grid g(4, 8, 4.0);
  CHECK(energy(FieldPair(g), 4) == 0.0);
  RealField c(g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.5;
  const FieldPair p{fft_forward(c), SpectralField(g)};
  CHECK(energy(p, 4) == doctest::Approx(std::pow(4.0, 4) * std::pow(1.5, 4) / 4.0).epsilon(1e-13));
  const FieldPair q = smooth_pair(g, 3);
  CHECK(energy(q, 4) > linear_energy(q));
  FieldPair neg = q;
  neg.pos *= -1.0;
  neg.vel *= -1.0;
  CHECK(energy(q, 4) == doctest::Approx(energy(neg, 4)).epsilon(1e-14));
}

TEST_CASE("strang splitting: linear mode and energy") {
  const Grid g(4, 16, 8.0);
  const FieldPair data = banded_pair(g, 7, 0.5);

  SolverConfig lin = config(0.05, 1.0);
  lin.nonlinear = false;
  const Trajectory tl = strang_evolve(data, lin);
  REQUIRE(tl.times.size() == 21);
  for (std::size_t i = 0; i < tl.times.size(); ++i) {
    const FieldPair ref = linear_evolve(data, tl.times[i]);
    CHECK(pair_l2_distance(tl.states[i], ref) <= 1e-11 * (1.0 + std::sqrt(ref.pos.squared_l2())));
  }

  // Energy drift is second order in dt and small in absolute terms.
  const double d1 = sup_energy_drift(strang_evolve(data, config(0.02, 1.0)));
  const double d2 = sup_energy_drift(strang_evolve(data, config(0.01, 1.0)));
  const double d3 = sup_energy_drift(strang_evolve(data, config(0.005, 1.0)));
  MESSAGE("energy drift " << d1 << " " << d2 << " " << d3);
  CHECK(d3 <= 1e-4);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(d2 / d3 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("strang splitting: self-convergence") {
  const Grid g(4, 16, 8.0);
  const FieldPair data = banded_pair(g, 11, 0.8);
  const Trajectory ref = strang_evolve(data, config(0.05 / 32, 1.0));
  auto error = [&](int refine) {
    const Trajectory t = strang_evolve(data, config(0.05 / refine, 1.0));
    double worst = 0.0;
    const auto stride = static_cast<std::size_t>(32 / refine);
    for (std::size_t i = 0; i < t.times.size(); ++i) {
      CHECK(t.times[i] == doctest::Approx(ref.times[i * stride]).epsilon(1e-12));
      worst = std::max(worst, l2_distance(t.states[i].pos, ref.states[i * stride].pos));
    }
    return worst;
  };
  const double e1 = error(1), e2 = error(2), e4 = error(4);
  MESSAGE("self-convergence " << e1 / e2 << " " << e2 / e4);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(e2 / e4 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("blow-up guard") {
  const Grid g(4, 8, 8.0);
  FieldPair p(g);
  p.pos[0] = 1e13;
  SolverConfig cfg = config(0.1, 1.0);
  cfg.dealias = DealiasRule::none;
  CHECK_THROWS_AS(strang_evolve(p, cfg), BlowupError);
}

TEST_CASE("forced equation reductions and two routes") {
  const Grid g(4, 16, 8.0);
  const FieldPair zero(g);
  const FieldPair v0 = banded_pair(g, 21, 0.4);
  SolverConfig cfg = config(0.02, 0.5);

  const Trajectory trivial = solve_v_equation(zero, zero, cfg);
  for (const auto& s : trivial.states) CHECK(s.pos.squared_l2() + s.vel.squared_l2() == 0.0);

  const Trajectory a = solve_v_equation(zero, v0, cfg);
  const Trajectory b = strang_evolve(v0, cfg);
  CHECK(sup_l2_difference(a, b, false) <= 1e-13);

  // u = z + v with v(0) = 0 against the direct solve of u.
  const FieldPair u0 = banded_pair(g, 31, 0.3);
  SolverConfig fine = config(1e-3, 0.5);
  fine.sample_stride = 50;
  const Trajectory v = solve_v_equation(u0, zero, fine);
  const Trajectory u = strang_evolve(u0, fine);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.times.size(); ++i) {
    const FieldPair z = linear_evolve(u0, v.times[i]);
    worst = std::max(worst, l2_distance(z.pos + v.states[i].pos, u.states[i].pos));
  }
  MESSAGE("two-route difference " << worst);
  CHECK(worst <= 1e-6);
}

TEST_CASE("Picard iteration") {
  const Grid g(4, 8, 8.0);
  SolverConfig cfg;
  cfg.picard_tol = 1e-12;
  const PicardResult zero = picard_local_solve(FieldPair(g), 0.0, 0.5, 17, cfg);
  REQUIRE(zero.log.size() == 1);
  CHECK(zero.log[0].difference == 0.0);
  for (const auto& s : zero.states) CHECK(s.pos.squared_l2() == 0.0);

  const FieldPair z = banded_pair(g, 41, 0.6);
  const PicardResult full = picard_local_solve(z, 0.0, 0.8, 33, cfg);
  const PicardResult half = picard_local_solve(z, 0.0, 0.4, 33, cfg);
  REQUIRE(full.log.size() >= 3);
  REQUIRE(half.log.size() >= 3);
  MESSAGE("contraction " << full.log[2].ratio << " vs " << half.log[2].ratio);
  CHECK(half.log[2].ratio <= full.log[2].ratio);
  CHECK(full.log.back().difference <= cfg.picard_tol);

  // Cross-oracle against the splitting solver on the same nodes.
  const double h = 0.8 / 32;
  SolverConfig split = config(h, 0.8);
  const Trajectory s1 = solve_v_equation(z, FieldPair(g), split);
  split.dt = h / 2;
  split.sample_stride = 2;
  const Trajectory s2 = solve_v_equation(z, FieldPair(g), split);
  const double scale = sup_l2_difference(s1, s2) * 4.0 / 3.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < full.states.size(); ++i) {
    CHECK(full.times[i] == doctest::Approx(s1.times[i]).epsilon(1e-12));
    worst = std::max(worst, l2_distance(full.states[i].pos, s1.states[i].pos));
  }
  MESSAGE("picard vs splitting " << worst << ", splitting error scale " << scale);
  CHECK(worst <= 10.0 * std::max(cfg.picard_tol, scale));

  SolverConfig tight = cfg;
  tight.picard_max_iters = 2;
  CHECK_THROWS_AS(picard_local_solve(banded_pair(g, 43, 20.0), 0.0, 2.0, 17, tight), Error);
}

TEST_CASE("space-time norms") {
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(0.05 * i);
  CHECK(spacetime_norm(series(t, std::vector<double>(t.size(), 0.0)), 3.0, 0.0, 1.0) == 0.0);
  const NormSeries c = series(t, std::vector<double>(t.size(), 2.5));
  CHECK(spacetime_norm(c, 3.0, 0.0, 1.0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(spacetime_norm(c, 3.0, 0.2, 0.8) == doctest::Approx(std::cbrt(0.6) * 2.5).epsilon(1e-13));
  CHECK(spacetime_norm(c, INFINITY, 0.0, 1.0) == 2.5);
  CHECK_THROWS_AS(spacetime_norm(c, 3.0, 0.0, 0.2), Error);
  CHECK_THROWS_AS(spacetime_norm(c, 3.0, 0.0, 1.5), Error);

  std::vector<double> ramp;
  for (double x : t) ramp.push_back(x);
  const std::vector<double> run = running_spacetime_norm(series(t, ramp), 2.0);
  for (std::size_t i = 1; i < run.size(); ++i) CHECK(run[i] >= run[i - 1]);

  // The recorded L^6 series against a recomputation from stored states.
  const Grid g(4, 8, 8.0);
  SolverConfig cfg = config(0.05, 1.0);
  cfg.record_r = {6.0};
  const Trajectory tr = strang_evolve(banded_pair(g, 51, 0.7), cfg);
  std::vector<double> vals;
  for (const auto& s : tr.states) vals.push_back(lebesgue_norm(fft_inverse(s.pos), 6.0));
  double acc = 0.0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    acc += 0.5 * (tr.times[i] - tr.times[i - 1]) * (std::pow(vals[i], 3) + std::pow(vals[i - 1], 3));
  CHECK(rel_diff(tr.spacetime(3.0, 6.0, 0.0, 1.0), std::cbrt(acc)) <= 1e-10);

  const ExponentPair x4 = critical_pair(4), x5 = critical_pair(5), x2 = critical_pair(2);
  CHECK(x4.q == 3.0);
  CHECK(x4.r == 6.0);
  CHECK(x5.q == doctest::Approx(7.0 / 3.0));
  CHECK(x5.r == doctest::Approx(14.0 / 3.0));
  CHECK(x2.q == 3.0);
}

TEST_CASE("admissible pairs") {
  CHECK(admissible_pair_check(4, 1.0, 3.0, 6.0));
  CHECK(admissible_pair_check(4, 1.0, 2.0, 8.0));
  CHECK(admissible_pair_check(4, 0.0, INFINITY, 2.0));
  CHECK_FALSE(admissible_pair_check(4, 1.0, 3.0, 7.0));
  CHECK(admissible_pair_check(5, 1.0, 7.0 / 3.0, 14.0 / 3.0));
  CHECK_FALSE(admissible_pair_check(4, 1.0, 1.5, 12.0));
  CHECK_FALSE(admissible_pair_check(4, 1.0, INFINITY, INFINITY));
}

TEST_CASE("adaptive partition") {
  std::vector<double> t;
  for (int i = 0; i <= 1000; ++i) t.push_back(0.001 * i);
  const IntervalPartition zero = adaptive_partition(series(t, std::vector<double>(t.size(), 0.0)), 3.0, 0.1);
  CHECK(zero.size() == 1);
  CHECK(zero.cuts.front() == 0.0);
  CHECK(zero.cuts.back() == 1.0);

  // Additive accumulation (q = 1) of a smooth profile with total 3.7 eta.
  const double eta = 0.25;
  auto profile = [](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); };
  const double total = 1.0 + 0.5 * (1.0 - std::cos(3.0)) / 3.0;
  auto sample = [&](std::size_t points) {
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i <= points; ++i) {
      ts.push_back(static_cast<double>(i) / points);
      vs.push_back(profile(ts.back()) * 3.7 * eta / total);
    }
    return series(ts, vs);
  };
  const IntervalPartition p = adaptive_partition(sample(500), 1.0, eta);
  CHECK(p.size() == 4);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    CHECK(p.norms[i] >= eta / 2);
    CHECK(p.norms[i] <= 2 * eta);
  }
  const IntervalPartition fine = adaptive_partition(sample(1000), 1.0, eta);
  REQUIRE(fine.size() == p.size());
  for (std::size_t i = 0; i < p.cuts.size(); ++i) CHECK(std::abs(fine.cuts[i] - p.cuts[i]) <= 1.0 / 500 + 1e-12);

  // l^3 combination: more intervals, each still within [eta/2, 2 eta].
  const IntervalPartition cubic = adaptive_partition(sample(500), 3.0, eta);
  CHECK(cubic.size() >= 1);
  for (std::size_t i = 0; i + 1 < cubic.size(); ++i) {
    CHECK(cubic.norms[i] >= eta / 2);
    CHECK(cubic.norms[i] <= 2 * eta);
  }
  CHECK_THROWS_AS(adaptive_partition(sample(4), 1.0, 0.01), Error);
}

TEST_CASE("step policy") {
  const double value = tau_star_second_branch(0.0, 1.0, 0.1, 4);
  CHECK(value == doctest::Approx(0.5 * std::pow(1.0 / (2.0 * std::log(20.0)), 1.5)).epsilon(1e-14));
  CHECK(value == doctest::Approx(0.03413).epsilon(1e-3));
  CHECK_THROWS_AS(tau_star_second_branch(1.0 / 3.0, 1.0, 0.1, 4), Error);
  CHECK(tau_star_second_branch(0.0, 1.0, 1e-12, 4) < tau_star_second_branch(0.0, 1.0, 1e-3, 4));
  CHECK(tau_star_second_branch(0.0, 1.0, 1e-300, 4) < 2e-4);
  CHECK(tau_star_second_branch(0.0, 2.0, 0.1, 4) <= value);

  TauTable table;
  table.add({1.0, 1.0, 0.2});
  table.add({2.0, 1.0, 0.1});
  table.add({4.0, 2.0, 0.01});
  for (double a : {0.5, 1.0, 1.5}) {
    CHECK(tau_star(2 * a, 1.0, 0.0, 1.0, 0.5, 4, &table) <= tau_star(a, 1.0, 0.0, 1.0, 0.5, 4, &table));
  }
  CHECK(table.lookup(1.0, 1.0) == 0.2);
  CHECK(table.lookup(3.0, 1.0) == 0.01);
  CHECK(table.lookup(1.5, 0.5) == 0.1);
  CHECK_THROWS_AS(table.lookup(5.0, 1.0), Error);
  std::stringstream io;
  table.write_json(io);
  const TauTable back = TauTable::read_json(io);
  REQUIRE(back.entries().size() == 3);
  CHECK(back.entries()[2].tau == 0.01);
}

TEST_CASE("Gronwall bound") {
  std::vector<double> t, one, b;
  for (int i = 0; i <= 20000; ++i) {
    t.push_back(1e-4 * i);
    one.push_back(1.0);
    b.push_back(1.0 + std::sin(t.back()));
  }
  CHECK(gronwall_bound(3.0, 0.0, one, t) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(gronwall_bound(1.0, 0.5, one, t) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(gronwall_closed_form(1.0, 0.5, 2.0) == 4.0);
  CHECK_THROWS_AS(gronwall_bound(1.0, 1.0, one, t), Error);

  // Equality case u' = b u^alpha, u(0) = c, by RK4.
  const double c = 0.7, alpha = 0.4;
  double u = c;
  const double h = 1e-4;
  auto rhs = [&](double s, double y) { return (1.0 + std::sin(s)) * std::pow(y, alpha); };
  for (int i = 0; i < 20000; ++i) {
    const double s = h * i;
    const double k1 = rhs(s, u), k2 = rhs(s + h / 2, u + h / 2 * k1), k3 = rhs(s + h / 2, u + h / 2 * k2),
                 k4 = rhs(s + h, u + h * k3);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(rel_diff(gronwall_bound(c, alpha, b, t), u) <= 1e-6);
}

TEST_CASE("energy bound right-hand side") {
  CHECK(energy_bound_rhs(ForcingNorms{0.0, 0.0, std::nullopt}, 4) == 0.0);
  CHECK(energy_bound_rhs(ForcingNorms{0.0, std::nullopt, 0.0}, 5) == 0.0);
  CHECK_THROWS_AS(energy_bound_rhs(ForcingNorms{1.0, std::nullopt, std::nullopt}, 4), Error);

  // z = constant c (zero mode, no velocity) is time-constant under the flow.
  const Grid g(4, 8, 4.0);
  RealField cst(g);
  for (std::size_t i = 0; i < cst.size(); ++i) cst[i] = 0.3;
  const FieldPair z{fft_forward(cst), SpectralField(g)};
  SolverConfig cfg = config(0.05, 1.0);
  cfg.record_r = energy_bound_exponents(4);
  const Trajectory tr = solve_v_equation(z, FieldPair(g), cfg);
  const ForcingNorms n = forcing_norms(tr, 1.0, 4);
  const double x = 0.3 * std::pow(4.0, 4.0 / 6.0);  // ||c||_{L^6} on the box
  CHECK(rel_diff(*n.x_norm, x) <= 1e-12);
  CHECK(rel_diff(*n.l1_linf, 0.3) <= 1e-12);
  CHECK(rel_diff(energy_bound_rhs(tr, 1.0, 4), x * x * x * std::exp(0.3)) <= 1e-12);

  double prev = 0.0;
  const Trajectory moving = solve_v_equation(banded_pair(g, 61, 0.5), FieldPair(g), cfg);
  for (double horizon : {0.4, 0.6, 0.8, 1.0}) {
    const double r = energy_bound_rhs(moving, horizon, 4);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("perturbation comparison") {
  const Grid g(4, 8, 8.0);
  SolverConfig cfg = config(0.02, 0.6);
  cfg.record_r = {6.0};
  cfg.record_error_term = true;
  const FieldPair data = banded_pair(g, 71, 0.5);
  const Trajectory w = strang_evolve(data, cfg);
  const PerturbationReport same = perturbation_compare(solve_v_equation(FieldPair(g), data, cfg), w, 4);
  CHECK(same.sup_difference == 0.0);
  CHECK(same.x_norm_difference == 0.0);
  CHECK(same.v_x_norm > 0.0);

  // Forcing scaled by theta: the difference tracks ||e|| linearly.
  const FieldPair z = banded_pair(g, 73, 0.05);
  std::vector<double> ratio;
  for (double theta : {1.0, 0.5, 0.25}) {
    FieldPair zt = z;
    zt.pos *= theta;
    zt.vel *= theta;
    const PerturbationReport r = perturbation_compare(solve_v_equation(zt, data, cfg), w, 4);
    CHECK(r.error_term > 0.0);
    ratio.push_back(r.sup_difference / r.error_term);
  }
  for (double q : ratio) {
    CHECK(q / ratio[0] >= 0.5);
    CHECK(q / ratio[0] <= 2.0);
  }

  // Doubling the initial offset doubles the difference (small-offset regime).
  const FieldPair rho = banded_pair(g, 75, 1.0);
  std::vector<double> diff;
  for (double eps : {1e-4, 2e-4}) {
    FieldPair shifted = data;
    shifted.pos.add_scaled(eps, rho.pos);
    const PerturbationReport r = perturbation_compare(solve_v_equation(FieldPair(g), shifted, cfg), w, 4);
    CHECK(r.initial_difference > 0.0);
    diff.push_back(r.sup_difference);
  }
  CHECK(diff[1] / diff[0] / 2.0 >= 0.5);
  CHECK(diff[1] / diff[0] / 2.0 <= 2.0);

  SolverConfig other = cfg;
  other.dt = 0.03;
  CHECK_THROWS_AS(perturbation_compare(strang_evolve(data, other), w, 4), Error);
}
