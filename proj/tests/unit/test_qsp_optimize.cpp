#include <doctest.h>

#include <cmath>
#include <random>

#include "dyson_target.hpp"
#include "error.hpp"
#include "qsp_optimize.hpp"
#include "sos_factor.hpp"

using namespace mqsp;

namespace {

TorusGrid zero_grid(int n1, int n2) {
  TorusGrid g(n1, n2);
  for (auto& v : g.values) v = 0.0;
  return g;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> central_difference(const CircuitSpec& spec, const TorusGrid& tg, double h) {
  std::vector<double> x = spec.flatten(), g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (cost(CircuitSpec::unflatten(spec.schedule, xp), tg) - cost(CircuitSpec::unflatten(spec.schedule, xm), tg)) /
           (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("cost examples") {
  std::mt19937_64 rng(1);
  auto c = random_circuit(Schedule::parse("RRIRI"), rng);
  auto P = circuit_polynomials(c).P;
  auto tg = target_grid_for(P, c.schedule);
  CHECK(cost(c, tg) < 1e-24);

  auto z = zero_grid(tg.N1, tg.N2);
  const double c0 = cost(c, z);
  CHECK(c0 <= 1.0 + 1e-14);
  CHECK(c0 == doctest::Approx(P.coeff_norm2()).epsilon(1e-12));

  for (int trial = 0; trial < 5; ++trial) {
    auto spec = random_circuit(Schedule::parse("RIRRI"), rng);
    auto target = circuit_polynomials(random_circuit(Schedule::parse("RIRRI"), rng)).P;
    const double grid_cost = cost(spec, target_grid_for(target, spec.schedule));
    CHECK(std::abs(grid_cost - cost_coefficients(spec, target)) < 1e-12);
    CHECK(grid_cost >= 0.0);
  }
}

TEST_CASE("Parseval holds for Laurent targets outside the circuit window") {
  std::mt19937_64 rng(2);
  DysonParams p;
  p.alphaRT = 0.8;
  p.betaIT = 0.4;
  p.dR_seg = 2;
  p.M = 2;
  p.normalize_sup = true;
  auto t = build_dyson_target(p);
  auto spec = random_circuit(Schedule::blocks(2, 2, 1), rng);
  CHECK(std::abs(cost(spec, target_grid_for(t.P_delta, spec.schedule)) - cost_coefficients(spec, t.P_delta)) < 1e-12);
}

TEST_CASE("gradient examples") {
  std::mt19937_64 rng(3);
  auto c = random_circuit(Schedule::parse("RIRI"), rng);
  auto tg = target_grid_for(circuit_polynomials(c).P, c.schedule);
  CHECK(norm2(gradient(c, tg)) < 1e-10);

  for (const char* s : {"RI", "RRII", "RIRIRI", "RRRIII"}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto spec = random_circuit(Schedule::parse(s), rng);
      auto target = circuit_polynomials(random_circuit(Schedule::parse(s), rng)).P;
      auto g = target_grid_for(target, spec.schedule);
      auto an = gradient(spec, g);
      auto fd = central_difference(spec, g, 1e-5);
      std::vector<double> diff(an.size());
      for (std::size_t i = 0; i < an.size(); ++i) diff[i] = an[i] - fd[i];
      CHECK(norm2(diff) / norm2(an) < 1e-6);
      std::vector<double> g2;
      CHECK(cost_and_gradient(spec, g, g2) == doctest::Approx(cost(spec, g)));
    }
  }

  // Depth 0: F = |e^{i phi} cos theta - t|^2, dF/dphi = 2 Re(conj(e^{i phi} cos theta - t) i e^{i phi} cos theta).
  CircuitSpec d0;
  d0.angles = {{0.7, 0.4}};
  const cplx t(0.2, -0.3);
  TorusGrid tg0(16, 16);
  for (auto& v : tg0.values) v = t;
  const cplx p = std::polar(std::cos(0.7), 0.4);
  const double dphi = 2.0 * std::real(std::conj(p - t) * cplx(0, 1) * p);
  const double dtheta = 2.0 * std::real(std::conj(p - t) * std::polar(-std::sin(0.7), 0.4));
  auto g0 = gradient(d0, tg0);
  CHECK(g0[1] == doctest::Approx(dphi).epsilon(1e-12));
  CHECK(g0[0] == doctest::Approx(dtheta).epsilon(1e-12));
}

TEST_CASE("refine examples") {
  std::mt19937_64 rng(4);
  auto c = random_circuit(Schedule::blocks(3, 3, 1), rng);
  auto P = circuit_polynomials(c).P;
  auto tg = target_grid_for(P, c.schedule);

  auto warm = refine(c, tg);
  CHECK(warm.report.final_cost < 1e-20);
  CHECK(warm.report.iterations <= 50);

  std::normal_distribution<double> g(0.0, 1e-3);
  auto x = c.flatten();
  for (auto& v : x) v += g(rng);
  auto pert = refine(CircuitSpec::unflatten(c.schedule, x), tg);
  CHECK(pert.report.initial_cost > 1e-10);
  CHECK(pert.report.final_cost < 1e-18);
  CHECK(pert.report.final_cost <= pert.report.initial_cost);
  for (std::size_t i = 1; i < pert.report.trace.size(); ++i) {
    CHECK(pert.report.trace[i].cost <= pert.report.trace[i - 1].cost);
  }
}

TEST_CASE("off-manifold Dyson target pins at a positive residual") {
  DysonParams p;
  p.alphaRT = 0.8;
  p.betaIT = 0.4;
  p.dR_seg = 2;
  p.M = 2;
  p.normalize_sup = true;
  auto t = build_dyson_target(p);
  PipelineOptions opts;
  opts.lenient = true;
  opts.restarts = 4;
  opts.seed = 17;
  auto res = angles_pipeline(t.P_delta, Schedule::blocks(2, 2, 1), {}, opts);
  CHECK(res.report.final_cost > 0.01);
  CHECK(res.report.final_cost < 0.5);
  CHECK(res.report.restart_results.size() == 4);
  for (double f : res.report.restart_results) CHECK(f >= res.report.final_cost);
  // Strict mode refuses a target with mass outside the circuit window.
  PipelineOptions strict;
  CHECK_THROWS_AS(angles_pipeline(t.P_delta, Schedule::blocks(2, 2, 1), {}, strict), Error);
}

TEST_CASE("multistart examples") {
  std::mt19937_64 rng(5);
  auto c = random_circuit(Schedule::blocks(2, 2, 1), rng);
  auto tg = target_grid_for(circuit_polynomials(c).P, c.schedule);
  auto init = random_circuit(c.schedule, rng);

  auto same = multistart(tg, init, 3, 0.0, 9);
  REQUIRE(same.report.restart_results.size() == 3);
  CHECK(same.report.restart_results[0] == same.report.restart_results[1]);
  CHECK(same.report.restart_results[1] == same.report.restart_results[2]);
  CHECK(same.report.basins == 1);

  auto ms = multistart(tg, init, 8, M_PI / 4, 11);
  CHECK(ms.report.final_cost < 1e-10);
  CHECK(ms.report.basins >= 1);
  CHECK(ms.report.best_restart >= 0);

  auto again = multistart(tg, init, 8, M_PI / 4, 11);
  CHECK(again.report.restart_results == ms.report.restart_results);
  CHECK_THROWS_AS(multistart(tg, init, 0, 0.1, 1), Error);
}

TEST_CASE("count_basins clusters at the resolution") {
  CHECK(count_basins({}) == 0);
  CHECK(count_basins({0.1, 0.1 + 1e-7, 0.1 + 5e-7}) == 1);
  CHECK(count_basins({0.1, 0.2, 0.1 + 2e-6, 0.3}) == 4);
  CHECK(count_basins({0.5, 0.1, 0.5}) == 2);
}

TEST_CASE("nyquist_size") {
  CHECK(nyquist_size(0) == 16);
  CHECK(nyquist_size(15) == 16);
  CHECK(nyquist_size(16) == 32);
  CHECK(nyquist_size(40) == 64);
}

TEST_CASE("angles_pipeline on a circuit target") {
  std::mt19937_64 rng(6);
  auto c = random_circuit(Schedule::blocks(3, 2, 1), rng);
  auto pq = circuit_polynomials(c);
  PipelineOptions opts;
  auto res = angles_pipeline(pq.P, c.schedule, {pq.Q}, opts);
  CHECK(res.roundtrip_error < 1e-12);
  CHECK(res.report.final_cost < 1e-24);

  // A generic SOS complement of 1 - |P_delta|^2 need not satisfy the ratio
  // condition; strict mode surfaces it, lenient mode still refines.
  BiLaurent Pd = pq.P;
  Pd *= 1.0 - 1e-2;
  try {
    angles_pipeline(Pd, c.schedule, {}, opts);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CrcViolation);
  }
  PipelineOptions len;
  len.lenient = true;
  auto r2 = angles_pipeline(Pd, c.schedule, {}, len);
  CHECK(r2.sos.residual < r2.sos.tolerance);
  CHECK(r2.report.final_cost <= r2.report.initial_cost);

  // The rank-2 complement peels exactly to the circuit of P_delta / (1 - delta).
  auto rk = rank2_complement(Pd, pq.Q, 1e-2);
  auto r3 = angles_pipeline(Pd, c.schedule, rk.terms, opts);
  CHECK(r3.peel.spec.angles.size() == c.angles.size());
  CHECK(roundtrip_verify(pq.P, r3.peel.spec, 16, 16) < 1e-10);
}
