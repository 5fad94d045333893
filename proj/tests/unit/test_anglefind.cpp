#include <doctest.h>

#include <cmath>
#include <random>

#include "anglefind.hpp"
#include "error.hpp"
#include "sos_factor.hpp"

using namespace mqsp;

namespace {

double wrap(double a) {
  return std::remainder(a, 2 * M_PI);
}

double max_angle_gap(const CircuitSpec& a, const CircuitSpec& b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.angles.size(); ++k) {
    gap = std::max(gap, std::abs(a.angles[k].theta - b.angles[k].theta));
    gap = std::max(gap, std::abs(wrap(a.angles[k].phi - b.angles[k].phi)));
  }
  return gap;
}

}  // namespace

TEST_CASE("crc_ratio examples") {
  // Shared inner factor f: the ratio is tan(theta) exactly.
  const double th = 0.7;
  BiLaurent f({0, 0}, {0, 2});
  f.at(0, 0) = 0.3;
  f.at(0, 1) = cplx(-0.2, 0.5);
  f.at(0, 2) = 0.9;
  auto z1f = monomial_shift(f, 1, 0);
  BiLaurent P = std::cos(th) * z1f, Q = std::sin(th) * z1f;
  auto r = crc_ratio(P, Q, 1, 1e-10);
  CHECK(std::abs(r.rho - std::tan(th)) < 1e-15);
  CHECK(r.deviation < 1e-15);

  std::mt19937_64 rng(1);
  auto spec = random_circuit(Schedule::parse("RIRIR"), rng);
  auto pq = circuit_polynomials(spec);
  // The outermost query is R, so the ratio is read in z1.
  auto rr = crc_ratio(pq.P, pq.Q, 1, 1e-8);
  CHECK(rr.deviation < 1e-10);
  // |rho| = tan(theta_0) for the outermost rotation.
  CHECK(std::abs(std::abs(rr.rho) - std::tan(spec.angles[0].theta)) < 1e-12);

  // Perturb one coefficient in the leading slice of var 1.
  BiLaurent noisy = pq.Q;
  const BiLaurent& Pn = pq.P;
  noisy.at(pq.Q.window1().hi, 0) += 1e-3;
  CHECK_THROWS_AS(crc_ratio(Pn, noisy, 1, 1e-8), Error);
  try {
    crc_ratio(Pn, noisy, 1, 1e-8);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CrcViolation);
    CHECK(e.value() > 1e-8);
  }
}

TEST_CASE("peel_step examples") {
  std::mt19937_64 rng(2);
  CircuitSpec c;
  c.schedule = Schedule::parse("R");
  c.angles = {{0.4, 0.3}, {0.9, -1.1}};
  auto pq = circuit_polynomials(c);
  PeelState st;
  st.P = pq.P;
  st.complements = {pq.Q};
  st.remaining = c.schedule;
  auto step = peel_step(st);
  CHECK(step.theta > 0.0);
  CHECK(step.theta < M_PI / 2);
  CHECK(std::abs(step.theta - 0.4) < 1e-14);
  CHECK(std::abs(wrap(step.phi - 0.3)) < 1e-14);
  CHECK(st.kappa_running == doctest::Approx(1.0 / std::cos(0.4)));
  CHECK(st.remaining.size() == 0);
  CHECK(st.P.trimmed(1e-14).window1().hi == 0);

  // Each peel drops the peeled degree by exactly one.
  auto deep = random_circuit(Schedule::parse("RIIRIR"), rng);
  auto d = circuit_polynomials(deep);
  PeelState s2;
  s2.P = d.P;
  s2.complements = {d.Q};
  s2.remaining = deep.schedule;
  double kappa = 1.0;
  while (s2.remaining.size() > 0) {
    const int var = s2.remaining.var(0);
    const int before = s2.P.trimmed(1e-13).window(var).hi;
    auto r = peel_step(s2);
    kappa /= std::cos(r.theta);
    CHECK(s2.P.trimmed(1e-13).window(var).hi == before - 1);
    CHECK(s2.kappa_running == doctest::Approx(kappa).epsilon(1e-12));
    CHECK(r.theta > 0.0);
    CHECK(r.theta < M_PI / 2);
  }
}

TEST_CASE("peel_step edge cases") {
  // Vanishing leading P slice: theta = pi/2 swap.
  CircuitSpec c;
  c.schedule = Schedule::parse("I");
  c.angles = {{M_PI / 2, 0.0}, {0.5, 0.2}};
  auto pq = circuit_polynomials(c);
  PeelState st;
  st.P = pq.P;
  st.complements = {pq.Q};
  st.remaining = c.schedule;
  auto r = peel_step(st);
  CHECK(r.edge_case);
  CHECK(r.theta == doctest::Approx(M_PI / 2));
  CHECK(st.kappa_running == 1.0);

  // Vanishing leading Q slice: theta = 0 pass-through.
  c.angles = {{0.0, 0.0}, {0.5, 0.2}};
  pq = circuit_polynomials(c);
  PeelState s2;
  s2.P = pq.P;
  s2.complements = {pq.Q};
  s2.remaining = c.schedule;
  auto r2 = peel_step(s2);
  CHECK(r2.edge_case);
  CHECK(r2.theta == 0.0);
}

TEST_CASE("recursive_angle_find examples") {
  std::mt19937_64 rng(3);
  auto c22 = random_circuit(Schedule::blocks(2, 2, 1), rng);
  auto p22 = circuit_polynomials(c22);
  auto res = recursive_angle_find(p22.P, {p22.Q}, c22.schedule);
  CHECK(roundtrip_verify(p22.P, res.spec, 16, 16) < 1e-12);
  CHECK(max_angle_gap(res.spec, c22) < 1e-10 * res.kappa_total);

  auto c14 = random_circuit(Schedule::blocks(14, 12, 4), rng);
  auto p14 = circuit_polynomials(c14);
  auto r14 = recursive_angle_find(p14.P, {p14.Q}, c14.schedule);
  CHECK(roundtrip_verify(p14.P, r14.spec, 32, 32) < 1e-8);
  CHECK(max_angle_gap(r14.spec, c14) < 1e-10 * r14.kappa_total);
  double kappa = 1.0;
  for (const auto& row : r14.trace) kappa /= std::cos(row.theta);
  CHECK(r14.kappa_total == doctest::Approx(kappa).epsilon(1e-10));
  CHECK(r14.trace.back().kappa == doctest::Approx(r14.kappa_total));

  // Constant target: one rotation, zero peels.
  const cplx c(0.3, 0.4);
  auto P = BiLaurent::constant(c);
  auto Q = BiLaurent::constant(std::sqrt(1 - std::norm(c)));
  auto rc = recursive_angle_find(P, {Q}, Schedule{});
  REQUIRE(rc.spec.angles.size() == 1);
  CHECK(std::cos(rc.spec.angles[0].theta) == doctest::Approx(0.5));
  CHECK(std::abs(circuit_polynomials(rc.spec).P.coeff(0, 0) - c) < 1e-15);
}

TEST_CASE("recursive_angle_find with a rank-2 complement") {
  std::mt19937_64 rng(4);
  for (const char* s : {"RI", "RRII", "RIRIRI", "IRRIIR"}) {
    auto c = random_circuit(Schedule::parse(s), rng);
    auto pq = circuit_polynomials(c);
    const double delta = 1e-3;
    BiLaurent Pd = pq.P;
    Pd *= 1.0 - delta;
    auto sos = rank2_complement(Pd, pq.Q, delta);
    auto res = recursive_angle_find(Pd, sos.terms, c.schedule);
    // A single 2x2 circuit is unitary, so it realizes P = P_delta / (1 - delta);
    // the constant term of the complement stays outside the peel chain.
    CHECK(roundtrip_verify(pq.P, res.spec, 16, 16) < 1e-10);
    CHECK(roundtrip_verify(Pd, res.spec, 16, 16) == doctest::Approx(delta / (1 - delta)).epsilon(1e-6));
  }
}

TEST_CASE("recursive_angle_find raises on a perturbed pair") {
  std::mt19937_64 rng(5);
  auto c = random_circuit(Schedule::parse("RIRI"), rng);
  auto pq = circuit_polynomials(c);
  BiLaurent Q = pq.Q;
  Q.at(1, 1) += 1e-3;
  PeelOptions opts;
  opts.check_precondition = false;
  CHECK_THROWS_AS(recursive_angle_find(pq.P, {Q}, c.schedule, opts), Error);
  CHECK_THROWS_AS(recursive_angle_find(pq.P, {Q}, c.schedule), Error);
}

TEST_CASE("recovered angles match generators within 1e-10 kappa") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> ud(1, 6);
    auto s = Schedule::blocks(ud(rng), ud(rng), 1 + trial % 3);
    auto c = random_circuit(s, rng);
    auto pq = circuit_polynomials(c);
    auto res = recursive_angle_find(pq.P, {pq.Q}, s);
    CHECK(max_angle_gap(res.spec, c) <= 1e-10 * res.kappa_total);
    CHECK(res.drift <= 1e-6 * res.kappa_total);
  }
}

TEST_CASE("block_peel agrees with recursive peeling") {
  std::mt19937_64 rng(7);
  const int rows[][3] = {{2, 2, 1}, {3, 3, 1}, {4, 4, 2}, {5, 5, 2}, {6, 4, 2}, {8, 6, 3}, {10, 8, 3}, {12, 10, 4}, {14, 12, 4}};
  for (const auto& row : rows) {
    auto s = Schedule::blocks(row[0], row[1], row[2]);
    auto c = random_circuit(s, rng);
    auto pq = circuit_polynomials(c);
    auto rec = recursive_angle_find(pq.P, {pq.Q}, s);
    auto blk = block_peel(pq.P, {pq.Q}, s);
    const double bar = (row[0] + row[1] <= 10) ? 1e-12 : 1e-10 * rec.kappa_total;
    CHECK(max_angle_gap(rec.spec, blk.spec) < bar);
  }
}

TEST_CASE("block_peel ratio reads scale as O(1) per step") {
  // Small angles keep kappa_total modest at depth 80, so no step falls back.
  std::mt19937_64 rng(8);
  double prev_ratio = 1.0;
  for (int d : {10, 20, 40}) {
    auto s = Schedule::blocks(d, d, d / 2);
    auto c = random_circuit(s, rng, 0.05, 0.3);
    auto pq = circuit_polynomials(c);
    auto rec = recursive_angle_find(pq.P, {pq.Q}, s);
    auto blk = block_peel(pq.P, {pq.Q}, s);
    CHECK_FALSE(blk.fallback_used);
    CHECK(max_angle_gap(rec.spec, blk.spec) < 1e-10 * rec.kappa_total);
    const double ratio = static_cast<double>(blk.ratio_ops) / static_cast<double>(rec.ratio_ops);
    CHECK(ratio < prev_ratio);
    CHECK(ratio * d < 4.0);
    prev_ratio = ratio;
    CHECK(blk.ratio_ops <= 4L * (2 * d + 1));
    // The rotation update is O(dR dI) per step for both.
    CHECK(blk.update_ops == rec.update_ops);
  }
}

TEST_CASE("block_peel falls back on a degenerate Bessel corner") {
  // J_1(tau) = 0 at tau = 3.8317...: the frame block's top coefficient vanishes.
  const double j11 = 3.8317059702075125;
  DysonParams p;
  p.alphaRT = j11;
  p.betaIT = 0.2;
  p.r = 1;
  p.dR_seg = 1;
  p.M = 1;
  p.delta = 1e-3;
  p.normalize_sup = true;
  auto t = build_dyson_target(p);
  BiLaurent A = t.analytic();
  PeelOptions opts;
  opts.lenient = true;
  opts.check_precondition = false;
  auto sos = approximate_sos(BiLaurent::constant(1.0) - abs_squared(A), 200);
  auto res = block_peel(t, sos.terms, opts);
  CHECK(res.fallback_used);
}

TEST_CASE("roundtrip_verify examples") {
  std::mt19937_64 rng(9);
  auto c = random_circuit(Schedule::parse("RRIIRI"), rng);
  auto pq = circuit_polynomials(c);
  CHECK(roundtrip_verify(pq.P, c, 16, 16) < 1e-14);
  CircuitSpec id;
  id.schedule = c.schedule;
  id.angles.assign(c.angles.size(), Angle{});
  CHECK(roundtrip_verify(pq.P, id, 16, 16) > 0.1);
}
