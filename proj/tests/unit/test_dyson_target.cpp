#include <doctest.h>

#include <cmath>
#include <random>

#include "dyson_target.hpp"
#include "error.hpp"
#include "matops.hpp"
#include "method_sim.hpp"
#include "specfun.hpp"

using namespace mqsp;

namespace {

double max_dev_frame(double tau, int d, int N) {
  auto b = frame_block(tau, d);
  double dev = 0.0;
  for (int j = 0; j < N; ++j) {
    const double t = 2 * M_PI * j / N;
    dev = std::max(dev, std::abs(b.eval(t, 0.0) - std::polar(1.0, -tau * std::cos(t))));
  }
  return dev;
}

}  // namespace

TEST_CASE("frame_block examples") {
  auto zero = frame_block(0.0, 5).trimmed(1e-300);
  CHECK(zero.window1() == Window{0, 0});
  CHECK(std::abs(zero.coeff(0, 0) - 1.0) < 1e-15);

  const int d = ja_degree(1.0, 1e-10).degree;
  CHECK(max_dev_frame(1.0, d, 256) < 1e-10);

  for (double tau : {0.3, 1.0, 2.5}) {
    for (int dd : {1, 3, 6}) {
      auto b = frame_block(tau, dd);
      CHECK(std::abs(b.eval(M_PI / 2, 0.0) - 1.0) <= ja_tail(tau, dd) + 1e-15);
      CHECK(max_dev_frame(tau, dd, 128) <= ja_tail(tau, dd) + 1e-14);
    }
  }
}

TEST_CASE("taylor_block examples") {
  auto one = taylor_block(0.7, 0);
  CHECK(std::abs(one.coeff(0, 0) - 1.0) < 1e-15);

  CHECK(std::abs(taylor_block(1.0, 20).eval(0.0, 0.0) - std::exp(1.0)) < 1e-15 * 4);

  for (double c : {0.2, 0.8, 2.0}) {
    for (int M : {1, 3, 6, 10}) {
      auto b = taylor_block(c, M);
      double dev = 0.0;
      for (int k = 0; k < 128; ++k) {
        const double t = 2 * M_PI * k / 128;
        dev = std::max(dev, std::abs(b.eval(0.0, t) - std::exp(c * std::cos(t))));
      }
      const double bound = std::exp(log_power_over_factorial(c, M + 1)) * std::exp(c);
      CHECK(dev <= bound * (1 + 1e-12) + 8 * std::exp(c) * 1e-16);
      double mu = 0.0, term = 1.0;
      for (int m = 0; m <= M; ++m) {
        mu += term;
        term *= c / (m + 1);
      }
      CHECK(std::abs(b.eval(1.3, 0.0) - mu) < 1e-14 * mu);
    }
  }
}

TEST_CASE("build_dyson_target examples") {
  DysonParams trivial;
  trivial.delta = 0.25;
  auto t = build_dyson_target(trivial);
  CHECK(std::abs(t.P_delta.coeff(0, 0) - 0.75) < 1e-15);
  CHECK(t.P_delta.coeff_norm2() == doctest::Approx(0.75 * 0.75));

  DysonParams p;
  p.alphaRT = 0.0;
  p.betaIT = 0.4;
  p.M = 8;
  p.delta = 1e-6;
  auto tt = build_dyson_target(p);
  double dev = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double t2 = 2 * M_PI * k / 64;
    dev = std::max(dev, std::abs(tt.P_delta.eval(0.4, t2) - std::exp(0.4 * (std::cos(t2) - 1.0))));
  }
  CHECK(dev < 1e-6);
  // At zero frame angle the z1 window collapses.
  CHECK(tt.P_delta.trimmed(1e-300).window1() == Window{0, 0});

  DysonParams a;
  a.alphaRT = 0.8;
  a.betaIT = 0.4;
  a.dR_seg = 4;
  a.M = 4;
  a.normalize_sup = true;
  auto ta = build_dyson_target(a);
  CHECK(ta.sup_norm <= 1.0 - a.delta + 1e-10);
  CHECK(sup_norm(ta.P_delta) <= 1.0 - a.delta + 1e-10);
}

TEST_CASE("build_dyson_target product form and invariants") {
  DysonParams p;
  p.alphaRT = 1.2;
  p.betaIT = 0.6;
  p.r = 3;
  p.dR_seg = 3;
  p.M = 3;
  p.delta = 1e-3;
  p.normalize_sup = true;
  auto t = build_dyson_target(p);
  CHECK(t.P_delta.window1() == Window{-9, 9});
  CHECK(t.P_delta.window2() == Window{-9, 9});
  CHECK(t.dR == 9);
  CHECK(t.dI == 9);
  CHECK(t.analytic_dR == 18);
  CHECK(t.stated_dI == 3);

  // Pointwise oracle: (1 - delta) s [block1 block2 / mu]^r.
  const double tau = p.alphaRT / p.r, c = p.betaIT / p.r;
  double mu = 0.0, term = 1.0;
  for (int m = 0; m <= p.M; ++m) {
    mu += term;
    term *= c / (m + 1);
  }
  CHECK(t.lambda == doctest::Approx(std::pow(mu, p.r)));
  for (double t1 : {0.0, 0.9, 2.2}) {
    for (double t2 : {0.0, 1.4, 3.0}) {
      const cplx seg = frame_block(tau, p.dR_seg).eval(t1, 0) * taylor_block(c, p.M).eval(0, t2) / mu;
      const cplx ref = (1.0 - p.delta) * t.sup_rescale * std::pow(seg, p.r);
      CHECK(std::abs(t.P_delta.eval(t1, t2) - ref) < 1e-13);
    }
  }

  // Deficit before regularization lies in [0, r x^{M+1}/(M+1)! e^{x r}].
  DysonParams q = p;
  q.alphaRT = 0.0;
  auto tq = build_dyson_target(q);
  const double x = p.betaIT / p.r;
  const double cap = p.r * std::exp(log_power_over_factorial(x, p.M + 1)) * std::exp(x * p.r);
  CHECK(tq.zero_locus_deficit >= -1e-15);
  CHECK(tq.zero_locus_deficit <= cap);

  auto an = t.analytic();
  CHECK(an.window1() == Window{0, 18});
  CHECK(an.window2() == Window{0, 18});
}

TEST_CASE("sup-norm invariant holds across a parameter sweep") {
  for (double a : {0.0, 0.5, 1.5}) {
    for (double b : {0.1, 0.8}) {
      for (int r : {1, 2}) {
        DysonParams p;
        p.alphaRT = a;
        p.betaIT = b;
        p.r = r;
        p.dR_seg = 3;
        p.M = 3;
        p.delta = 1e-4;
        p.normalize_sup = true;
        auto t = build_dyson_target(p);
        CHECK(sup_norm(t.P_delta) <= 1.0 - p.delta + 1e-10);
      }
    }
  }
}

TEST_CASE("build_dyson_target rejects sup violations and bad params") {
  DysonParams p;
  p.alphaRT = 1.0;
  p.dR_seg = 1;  // large Jacobi-Anger tail pushes the product above 1
  p.delta = 1e-6;
  CHECK_THROWS_AS(build_dyson_target(p), Error);
  p.normalize_sup = true;
  CHECK_NOTHROW(build_dyson_target(p));

  DysonParams bad;
  bad.r = 0;
  CHECK_THROWS_AS(build_dyson_target(bad), Error);
  bad.r = 1;
  bad.delta = 1.0;
  CHECK_THROWS_AS(build_dyson_target(bad), Error);
}

TEST_CASE("target_grid_exact examples") {
  auto g = target_grid_exact(0.9, 0.0, 16, 16);
  for (auto v : g.values) CHECK(std::abs(v) == doctest::Approx(1.0));
  auto h = target_grid_exact(0.9, 0.7, 16, 16);
  for (int j = 0; j < 16; ++j) {
    CHECK(std::abs(h(j, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(h(j, 8)) == doctest::Approx(std::exp(-1.4)));
    CHECK(std::arg(h(j, 3)) == doctest::Approx(std::arg(std::polar(1.0, -0.9 * std::cos(2 * M_PI * j / 16)))));
  }
}

TEST_CASE("dyson_schedule examples") {
  DysonParams p;
  p.r = 1;
  p.dR_seg = 2;
  p.M = 1;
  auto s = dyson_schedule(p);
  // Two queries per Laurent degree: the analytic window is [0, 2 dR_seg] x [0, 2 M].
  CHECK(s.entries == "RRRRII");

  p.r = 2;
  p.dR_seg = 1;
  p.M = 1;
  CHECK(dyson_schedule(p).entries == "RRIIRRII");

  for (int r = 1; r <= 4; ++r) {
    p.r = r;
    p.dR_seg = 3;
    p.M = 2;
    auto q = dyson_schedule(p);
    CHECK(q.dR() == 2 * r * 3);
    CHECK(q.dI() == 2 * r * 2);
    CHECK(q.size() == 2 * r * (3 + 2));
  }
}

TEST_CASE("error_budget examples") {
  auto b = error_budget(1.0, 0.5, 1.0, 4, 60);
  CHECK(b.taylor < 1e-60);
  auto b1 = error_budget(1.0, 0.5, 1.0, 4, 3);
  auto b2 = error_budget(1.0, 0.5, 1.0, 8, 3);
  CHECK(b2.quadrature == doctest::Approx(b1.quadrature / 4.0));
  CHECK(b1.total == doctest::Approx(b1.quadrature + b1.taylor));
  CHECK(b1.taylor == doctest::Approx(4.0 * std::pow(0.125, 4) / 24.0 * std::exp(0.5)));
}

TEST_CASE("error_budget bounds the measured Dyson LCU error") {
  std::mt19937_64 rng(21);
  const double C = frozen_calibration().C_mag;
  CHECK(C <= 10.0);
  for (int trial = 0; trial < 4; ++trial) {
    auto pair = random_pair(4, 1.0, 0.5, rng);
    for (int r : {4, 8}) {
      for (int M : {2, 4}) {
        auto res = dyson_lcu_propagator(pair, 1.0, r, M, 4096);
        auto b = error_budget(pair.alpha_R, pair.beta_I, 1.0, r, M, C);
        CHECK(res.error_norm <= b.total);
      }
    }
  }
}
