#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "resource_estimator.hpp"
#include "specfun.hpp"

using namespace mqsp;

namespace {

double lb_oracle(double a, double b, double eps) {
  const double L = std::log(1.0 / eps);
  return a + b + L / std::log(L);
}

}  // namespace

TEST_CASE("lower_bound examples") {
  CHECK(lower_bound(338, 15.6, 1e-3) == doctest::Approx(357.174).epsilon(1e-5));
  CHECK(lower_bound(338, 338, 1e-3) == doctest::Approx(679.574).epsilon(1e-5));
  CHECK(std::abs(lower_bound(338, 15.6, 1e-3) - 357) <= 1.0);
  CHECK(std::abs(lower_bound(338, 338, 1e-3) - 680) <= 1.0);
  CHECK(lower_bound(0, 0, 1e-3) == doctest::Approx(3.5742).epsilon(1e-4));
  CHECK_THROWS_AS(lower_bound(1, 1, 0.5), Error);
  CHECK_THROWS_AS(lower_bound(1, 1, 0.0), Error);
  for (double eps : {1e-2, 1e-6, 1e-12}) CHECK(lower_bound(3, 4, eps) == doctest::Approx(lb_oracle(3, 4, eps)));
}

TEST_CASE("dyson_lcu_budget examples") {
  auto s = dyson_lcu_budget(338, 338, 1e-3, 1.0, {7, 9});
  CHECK(s.r == 338);
  CHECK(s.dR == 2366);
  CHECK(s.dI == 3042);
  CHECK(s.Q_total == 5408);

  auto w = dyson_lcu_budget(338, 15.6, 1e-3);
  CHECK(w.r == 16);
  CHECK(w.Q_total == w.dR + w.dI);
  CHECK(w.dR == 16L * w.dR_seg);
  CHECK(w.dI == 16L * w.dI_seg);
  // Per-segment selectors at eps' = eps / (3 r e^{betaT}).
  const double eps_seg = 1e-3 / (3 * 16 * std::exp(15.6));
  CHECK(w.dI_seg == taylor_order(15.6 / 16, eps_seg).degree);
  CHECK(w.dR_seg == ja_degree(338.0 / 16, eps_seg).degree);

  auto one = dyson_lcu_budget(3, 0.2, 1e-3);
  CHECK(one.r == 1);
  CHECK(one.dR == one.dR_seg);
  CHECK_THROWS_AS(dyson_lcu_budget(1, 1, 1e-3, 0.0), Error);
}

TEST_CASE("mqsp_budget examples") {
  auto w = mqsp_budget(338, 15.6, 1e-3);
  const double L = std::log(1e3);
  CHECK(w.dR == static_cast<long>(std::ceil(338 + L)));
  CHECK(w.dI == static_cast<long>(std::ceil(15.6 + L / std::log(L))));
  CHECK(w.Q_total == w.dR + w.dI);
  CHECK(w.postselections == 1);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 500.0), le(2.0, 30.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), eps = std::exp(-le(rng));
    CHECK(static_cast<double>(mqsp_budget(a, b, eps).Q_total) >= lower_bound(a, b, eps));
  }
  CHECK_THROWS_AS(mqsp_budget(1, 1, 0.7), Error);
}

TEST_CASE("M-QSP needs fewer queries than Dyson LCU") {
  for (double a : {1.0, 10.0, 100.0, 338.0})
    for (double b : {1.0, 5.0, 15.6, 100.0, 338.0})
      for (double eps : {1e-2, 1e-4, 1e-8}) {
        CHECK(mqsp_budget(a, b, eps).Q_total < dyson_lcu_budget(a, b, eps).Q_total);
      }
}

TEST_CASE("Lorentzian constants") {
  CHECK(lorentzian_c() == doctest::Approx(1.482304).epsilon(1e-6));
  CHECK(lorentzian_optimal_p(1e-6) == doctest::Approx(2.5075).epsilon(1e-4));
  CHECK(lorentzian_overhead(1e-6) == doctest::Approx(std::exp(std::sqrt(2 * std::log(3.0) * std::log(1e6)))));

  // Lorentzian / Trotter ratio shrinks as eps^{1/(2p)}.
  for (int p : {1, 2, 4}) {
    double prev = 1e300;
    for (double eps : {1e-2, 1e-4, 1e-8, 1e-16}) {
      const double ratio = lorentzian_asymptotic(10, 10, eps, p) / trotter_asymptotic(10, 10, eps, p);
      CHECK(ratio < prev);
      prev = ratio;
    }
  }

  auto b = lorentzian_budget(10, 2, 1e-6, 2);
  CHECK(b.p == 2);
  CHECK(b.r >= 1);
  CHECK(b.Q_total == b.dR + b.dI);
  // r is the smallest count meeting the midpoint-form inequality.
  auto lhs = [](double r) { return 10.0 * std::pow(2.0, 4) * std::exp(2.0) / std::pow(r, 4); };
  CHECK(lhs(b.r) <= 1e-6 / 3);
  if (b.r > 1) CHECK(lhs(b.r - 1) > 1e-6 / 3);
  CHECK(lorentzian_budget(10, 2, 1e-6, kOptimalOrder).p == 3);
}

TEST_CASE("postselection_cost examples") {
  auto zero = postselection_cost(0.0, 0.37);
  CHECK(zero.P == doctest::Approx(0.37));
  auto weak = postselection_cost(15.6, 1.0);
  CHECK(weak.P == doctest::Approx(std::exp(-31.2)));
  CHECK(weak.log10_P == doctest::Approx(-31.2 / std::log(10.0)));
  auto strong = postselection_cost(338, 1.0);
  CHECK(strong.log10_P == doctest::Approx(-676 / std::log(10.0)));
  CHECK(std::isfinite(strong.log10_P));
  CHECK(log10_repetitions(1000, strong) == doctest::Approx(3.0 + 676 / std::log(10.0)));
  CHECK_THROWS_AS(postselection_cost(1.0, 1.5), Error);
}

TEST_CASE("benchmark tables") {
  auto s = benchmark_table(strong_preset());
  REQUIRE(s.rows.size() >= 2);
  const auto& dy = s.rows[0];
  const auto& mq = s.rows[1];
  CHECK(dy.Q_total == 5408);
  CHECK(mq.reference.Q == 1282);
  CHECK(s.reference_ratio == doctest::Approx(4.22).epsilon(5e-3 / 4.22));
  CHECK(mq.log10_repetitions > 294.0);
  CHECK(mq.log10_repetitions < 297.0);
  CHECK(std::abs(s.lower_bound - s.reference_lower_bound) <= 1.0);

  auto w = benchmark_table(weak_preset());
  CHECK(w.rows[0].reference.Q == 640);
  CHECK(w.rows[1].reference.Q == 407);
  CHECK(std::abs(w.lower_bound - w.reference_lower_bound) <= 1.0);
  // 640 / e^{-31.2}: same order as the quoted 2.9e16.
  CHECK(w.rows[0].reference.repetitions == doctest::Approx(2.9e16));

  CHECK(preset_by_name("weak").betaT == 15.6);
  CHECK(preset_by_name("strong").dyson.M_seg == 9);
  try {
    preset_by_name("medium");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}
