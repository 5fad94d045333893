#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"

namespace mqsp {

namespace {

constexpr double kE = 2.718281828459045235;

void require_eps(double eps, double hi, const char* what) {
  if (!(eps > 0.0 && eps < hi)) throw Error(ErrorKind::Domain, std::string(what) + ": eps out of range");
}

// sum_k s^k (x/2)^{2k+n} / (k! (n+k)!), s = -1 for J, +1 for I.
double bessel_series(int n, double x, double s) {
  const double log_t0 = n * std::log(x / 2.0) - std::lgamma(n + 1.0);
  if (log_t0 < -740.0) return 0.0;
  double t = std::exp(log_t0);
  double sum = t;
  const double q = s * (x / 2.0) * (x / 2.0);
  for (int k = 0; k < 500; ++k) {
    t *= q / ((k + 1.0) * (n + k + 1.0));
    sum += t;
    if (std::abs(t) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

int miller_start(int n, double x) {
  const double top = std::max(static_cast<double>(n), x);
  int N = static_cast<int>(top + 20.0 + std::sqrt(60.0 * (top + 1.0)));
  return N + (N % 2);
}

// log of the bound (e|x|/2n)^n, used to skip orders that underflow.
bool underflows(int n, double ax) {
  if (n == 0 || ax == 0.0) return false;
  return n * std::log(kE * ax / (2.0 * n)) < -740.0;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) throw Error(ErrorKind::Domain, "bessel_j: order must be nonnegative");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double ax = std::abs(x);
  const double sign = (x < 0.0 && (n % 2 == 1)) ? -1.0 : 1.0;
  if (underflows(n, ax)) return 0.0;
  if (ax < 2.0) return sign * bessel_series(n, ax, -1.0);
  const int N = miller_start(n, ax);
  double jp = 0.0, j = 1e-30, result = 0.0, norm = 0.0;
  for (int k = N; k >= 1; --k) {
    const double jm = (2.0 * k / ax) * j - jp;
    jp = j;
    j = jm;
    // j now holds order k - 1
    if (k - 1 == n) result = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += j;
  return sign * result / norm;
}

double bessel_i_scaled(int n, double x) {
  if (n < 0) throw Error(ErrorKind::Domain, "bessel_i: order must be nonnegative");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double ax = std::abs(x);
  const double sign = (x < 0.0 && (n % 2 == 1)) ? -1.0 : 1.0;
  if (underflows(n, ax)) return 0.0;
  if (ax < 2.0) return sign * std::exp(-ax) * bessel_series(n, ax, 1.0);
  const int N = miller_start(n, ax);
  double ip = 0.0, i = 1e-30, result = 0.0, norm = 0.0;
  for (int k = N; k >= 1; --k) {
    const double im = (2.0 * k / ax) * i + ip;
    ip = i;
    i = im;
    if (k - 1 == n) result = i;
    if (k - 1 > 0) norm += 2.0 * i;
    if (std::abs(i) > 1e250) {
      i *= 1e-250;
      ip *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += i;
  return sign * result / norm;
}

double bessel_i(int n, double x) {
  return bessel_i_scaled(n, x) * std::exp(std::abs(x));
}

double lambert_w(double x) {
  const double branch = -1.0 / kE;
  if (x < branch) {
    if (x > branch - 1e-15) x = branch;
    else throw Error(ErrorKind::Domain, "lambert_w: argument below -1/e", x);
  }
  if (x == 0.0) return 0.0;
  if (x == branch) return -1.0;
  double w;
  if (x < 0.0) {
    const double p = std::sqrt(2.0 * (kE * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x) * 0.8;
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    // Halley step
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double log_power_over_factorial(double x, int n) {
  if (n == 0) return 0.0;
  return n * std::log(x) - std::lgamma(n + 1.0);
}

double log_exp_tail(double x, int N) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  double peak = -std::numeric_limits<double>::infinity();
  for (int n = N + 1;; ++n) {
    const double lt = log_power_over_factorial(x, n);
    logs.push_back(lt);
    peak = std::max(peak, lt);
    if (n > x && lt < peak - 45.0) break;
    if (n > N + 100000) break;
  }
  double s = 0.0;
  for (double lt : logs) s += std::exp(lt - peak);
  return peak + std::log(s);
}

double ja_tail(double tau, int d) {
  const double at = std::abs(tau);
  if (at == 0.0) return 0.0;
  double s = 0.0;
  for (int n = d + 1;; ++n) {
    const double t = std::abs(bessel_j(n, at));
    s += 2.0 * t;
    if (n > kE * at / 2.0 + 2 && (t == 0.0 || t < 1e-18 * s)) break;
    if (n > d + 5000) break;
  }
  return s;
}

bool ja_degree_holds(double tau, double eps, int d) {
  return d >= kE * std::abs(tau) / 2.0 + std::log(1.0 / eps) && ja_tail(tau, d) <= eps;
}

TruncationChoice ja_degree(double tau, double eps) {
  require_eps(eps, 1.0, "ja_degree");
  TruncationChoice tc;
  tc.formula_id = "jacobi-anger";
  tc.formula_degree = static_cast<int>(std::ceil(kE * std::abs(tau) / 2.0 + std::log(1.0 / eps)));
  tc.degree = tc.formula_degree;
  while (ja_tail(tau, tc.degree) > eps) {
    ++tc.degree;
    tc.repaired = true;
  }
  tc.predicted_error_bound = ja_tail(tau, tc.degree);
  return tc;
}

bool taylor_order_holds(double c, double delta, int M) {
  return log_power_over_factorial(c, M + 1) <= std::log(delta) + 1e-12;
}

TruncationChoice taylor_order(double c, double delta) {
  if (!(c > 0.0)) throw Error(ErrorKind::Domain, "taylor_order: c must be positive");
  require_eps(delta, 1.0, "taylor_order");
  TruncationChoice tc;
  tc.formula_id = "taylor-remainder";
  int M = 0;
  while (!taylor_order_holds(c, delta, M)) ++M;
  tc.degree = M;
  tc.formula_degree = M;
  tc.predicted_error_bound = std::exp(log_power_over_factorial(c, M + 1));
  return tc;
}

namespace {

double dyson_formula(double x, double eps) {
  return kE * x / lambert_w(3.0 * kE * x / eps);
}

}  // namespace

bool dyson_order_holds(double betaT, double eps, int N) {
  return N >= dyson_formula(betaT, eps) && log_exp_tail(betaT, N) <= std::log(eps);
}

TruncationChoice dyson_order(double betaT, double eps) {
  if (!(betaT > 0.0)) throw Error(ErrorKind::Domain, "dyson_order: betaT must be positive");
  require_eps(eps, 1.0, "dyson_order");
  TruncationChoice tc;
  tc.formula_id = "dyson-lambert-w";
  tc.formula_degree = static_cast<int>(std::ceil(dyson_formula(betaT, eps)));
  tc.degree = tc.formula_degree;
  while (log_exp_tail(betaT, tc.degree) > std::log(eps)) {
    ++tc.degree;
    tc.repaired = true;
  }
  tc.predicted_error_bound = std::exp(log_exp_tail(betaT, tc.degree));
  return tc;
}

double chebyshev_exp_coeff(double c, int k) {
  const double b = bessel_i_scaled(k, c);
  return k == 0 ? b : 2.0 * b;
}

double chebyshev_exp_tail(double c, int d) {
  double s = 0.0;
  for (int k = d + 1;; ++k) {
    const double b = chebyshev_exp_coeff(c, k);
    s += b;
    if (k > c + 2 && (b == 0.0 || b < 1e-18 * s)) break;
    if (k > d + 5000) break;
  }
  return s;
}

bool min_degree_bounded_exp_holds(double c, double eps, int d) {
  return chebyshev_exp_tail(c, d) <= eps;
}

TruncationChoice min_degree_bounded_exp(double c, double eps) {
  if (!(c > 0.0)) throw Error(ErrorKind::Domain, "min_degree_bounded_exp: c must be positive");
  require_eps(eps, 0.5, "min_degree_bounded_exp");
  TruncationChoice tc;
  tc.formula_id = "chebyshev-tail";
  int d = 0;
  while (!min_degree_bounded_exp_holds(c, eps, d)) ++d;
  tc.degree = d;
  tc.formula_degree = d;
  tc.predicted_error_bound = chebyshev_exp_tail(c, d);
  return tc;
}

double lorentzian_tail(double gamma, double s_max) {
  return 2.0 / M_PI * std::atan(gamma / s_max);
}

LorentzianGrid lorentzian_discretization(double gamma, double eps_tail, double eps_disc, double betaT) {
  if (!(gamma > 0.0 && eps_tail > 0.0 && eps_disc > 0.0 && betaT > 0.0)) {
    throw Error(ErrorKind::Domain, "lorentzian_discretization: all arguments must be positive");
  }
  LorentzianGrid g;
  g.s_max = 2.0 * gamma / (M_PI * eps_tail);
  g.K = betaT * betaT + 4.0 * betaT / gamma + 6.0 / (gamma * gamma);
  g.M = static_cast<int>(std::ceil(std::sqrt(g.s_max * g.s_max * g.K / (3.0 * M_PI * gamma * eps_disc))));
  return g;
}

}  // namespace mqsp
