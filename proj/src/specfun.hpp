#pragma once

#include <string>

namespace mqsp {

struct TruncationChoice {
  int degree = 0;
  double predicted_error_bound = 0.0;
  std::string formula_id;
  // Set when the closed form failed its direct check and the degree was raised.
  bool repaired = false;
  int formula_degree = 0;
};

double bessel_j(int n, double x);
double bessel_i(int n, double x);
// e^{-|x|} I_n(x), safe for large x.
double bessel_i_scaled(int n, double x);
// Principal branch; throws ErrorKind::Domain below -1/e.
double lambert_w(double x);

// log of x^n / n! for x > 0
double log_power_over_factorial(double x, int n);
// log sum_{n > N} x^n / n!
double log_exp_tail(double x, int N);

// d = ceil(e|tau|/2 + ln(1/eps)), checked against 2 sum_{n>d} |J_n(tau)| <= eps.
TruncationChoice ja_degree(double tau, double eps);
double ja_tail(double tau, int d);
bool ja_degree_holds(double tau, double eps, int d);

// Smallest M with c^{M+1}/(M+1)! <= delta.
TruncationChoice taylor_order(double c, double delta);
bool taylor_order_holds(double c, double delta, int M);

// N = ceil(e x / W(3 e x / eps)), raised until sum_{n>N} x^n/n! <= eps.
TruncationChoice dyson_order(double betaT, double eps);
bool dyson_order_holds(double betaT, double eps, int N);

// Chebyshev coefficients of e^{c(x-1)}: b_0 = e^{-c} I_0(c), b_k = 2 e^{-c} I_k(c).
double chebyshev_exp_coeff(double c, int k);
double chebyshev_exp_tail(double c, int d);
// Smallest d with sum_{k>d} b_k <= eps.
TruncationChoice min_degree_bounded_exp(double c, double eps);
bool min_degree_bounded_exp_holds(double c, double eps, int d);

struct LorentzianGrid {
  double s_max = 0.0;
  int M = 0;
  double K = 0.0;
};

// (2/pi) arctan(gamma / s_max)
double lorentzian_tail(double gamma, double s_max);
LorentzianGrid lorentzian_discretization(double gamma, double eps_tail, double eps_disc, double betaT);

}  // namespace mqsp
