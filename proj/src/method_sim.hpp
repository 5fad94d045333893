#pragma once

#include <map>
#include <string>
#include <vector>

#include "matops.hpp"

namespace mqsp {

// Constants of the O(.) error forms, fitted once on 40 random 4x4 pairs
// (alpha_R, beta_I in [0.25, 2], T in [0.5, 2], r in {4, ..., 32}) and frozen.
struct Calibration {
  double C2 = 0.0;     // midpoint: ||V - V_r|| <= C2 alpha_R beta_I^2 T^3 / r^2
  double C_mag = 0.0;  // quadrature part of the Dyson LCU budget
};
Calibration frozen_calibration();

struct MethodResult {
  std::string method;
  Mat approx_propagator;
  Mat exact_reference;
  double error_norm = 0.0;
  double bound_predicted = 0.0;
  bool bound_applies = false;
  bool calibrated = false;  // bound uses fitted constants
  // max over partial products of ||prod|| / e^{beta_I elapsed}
  double gronwall_ratio = 0.0;
  std::map<std::string, double> params_used;
};

// H~(tau_j) at midpoints tau_j = (j - 1/2) T / r, j = 1..r.
std::vector<Mat> midpoint_frames(const HamiltonianPair& pair, double T, int r);

// prod_{j=r}^{1} expm(H~(tau_j) T / r)
Mat midpoint_propagator(const HamiltonianPair& pair, double T, int r);
MethodResult midpoint_method(const HamiltonianPair& pair, double T, int r, int rk4_steps = 4096);
// C2 alpha_R beta_I^2 T^3 / r^2
double midpoint_bound(const HamiltonianPair& pair, double T, int r, double C2);

// prod_j sum_{m<=M} (H~(tau_j) T/r)^m / m!
Mat dyson_lcu_matrix(const HamiltonianPair& pair, double T, int r, int M);
MethodResult dyson_lcu_propagator(const HamiltonianPair& pair, double T, int r, int M, int rk4_steps = 4096);

// sum_k ds L_gamma(s_k) e^{-i A s_k}, A = beta_I I - H~, midpoint nodes on
// [-s_max, s_max]. Approximates e^{-gamma A} = e^{-beta_I gamma} e^{gamma H~}.
Mat lorentzian_segment(const Mat& htilde, double beta_I, double gamma, double s_max, int Mpts);
Mat lorentzian_segment(const HamiltonianPair& pair, double tau_j, double dt, double gamma, double s_max, int Mpts);
// Weight sum sum_k ds L_gamma(s_k); 1 minus it approximates the exact tail.
double lorentzian_weight_sum(double gamma, double s_max, int Mpts);
// 2 gamma / (pi s_max) + ||A||^2 s_max^3 / (3 pi gamma Mpts^2)
double lorentzian_segment_bound(double normA, double gamma, double s_max, int Mpts);

struct LorentzianDisc {
  double s_max = 0.0;
  int Mpts = 0;
};
// e^{-i H_R T} prod_j segment_j against e^{-beta_I T} exact_propagator.
MethodResult lorentzian_method(const HamiltonianPair& pair, double T, int r, const LorentzianDisc& disc);

MethodResult exact_method(const HamiltonianPair& pair, double T);

// |prod_k ||M psi_k||^2 - ||M^K psi0||^2| with psi_{k+1} = M psi_k / ||M psi_k||.
double telescoping_check(const Mat& M, const Vec& psi0, int K);

// e^{-2 beta_I T} ||e^{-i H_eff T} psi0||^2 - measured_P; throws if below -1e-10.
double barrier_check(const HamiltonianPair& pair, double T, const Vec& psi0, double measured_P);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};
// Least-squares line through (log x, log y).
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mqsp
