#include "method_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyson_target.hpp"
#include "error.hpp"

namespace mqsp {

namespace {

void require_steps(int r) {
  if (r < 1) throw Error(ErrorKind::Validation, "segment count r must be >= 1");
}

double gronwall_ratio_of(const std::vector<Mat>& factors, double beta_I, double dt) {
  const Eigen::Index n = factors.empty() ? 0 : factors.front().rows();
  Mat acc = Mat::Identity(n, n);
  double worst = 0.0;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    acc = factors[j] * acc;
    worst = std::max(worst, operator_norm(acc) / std::exp(beta_I * dt * static_cast<double>(j + 1)));
  }
  return worst;
}

Mat fold(const std::vector<Mat>& factors) {
  Mat acc = Mat::Identity(factors.front().rows(), factors.front().cols());
  for (const auto& f : factors) acc = f * acc;
  return acc;
}

double lorentz(double gamma, double s) {
  return gamma / (M_PI * (s * s + gamma * gamma));
}

}  // namespace

Calibration frozen_calibration() {
  // Max fitted ratio on the sweep was 0.225 for both forms; doubled and frozen.
  return {0.5, 0.5};
}

std::vector<Mat> midpoint_frames(const HamiltonianPair& pair, double T, int r) {
  require_steps(r);
  const InteractionFrame frame(pair);
  const double dt = T / r;
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(r));
  for (int j = 1; j <= r; ++j) out.push_back(frame.htilde((j - 0.5) * dt));
  return out;
}

Mat midpoint_propagator(const HamiltonianPair& pair, double T, int r) {
  const double dt = T / r;
  std::vector<Mat> f;
  for (const Mat& h : midpoint_frames(pair, T, r)) f.push_back(matrix_exponential(h * dt));
  return fold(f);
}

double midpoint_bound(const HamiltonianPair& pair, double T, int r, double C2) {
  require_steps(r);
  return C2 * pair.alpha_R * pair.beta_I * pair.beta_I * T * T * T / (static_cast<double>(r) * r);
}

MethodResult midpoint_method(const HamiltonianPair& pair, double T, int r, int rk4_steps) {
  const double dt = T / r;
  std::vector<Mat> f;
  for (const Mat& h : midpoint_frames(pair, T, r)) f.push_back(matrix_exponential(h * dt));
  MethodResult res;
  res.method = "midpoint";
  res.approx_propagator = fold(f);
  res.exact_reference = interaction_propagator(pair, T, rk4_steps);
  res.error_norm = operator_norm(res.approx_propagator - res.exact_reference);
  const Calibration c = frozen_calibration();
  res.bound_predicted = midpoint_bound(pair, T, r, c.C2);
  res.bound_applies = true;
  res.calibrated = true;
  res.gronwall_ratio = gronwall_ratio_of(f, pair.beta_I, dt);
  res.params_used = {{"T", T}, {"r", r}, {"C2", c.C2}};
  return res;
}

Mat dyson_lcu_matrix(const HamiltonianPair& pair, double T, int r, int M) {
  require_steps(r);
  if (M < 0) throw Error(ErrorKind::Validation, "Taylor order M must be >= 0");
  const double dt = T / r;
  std::vector<Mat> f;
  for (const Mat& h : midpoint_frames(pair, T, r)) {
    const Mat x = h * dt;
    Mat term = Mat::Identity(x.rows(), x.cols());
    Mat sum = term;
    for (int m = 1; m <= M; ++m) {
      term = term * x / static_cast<double>(m);
      sum += term;
    }
    f.push_back(sum);
  }
  return fold(f);
}

MethodResult dyson_lcu_propagator(const HamiltonianPair& pair, double T, int r, int M, int rk4_steps) {
  MethodResult res;
  res.method = "dyson-lcu";
  res.approx_propagator = dyson_lcu_matrix(pair, T, r, M);
  res.exact_reference = interaction_propagator(pair, T, rk4_steps);
  res.error_norm = operator_norm(res.approx_propagator - res.exact_reference);
  const Calibration c = frozen_calibration();
  const ErrorBudget b = error_budget(pair.alpha_R, pair.beta_I, T, r, M, c.C_mag);
  res.bound_predicted = b.total;
  res.bound_applies = true;
  res.calibrated = true;
  double mu = 1.0, term = 1.0;
  for (int m = 1; m <= M; ++m) {
    term *= pair.beta_I * T / r / m;
    mu += term;
  }
  res.params_used = {{"T", T}, {"r", r}, {"M", M}, {"C_mag", c.C_mag}, {"lambda", std::pow(mu, r)},
                     {"quadrature_budget", b.quadrature}, {"taylor_budget", b.taylor}};
  return res;
}

Mat lorentzian_segment(const Mat& htilde, double beta_I, double gamma, double s_max, int Mpts) {
  if (Mpts < 2) throw Error(ErrorKind::Validation, "Lorentzian grid needs Mpts >= 2");
  if (!(gamma > 0.0 && s_max > 0.0)) throw Error(ErrorKind::Validation, "gamma and s_max must be positive");
  const Mat A = beta_I * Mat::Identity(htilde.rows(), htilde.cols()) - htilde;
  const EigenDecomp e = hermitian_eigendecompose(A);
  const double ds = 2.0 * s_max / Mpts;
  Vec g = Vec::Zero(A.rows());
  for (int k = 1; k <= Mpts; ++k) {
    const double s = -s_max + (k - 0.5) * ds;
    const double w = ds * lorentz(gamma, s);
    for (Eigen::Index i = 0; i < A.rows(); ++i) g(i) += w * std::polar(1.0, -e.values(i) * s);
  }
  return e.vectors * g.asDiagonal() * e.vectors.adjoint();
}

Mat lorentzian_segment(const HamiltonianPair& pair, double tau_j, double dt, double gamma, double s_max, int Mpts) {
  if (std::abs(gamma - dt) > 1e-12 * std::max(1.0, dt)) {
    throw Error(ErrorKind::Validation, "Lorentzian width gamma must equal the segment width dt");
  }
  const InteractionFrame frame(pair);
  return lorentzian_segment(frame.htilde(tau_j), pair.beta_I, gamma, s_max, Mpts);
}

double lorentzian_weight_sum(double gamma, double s_max, int Mpts) {
  const double ds = 2.0 * s_max / Mpts;
  double sum = 0.0;
  for (int k = 1; k <= Mpts; ++k) sum += ds * lorentz(gamma, -s_max + (k - 0.5) * ds);
  return sum;
}

double lorentzian_segment_bound(double normA, double gamma, double s_max, int Mpts) {
  return 2.0 * gamma / (M_PI * s_max) +
         normA * normA * s_max * s_max * s_max / (3.0 * M_PI * gamma * static_cast<double>(Mpts) * Mpts);
}

MethodResult lorentzian_method(const HamiltonianPair& pair, double T, int r, const LorentzianDisc& disc) {
  require_steps(r);
  const double dt = T / r;
  const InteractionFrame frame(pair);
  std::vector<Mat> f;
  double seg_bounds = 0.0;
  for (const Mat& h : midpoint_frames(pair, T, r)) {
    f.push_back(lorentzian_segment(h, pair.beta_I, dt, disc.s_max, disc.Mpts));
    const Mat A = pair.beta_I * Mat::Identity(h.rows(), h.cols()) - h;
    seg_bounds += lorentzian_segment_bound(operator_norm(A), dt, disc.s_max, disc.Mpts);
  }
  MethodResult res;
  res.method = "lorentzian";
  res.approx_propagator = frame.free_evolution(T) * fold(f);
  res.exact_reference = std::exp(-pair.beta_I * T) * exact_propagator(pair, T);
  res.error_norm = operator_norm(res.approx_propagator - res.exact_reference);
  const Calibration c = frozen_calibration();
  // Segments are contractions, so errors add; the quadrature part is the
  // midpoint bound rescaled by e^{-beta_I T}.
  res.bound_predicted = seg_bounds + std::exp(-pair.beta_I * T) * midpoint_bound(pair, T, r, c.C2);
  res.bound_applies = true;
  res.calibrated = true;
  res.gronwall_ratio = gronwall_ratio_of(f, 0.0, dt);
  res.params_used = {{"T", T}, {"r", r}, {"gamma", dt}, {"s_max", disc.s_max}, {"Mpts", disc.Mpts}, {"C2", c.C2}};
  return res;
}

MethodResult exact_method(const HamiltonianPair& pair, double T) {
  MethodResult res;
  res.method = "exact";
  res.approx_propagator = exact_propagator(pair, T);
  res.exact_reference = res.approx_propagator;
  res.error_norm = 0.0;
  res.bound_predicted = std::exp(pair.beta_I * T);
  res.gronwall_ratio = operator_norm(res.approx_propagator) / std::exp(pair.beta_I * T);
  res.params_used = {{"T", T}, {"norm", operator_norm(res.approx_propagator)}};
  return res;
}

double telescoping_check(const Mat& M, const Vec& psi0, int K) {
  if (K < 1) throw Error(ErrorKind::Validation, "K must be >= 1");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw Error(ErrorKind::Validation, "psi0 must be normalized");
  const double mn = operator_norm(M);
  if (mn > 1.0 + 1e-12) throw Error(ErrorKind::Validation, "M must be a contraction", mn);
  Vec psi = psi0, direct = psi0;
  double prod = 1.0;
  for (int k = 0; k < K; ++k) {
    const Vec next = M * psi;
    const double n = next.norm();
    if (n == 0.0) throw Error(ErrorKind::Domain, "zero vector in the telescoping chain", k);
    prod *= n * n;
    psi = next / n;
    direct = M * direct;
  }
  return std::abs(prod - direct.squaredNorm());
}

double barrier_check(const HamiltonianPair& pair, double T, const Vec& psi0, double measured_P) {
  if (!(measured_P >= 0.0 && measured_P <= 1.0)) throw Error(ErrorKind::Validation, "measured_P must lie in [0, 1]");
  const double bound = std::exp(-2.0 * pair.beta_I * T) * (exact_propagator(pair, T) * psi0).squaredNorm();
  const double margin = bound - measured_P;
  if (margin < -1e-10) {
    std::ostringstream os;
    os << "postselection barrier violated: P = " << measured_P << " exceeds " << bound;
    throw Error(ErrorKind::Instability, os.str(), margin);
  }
  return margin;
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::Validation, "loglog_fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace mqsp
