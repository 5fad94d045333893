#include "dyson_target.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "specfun.hpp"

namespace mqsp {

void DysonParams::validate() const {
  if (r < 1) throw Error(ErrorKind::Validation, "r must be >= 1");
  if (M < 0) throw Error(ErrorKind::Validation, "M must be >= 0");
  if (dR_seg < 0) throw Error(ErrorKind::Validation, "dR_seg must be >= 0");
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorKind::Validation, "delta must lie in [0, 1)");
  if (betaIT < 0.0) throw Error(ErrorKind::Validation, "betaIT must be >= 0");
  if (N1 < 4 || N2 < 4) throw Error(ErrorKind::Validation, "grid sizes must be >= 4");
}

BiLaurent DysonTarget::analytic() const {
  return monomial_shift(P_delta, dR, dI);
}

BiLaurent frame_block(double tau, int d) {
  if (d < 0) throw Error(ErrorKind::Validation, "frame_block degree must be >= 0");
  BiLaurent out(Window{-d, d}, Window{0, 0});
  const cplx minus_i(0.0, -1.0);
  for (int n = -d; n <= d; ++n) {
    const int a = std::abs(n);
    out.at(n, 0) = std::pow(minus_i, a) * bessel_j(a, tau);
  }
  return out;
}

BiLaurent taylor_block(double c, int M) {
  if (c < 0.0) throw Error(ErrorKind::Validation, "taylor_block needs c >= 0");
  if (M < 0) throw Error(ErrorKind::Validation, "taylor_block needs M >= 0");
  BiLaurent out(Window{0, 0}, Window{-M, M});
  // (c cos)^m / m! = (c/2)^m / m! sum_k C(m,k) z^{2k-m}
  double w = 1.0;
  for (int m = 0; m <= M; ++m) {
    if (m > 0) w *= c / (2.0 * m);
    double binom = 1.0;
    for (int k = 0; k <= m; ++k) {
      out.at(0, 2 * k - m) += w * binom;
      binom = binom * (m - k) / (k + 1.0);
    }
  }
  return out;
}

Schedule dyson_schedule(const DysonParams& params) {
  params.validate();
  Schedule s;
  for (int j = 0; j < params.r; ++j) {
    s.entries.append(static_cast<std::size_t>(2 * params.dR_seg), 'R');
    s.entries.append(static_cast<std::size_t>(2 * params.M), 'I');
  }
  return s;
}

DysonTarget build_dyson_target(const DysonParams& params) {
  params.validate();
  const double tau = params.alphaRT / params.r;
  const double c = params.betaIT / params.r;
  double mu = 1.0, term = 1.0;
  for (int m = 1; m <= params.M; ++m) {
    term *= c / m;
    mu += term;
  }
  const BiLaurent seg = multiply(frame_block(tau, params.dR_seg), taylor_block(c, params.M));
  BiLaurent raw = BiLaurent::constant(1.0);
  for (int j = 0; j < params.r; ++j) {
    raw = multiply(raw, seg);
    raw *= 1.0 / mu;
  }

  DysonTarget t;
  t.schedule = dyson_schedule(params);
  t.lambda = std::pow(mu, params.r);
  t.dR = params.r * params.dR_seg;
  t.dI = params.r * params.M;
  t.analytic_dR = 2 * t.dR;
  t.analytic_dI = 2 * t.dI;
  t.stated_dI = params.M;

  const int n1 = std::max(params.N1, 4 * raw.window1().span());
  const int n2 = std::max(params.N2, 4 * raw.window2().span());
  const TorusGrid g = evaluate_grid(raw, n1, n2);
  double curve_max = 0.0, raw_sup = 0.0;
  for (int j = 0; j < n1; ++j) {
    curve_max = std::max(curve_max, std::abs(g(j, 0)));
    for (int k = 0; k < n2; ++k) raw_sup = std::max(raw_sup, std::abs(g(j, k)));
  }
  t.zero_locus_deficit = 1.0 - curve_max;
  if (params.normalize_sup && raw_sup > 1.0) t.sup_rescale = 1.0 / raw_sup;

  t.P_delta = raw;
  t.P_delta *= (1.0 - params.delta) * t.sup_rescale;
  t.sup_norm = raw_sup * (1.0 - params.delta) * t.sup_rescale;
  if (t.sup_norm > 1.0 - params.delta + 1e-10) {
    std::ostringstream os;
    os << "sup norm " << t.sup_norm << " exceeds 1 - delta = " << 1.0 - params.delta
       << "; increase delta or the Jacobi-Anger degree dR_seg";
    throw Error(ErrorKind::Validation, os.str(), t.sup_norm);
  }
  return t;
}

TorusGrid target_grid_exact(double alphaRT, double betaIT, int N1, int N2) {
  if (N1 < 4 || N2 < 4) throw Error(ErrorKind::Validation, "grid sizes must be >= 4");
  TorusGrid g(N1, N2);
  for (int j = 0; j < N1; ++j) {
    const double c1 = std::cos(2.0 * M_PI * j / N1);
    for (int k = 0; k < N2; ++k) {
      const double c2 = std::cos(2.0 * M_PI * k / N2);
      g(j, k) = std::polar(std::exp(betaIT * (c2 - 1.0)), -alphaRT * c1);
    }
  }
  return g;
}

ErrorBudget error_budget(double alpha_R, double beta_I, double T, int r, int M, double C_mag) {
  if (r < 1 || M < 0) throw Error(ErrorKind::Validation, "error_budget needs r >= 1, M >= 0");
  ErrorBudget b;
  b.quadrature = C_mag * alpha_R * beta_I * beta_I * T * T * T / (static_cast<double>(r) * r);
  const double x = beta_I * T / r;
  b.taylor = (x > 0.0) ? r * std::exp(log_power_over_factorial(x, M + 1) + beta_I * T) : 0.0;
  b.total = b.quadrature + b.taylor;
  return b;
}

ErrorBudget error_budget(const DysonParams& params, double T, double C_mag) {
  if (!(T > 0.0)) throw Error(ErrorKind::Validation, "T must be positive");
  return error_budget(params.alphaRT / T, params.betaIT / T, T, params.r, params.M, C_mag);
}

}  // namespace mqsp
