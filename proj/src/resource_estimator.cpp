#include "resource_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "specfun.hpp"

namespace mqsp {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1/2)", eps);
  if (!(std::log(std::log(1.0 / eps)) > 0.0)) {
    throw Error(ErrorKind::Domain, "eps too large: lnln(1/eps) must be positive", eps);
  }
}

void require_nonneg(double alphaT, double betaT) {
  if (!(alphaT >= 0.0 && betaT >= 0.0)) throw Error(ErrorKind::Validation, "alphaT and betaT must be >= 0");
}

double loglog_term(double eps) {
  const double L = std::log(1.0 / eps);
  return L / std::log(L);
}

// Degrees at a precision given by its natural log; throws if it underflows a double.
double eps_from_log(double log_eps) {
  if (log_eps < std::log(1e-300)) {
    throw Error(ErrorKind::Domain, "per-segment precision underflows; pass explicit overrides", log_eps);
  }
  return std::exp(log_eps);
}

void attach_postselection(ResourceBudget& b, double betaT, double survival_sq) {
  const PostselectionCost c = postselection_cost(betaT, survival_sq);
  b.postselection_P = c.P;
  b.log10_P = c.log10_P;
  b.log10_repetitions = log10_repetitions(b.Q_total, c);
}

}  // namespace

double lower_bound(double alphaT, double betaT, double eps) {
  require_nonneg(alphaT, betaT);
  require_eps(eps);
  return alphaT + betaT + loglog_term(eps);
}

ResourceBudget dyson_lcu_budget(double alphaT, double betaT, double eps, double c_seg,
                                const DysonOverrides& overrides) {
  require_nonneg(alphaT, betaT);
  if (!(c_seg > 0.0)) throw Error(ErrorKind::Validation, "c_seg must be positive", c_seg);
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1)", eps);
  ResourceBudget b;
  b.method = "dyson-lcu";
  b.r = std::max(1, static_cast<int>(std::ceil(betaT / c_seg)));
  const double log_eps_seg = std::log(eps) - std::log(3.0 * b.r) - betaT;
  if (overrides.dR_seg >= 0) {
    b.dR_seg = overrides.dR_seg;
    b.notes.push_back("dR_seg overridden");
  } else {
    b.dR_seg = ja_degree(alphaT / b.r, eps_from_log(log_eps_seg)).degree;
    b.notes.push_back("dR_seg from ja_degree at eps/(3 r e^{betaT})");
  }
  if (overrides.M_seg >= 0) {
    b.dI_seg = overrides.M_seg;
    b.notes.push_back("M_seg overridden");
  } else {
    b.dI_seg = taylor_order(betaT / b.r, eps_from_log(log_eps_seg)).degree;
    b.notes.push_back("M_seg from taylor_order at eps/(3 r e^{betaT})");
  }
  b.M = static_cast<int>(b.dI_seg);
  b.dR = b.r * b.dR_seg;
  b.dI = b.r * b.dI_seg;
  b.Q_total = b.dR + b.dI;
  std::ostringstream os;
  os << "c_seg = " << c_seg << (c_seg == 1.0 ? " (default)" : " (given)");
  b.notes.push_back(os.str());
  attach_postselection(b, betaT, 1.0);
  return b;
}

ResourceBudget mqsp_budget(double alphaT, double betaT, double eps, const MqspConstants& c) {
  require_nonneg(alphaT, betaT);
  require_eps(eps);
  ResourceBudget b;
  b.method = "mqsp";
  b.dR = static_cast<long>(std::ceil(c.c_R * alphaT + std::log(1.0 / eps)));
  b.dI = static_cast<long>(std::ceil(c.c_I * betaT + loglog_term(eps)));
  b.Q_total = b.dR + b.dI;
  b.notes.push_back(c.c_R == 1.0 && c.c_I == 1.0 ? "c_R = c_I = 1 (default)" : "c_R, c_I given");
  attach_postselection(b, betaT, 1.0);
  return b;
}

double lorentzian_c() { return std::sqrt(2.0 * std::log(3.0)); }

double lorentzian_optimal_p(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1)", eps);
  return std::sqrt(std::log(1.0 / eps) / (2.0 * std::log(3.0)));
}

double lorentzian_overhead(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1)", eps);
  return std::exp(std::sqrt(2.0 * std::log(3.0) * std::log(1.0 / eps)));
}

ResourceBudget lorentzian_budget(double alphaT, double betaT, double eps, int p) {
  require_nonneg(alphaT, betaT);
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Domain, "eps must lie in (0, 1)", eps);
  if (p < 0) throw Error(ErrorKind::Validation, "order p must be >= 1 or kOptimalOrder");
  ResourceBudget b;
  b.method = "lorentzian";
  if (p == kOptimalOrder) {
    p = std::max(1, static_cast<int>(std::lround(lorentzian_optimal_p(eps))));
    b.notes.push_back("p = round(p*)");
  }
  b.p = p;
  // log of (alphaT (betaT)^{2p} e^{betaT} 3 / eps)^{1/(2p)}
  double r = 1.0;
  if (alphaT > 0.0 && betaT > 0.0) {
    const double lg = (std::log(alphaT) + 2.0 * p * std::log(betaT) + betaT + std::log(3.0 / eps)) / (2.0 * p);
    r = std::max(1.0, std::ceil(std::exp(lg)));
  }
  if (r > 1e9) throw Error(ErrorKind::Domain, "Lorentzian segment count exceeds 1e9", r);
  b.r = static_cast<int>(r);
  const double eps_seg = eps / (3.0 * b.r);
  b.dR_seg = ja_degree(alphaT / b.r, eps_seg).degree;
  b.dI_seg = static_cast<long>(std::pow(3.0, p - 1) * std::ceil(std::log(1.0 / eps_seg)));
  b.dR = b.r * b.dR_seg;
  b.dI = b.r * b.dI_seg;
  b.Q_total = b.dR + b.dI;
  b.postselections = b.r;
  b.notes.push_back("unit quadrature constant (defaulted)");
  attach_postselection(b, betaT, 1.0);
  return b;
}

double lorentzian_asymptotic(double alphaT, double betaT, double eps, int p) {
  if (p < 1) throw Error(ErrorKind::Validation, "order p must be >= 1");
  const double tau = alphaT + betaT;
  return std::pow(tau, 1.0 + 0.5 / p) * std::pow(eps, -0.5 / p) * (alphaT + std::log(1.0 / eps));
}

double trotter_asymptotic(double alphaT, double betaT, double eps, int p) {
  if (p < 1) throw Error(ErrorKind::Validation, "order p must be >= 1");
  const double tau = alphaT + betaT;
  return std::pow(tau, 1.0 + 1.0 / p) * std::pow(eps, -1.0 / p);
}

PostselectionCost postselection_cost(double betaT, double survival_sq) {
  if (!(survival_sq >= 0.0 && survival_sq <= 1.0)) {
    throw Error(ErrorKind::Validation, "survival_sq must lie in [0, 1]", survival_sq);
  }
  if (!(betaT >= 0.0)) throw Error(ErrorKind::Validation, "betaT must be >= 0", betaT);
  PostselectionCost c;
  c.log10_P = survival_sq > 0.0 ? (-2.0 * betaT + std::log(survival_sq)) / std::log(10.0) : -INFINITY;
  c.P = std::pow(10.0, c.log10_P);
  return c;
}

double log10_repetitions(long Q, const PostselectionCost& c) {
  if (Q < 1) throw Error(ErrorKind::Validation, "query count must be >= 1");
  return std::log10(static_cast<double>(Q)) - c.log10_P;
}

BenchmarkPreset weak_preset() { return {"weak", 338.0, 15.6, 1e-3, 1.0, {}}; }

BenchmarkPreset strong_preset() { return {"strong", 338.0, 338.0, 1e-3, 1.0, {7, 9}}; }

BenchmarkPreset preset_by_name(const std::string& name) {
  if (name == "weak") return weak_preset();
  if (name == "strong") return strong_preset();
  throw Error(ErrorKind::Config, "unknown preset '" + name + "' (expected weak or strong)");
}

BenchmarkTable benchmark_table(const BenchmarkPreset& preset) {
  BenchmarkTable t;
  t.preset = preset;
  ResourceBudget dyson = dyson_lcu_budget(preset.alphaT, preset.betaT, preset.eps, 1.0, preset.dyson);
  ResourceBudget mqsp = mqsp_budget(preset.alphaT, preset.betaT, preset.eps);
  for (ResourceBudget* b : {&dyson, &mqsp}) attach_postselection(*b, preset.betaT, preset.survival_sq);
  t.lower_bound = lower_bound(preset.alphaT, preset.betaT, preset.eps);
  if (preset.name == "weak") {
    dyson.reference = {true, 528, 112, 640, 2.9e16};
    mqsp.reference = {true, 361, 46, 407, 1.8e16};
    t.reference_lower_bound = 357;
  } else if (preset.name == "strong") {
    dyson.reference = {true, 2366, 3042, 5408, 1.5e295};
    mqsp.reference = {true, 360, 922, 1282, 3.3e294};
    t.reference_lower_bound = 680;
  }
  if (dyson.reference.present) {
    t.reference_ratio = static_cast<double>(dyson.reference.Q) / static_cast<double>(mqsp.reference.Q);
  }
  t.rows = {dyson, mqsp};
  // The e^{betaT} factor in the quadrature bound makes r astronomical at large
  // betaT; the row is omitted then.
  try {
    ResourceBudget lor = lorentzian_budget(preset.alphaT, preset.betaT, preset.eps, 4);
    attach_postselection(lor, preset.betaT, preset.survival_sq);
    t.rows.push_back(lor);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Domain) throw;
  }
  return t;
}

}  // namespace mqsp
