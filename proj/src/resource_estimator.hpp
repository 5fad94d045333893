#pragma once

#include <string>
#include <vector>

namespace mqsp {

// Published reference counts for the Eckart-barrier presets; not derivable from closed forms.
struct ReferenceCounts {
  bool present = false;
  long dR = 0, dI = 0, Q = 0;
  double repetitions = 0.0;  // 0 when not quoted
};

struct ResourceBudget {
  std::string method;
  long dR = 0, dI = 0, Q_total = 0;
  int r = -1, M = -1, p = -1;  // -1 when not applicable
  long dR_seg = -1, dI_seg = -1;
  double postselection_P = 0.0;  // may underflow; use log10_P
  double log10_P = 0.0;
  double log10_repetitions = 0.0;
  int postselections = 1;
  ReferenceCounts reference;
  std::vector<std::string> notes;  // which constants are given, defaulted or overridden
};

// alphaT + betaT + ln(1/eps)/lnln(1/eps); eps in (0, 1/e).
double lower_bound(double alphaT, double betaT, double eps);

struct DysonOverrides {
  int dR_seg = -1;  // -1: from ja_degree
  int M_seg = -1;   // -1: from taylor_order
};

// r = ceil(betaT / c_seg); per-segment degrees at eps' = eps / (3 r e^{betaT}).
ResourceBudget dyson_lcu_budget(double alphaT, double betaT, double eps, double c_seg = 1.0,
                                const DysonOverrides& overrides = {});

struct MqspConstants {
  double c_R = 1.0;
  double c_I = 1.0;
};
// dR = ceil(c_R alphaT + ln(1/eps)), dI = ceil(c_I betaT + ln(1/eps)/lnln(1/eps)).
ResourceBudget mqsp_budget(double alphaT, double betaT, double eps, const MqspConstants& c = {});

// sqrt(2 ln 3)
double lorentzian_c();
// sqrt(ln(1/eps) / (2 ln 3))
double lorentzian_optimal_p(double eps);
// exp(sqrt(2 ln 3 ln(1/eps)))
double lorentzian_overhead(double eps);

constexpr int kOptimalOrder = 0;
// Unit constants. r from (alphaT)(betaT)^{2p} e^{betaT} / r^{2p} <= eps/3, which is
// the midpoint bound form at p = 1. Per segment: ja_degree(alphaT/r, eps/(3r)) frame
// queries and 3^{p-1} ceil(ln(3r/eps)) dissipative queries. p = kOptimalOrder
// rounds p* to the nearest order >= 1.
ResourceBudget lorentzian_budget(double alphaT, double betaT, double eps, int p);

// Leading forms with unit constants, tau = alphaT + betaT:
// tau^{1+1/(2p)} eps^{-1/(2p)} (alphaT + ln(1/eps)) and tau^{1+1/p} eps^{-1/p}.
double lorentzian_asymptotic(double alphaT, double betaT, double eps, int p);
double trotter_asymptotic(double alphaT, double betaT, double eps, int p);

struct PostselectionCost {
  double P = 0.0;
  double log10_P = 0.0;
};
// P = e^{-2 betaT} survival_sq, computed in log domain.
PostselectionCost postselection_cost(double betaT, double survival_sq);
double log10_repetitions(long Q, const PostselectionCost& c);

struct BenchmarkPreset {
  std::string name;
  double alphaT = 0.0;
  double betaT = 0.0;
  double eps = 0.0;
  double survival_sq = 1.0;
  DysonOverrides dyson;
};
BenchmarkPreset weak_preset();
BenchmarkPreset strong_preset();
// "weak" or "strong"; throws Config otherwise.
BenchmarkPreset preset_by_name(const std::string& name);

struct BenchmarkTable {
  BenchmarkPreset preset;
  std::vector<ResourceBudget> rows;  // Dyson LCU, M-QSP, then Lorentzian (p = 4) when r <= 1e9
  double lower_bound = 0.0;
  double reference_lower_bound = 0.0;  // 0 when not quoted
  // Dyson/M-QSP query ratio from the reference totals (0 when absent).
  double reference_ratio = 0.0;
};
BenchmarkTable benchmark_table(const BenchmarkPreset& preset);

}  // namespace mqsp
