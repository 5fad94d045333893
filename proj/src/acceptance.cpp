// Copyright 2025 The mqsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "error.hpp"
#include "specfun.hpp"

namespace mqsp {

namespace {

struct CriterionInfo {
  const char* name;
  const char* group;
};

constexpr CriterionInfo kCriteria[kCriterionCount] = {
    {"anglefind-roundtrip", "anglefind"}, {"sos-rank2-identity", "sos"},
    {"interaction-factorization", "sim"}, {"midpoint-order", "sim"},
    {"dyson-lcu-budget", "sim"},          {"lorentzian-segment", "sim"},
    {"telescoping-barrier", "sim"},       {"canonical-obstruction", "sos"},
    {"gradient-check", "optimize"},       {"resource-tables", "resources"},
    {"dyson-landscape", "optimize"},         {"truncation-selectors", "specfun"},
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

double grid_max_sos_residual(const BiLaurent& P, const std::vector<BiLaurent>& terms, int N) {
  const TorusGrid gp = evaluate_grid(P, N, N);
  std::vector<TorusGrid> gq;
  for (const BiLaurent& q : terms) gq.push_back(evaluate_grid(q, N, N));
  double worst = 0.0;
  for (std::size_t i = 0; i < gp.values.size(); ++i) {
    double s = 1.0 - std::norm(gp.values[i]);
    for (const TorusGrid& g : gq) s -= std::norm(g.values[i]);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

CriterionResult c1_roundtrip(const AcceptanceOptions& o) {
  struct Row {
    int dR, dI, r;
  };
  const Row rows[] = {{2, 2, 1}, {3, 3, 1}, {4, 4, 2},  {5, 5, 2},  {6, 4, 2},
                      {8, 6, 3}, {10, 8, 3}, {12, 10, 4}, {14, 12, 4}};
  CriterionResult res;
  res.threshold = 1e-8;
  res.passed = true;
  std::ostringstream os;
  int k = 0;
  for (const Row& row : rows) {
    std::mt19937_64 rng(o.seed + static_cast<std::uint64_t>(k++));
    const Schedule s = Schedule::blocks(row.dR, row.dI, row.r);
    const CircuitSpec truth = random_circuit(s, rng);
    const CircuitPolys cp = circuit_polynomials(truth);
    AngleFindResult af = recursive_angle_find(cp.P, {cp.Q}, s);
    for (Angle& a : af.spec.angles) a.theta += o.perturb_angles;
    const int n1 = nyquist_size(row.dR), n2 = nyquist_size(row.dI);
    const double err = roundtrip_verify(cp.P, af.spec, n1, n2);
    const int d = row.dR + row.dI;
    const double bar = d <= 10 ? 1e-12 : 1e-8;
    const bool ok = err < bar;
    res.passed = res.passed && ok;
    res.metric = std::max(res.metric, err);
    os << "(" << row.dR << "," << row.dI << ") " << sci(err) << (ok ? "" : " FAIL") << "; ";
  }
  res.detail = os.str();
  return res;
}

CriterionResult c2_rank2(const AcceptanceOptions& o) {
  const int degs[][2] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 2}, {2, 3}, {3, 3},
                         {4, 3}, {4, 4}, {5, 5}, {6, 5}, {6, 6}, {7, 7}, {8, 8}};
  const double delta = 1e-3;
  CriterionResult res;
  res.threshold = 1e-12;
  res.passed = true;
  int count = 0;
  for (const auto& dg : degs) {
    std::mt19937_64 rng(o.seed + 100 + static_cast<std::uint64_t>(count));
    const Schedule s = Schedule::blocks(dg[0], dg[1], std::max(1, std::min(dg[0], dg[1])));
    const CircuitPolys cp = circuit_polynomials(random_circuit(s, rng));
    const BiLaurent Pd = (1.0 - delta) * cp.P;
    const SOSDecomposition sos = rank2_complement(Pd, cp.Q, delta);
    const double r = grid_max_sos_residual(Pd, sos.terms, 64);
    res.metric = std::max(res.metric, r);
    res.passed = res.passed && r < res.threshold && sos.L == 2;
    ++count;
  }
  res.detail = std::to_string(count) + " circuits through (8,8), max residual " + sci(res.metric);
  return res;
}

CriterionResult c3_factorization(const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 200);
  CriterionResult res;
  res.threshold = 1e-8;
  double worst_gronwall = 0.0;
  const double T = 1.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + i % 7;
    const HamiltonianPair pair = random_pair(n, 1.0, 0.5, rng);
    const InteractionFrame frame(pair);
    const Mat lhs = exact_propagator(pair, T);
    const Mat V = interaction_propagator(pair, T, 4096);
    const double err = operator_norm(lhs - frame.free_evolution(T) * V) / std::exp(pair.beta_I * T);
    res.metric = std::max(res.metric, err);
    for (int k = 1; k <= 4; ++k) {
      const double t = T * k / 4;
      const Mat Vt = k == 4 ? V : interaction_propagator(pair, t, 1024 * k);
      worst_gronwall = std::max(worst_gronwall, operator_norm(Vt) / std::exp(pair.beta_I * t));
    }
  }
  const bool gron = worst_gronwall <= 1.0 + 1e-8;
  res.passed = res.metric < res.threshold && gron;
  res.detail = "max relative error " + sci(res.metric) + ", max ||V(t)|| e^{-beta t} " + sci(worst_gronwall);
  return res;
}

CriterionResult c4_midpoint(const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 300);
  const HamiltonianPair pair = random_pair(4, 1.0, 0.5, rng);
  const double T = 1.0;
  const Mat V = interaction_propagator(pair, T, 8192);
  std::vector<double> rs, errs;
  std::ostringstream os;
  for (int r : {4, 8, 16, 32, 64}) {
    const double e = operator_norm(V - midpoint_propagator(pair, T, r));
    rs.push_back(r);
    errs.push_back(e);
    os << "r=" << r << " " << sci(e) << "; ";
  }
  const SlopeFit f = loglog_fit(rs, errs);
  CriterionResult res;
  res.metric = f.slope;
  res.threshold = -2.0;
  res.passed = f.slope >= -2.3 && f.slope <= -1.7;
  res.detail = os.str() + "slope " + std::to_string(f.slope);
  return res;
}

CriterionResult c5_dyson(const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 400);
  const HamiltonianPair pair = random_pair(4, 1.0, 0.5, rng);
  const Calibration cal = frozen_calibration();
  CriterionResult res;
  res.threshold = 1.0;
  res.passed = cal.C_mag <= 10.0 && cal.C2 <= 10.0;
  for (int r : {2, 4, 8}) {
    for (int M = 1; M <= 4; ++M) {
      const MethodResult m = dyson_lcu_propagator(pair, 1.0, r, M);
      const double ratio = m.error_norm / m.bound_predicted;
      res.metric = std::max(res.metric, ratio);
      res.passed = res.passed && m.error_norm <= m.bound_predicted;
    }
  }
  res.detail = "12 (r, M) points, max error/budget " + sci(res.metric) + ", C_mag " + std::to_string(cal.C_mag);
  return res;
}

CriterionResult c6_lorentzian(const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 500);
  const HamiltonianPair pair = random_pair(4, 1.0, 0.5, rng);
  const double dt = 0.25, tau = 0.125;
  const InteractionFrame frame(pair);
  const Mat h = frame.htilde(tau);
  const Mat exact = std::exp(-pair.beta_I * dt) * matrix_exponential(dt * h);
  const double normA = operator_norm(pair.beta_I * Mat::Identity(h.rows(), h.cols()) - h);
  CriterionResult res;
  res.threshold = 1.0;
  res.passed = true;
  for (double mult : {1.0, 5.0, 20.0}) {
    for (int Mpts : {64, 256, 1024}) {
      const Mat seg = lorentzian_segment(pair, tau, dt, dt, mult * dt, Mpts);
      const double err = operator_norm(seg - exact);
      const double bound = lorentzian_segment_bound(normA, dt, mult * dt, Mpts);
      res.metric = std::max(res.metric, err / bound);
      res.passed = res.passed && err <= bound;
    }
  }
  const double deficit = 1.0 - lorentzian_weight_sum(dt, dt, 1 << 20);
  const double tail = lorentzian_tail(dt, dt);
  const bool tail_ok = std::abs(deficit - tail) < 1e-10 && std::abs(tail - 0.5) < 1e-15;
  res.passed = res.passed && tail_ok;
  res.detail = "9 (s_max, Mpts) points, max error/bound " + sci(res.metric) + ", deficit at s_max = gamma " +
               format_double(deficit);
  return res;
}

CriterionResult c7_telescoping(const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 600);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  CriterionResult res;
  res.threshold = 1e-12;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 7;
    Mat M(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) M(a, b) = cplx(g(rng), g(rng));
    }
    M *= u(rng) / operator_norm(M);
    res.metric = std::max(res.metric, telescoping_check(M, random_state(n, rng), 20));
  }
  double worst_margin = INFINITY;
  bool barrier_ok = true;
  std::vector<HamiltonianPair> pairs = {lindblad_benchmark_pair()};
  for (int i = 0; i < 4; ++i) pairs.push_back(random_pair(2 + i, 1.0, 0.5, rng));
  for (const HamiltonianPair& pair : pairs) {
    const CircuitSpec spec = random_circuit(Schedule::blocks(2, 2, 1), rng);
    const Vec psi = random_state(pair.dim(), rng);
    for (double T : {0.5, 1.0, 2.0}) {
      for (double delta : {0.0, 1e-3, 0.1}) {
        const double P = success_probability(spec, pair, T, psi, delta);
        try {
          worst_margin = std::min(worst_margin, barrier_check(pair, T, psi, P));
        } catch (const Error& e) {
          barrier_ok = false;
          worst_margin = std::min(worst_margin, e.value());
        }
      }
    }
  }
  res.passed = res.metric < res.threshold && barrier_ok && worst_margin >= -1e-10;
  res.detail = "max defect " + sci(res.metric) + " on 100 contractions, min barrier margin " + sci(worst_margin);
  return res;
}

CriterionResult c8_obstruction(const AcceptanceOptions& o) {
  BiLaurent H({-1, 1}, {-1, 1});
  H.at(0, 0) = 4.0;
  H.at(1, 0) = H.at(-1, 0) = H.at(0, 1) = H.at(0, -1) = -1.0;
  const MomentMatrix mm = moment_matrix(H);
  Eigen::VectorXd ev = hermitian_eigendecompose(mm.M).values;
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end());
  const double want[] = {2, 4, 4, 6};
  CriterionResult res;
  res.threshold = 1e-12;
  bool eig_ok = v.size() == 4;
  for (std::size_t i = 0; eig_ok && i < 4; ++i) res.metric = std::max(res.metric, std::abs(v[i] - want[i]));
  eig_ok = eig_ok && res.metric < res.threshold;
  const bool can_infeasible = !scalar_factorization_feasible(H).feasible;
  std::mt19937_64 rng(o.seed + 700);
  std::normal_distribution<double> g(0.0, 1.0);
  bool built_feasible = true;
  for (const auto& w : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
    BiLaurent Q({0, w.first}, {0, w.second});
    for (cplx& c : Q.coeffs()) c = cplx(g(rng), g(rng));
    built_feasible = built_feasible && scalar_factorization_feasible(abs_squared(Q)).feasible;
  }
  BiLaurent simple = BiLaurent::constant(1.0) + BiLaurent::monomial(1, 1, 0.5);
  built_feasible = built_feasible && scalar_factorization_feasible(abs_squared(simple)).feasible;
  res.passed = eig_ok && can_infeasible && built_feasible;
  std::ostringstream os;
  os << "eigenvalues";
  for (double x : v) os << " " << format_double(x);
  os << "; canonical feasible=" << (can_infeasible ? "false" : "true")
     << "; |Q|^2 inputs feasible=" << (built_feasible ? "true" : "false");
  res.detail = os.str();
  return res;
}

CriterionResult c9_gradient(const AcceptanceOptions& o) {
  CriterionResult res;
  res.threshold = 1e-6;
  std::mt19937_64 rng(o.seed + 800);
  const double h = 1e-6;
  for (int d : {2, 4, 6}) {
    const Schedule s = Schedule::blocks(d, d, 2);
    for (int i = 0; i < 20; ++i) {
      const CircuitSpec spec = random_circuit(s, rng, 0.0, M_PI);
      const BiLaurent target = circuit_polynomials(random_circuit(s, rng)).P;
      const TorusGrid tg = target_grid_for(target, s);
      const std::vector<double> g = gradient(spec, tg);
      std::vector<double> x = spec.flatten();
      double num = 0.0, den = 1e-8;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double x0 = x[k];
        x[k] = x0 + h;
        const double fp = cost(CircuitSpec::unflatten(s, x), tg);
        x[k] = x0 - h;
        const double fm = cost(CircuitSpec::unflatten(s, x), tg);
        x[k] = x0;
        num = std::max(num, std::abs(g[k] - (fp - fm) / (2 * h)));
        den = std::max(den, std::abs(g[k]));
      }
      res.metric = std::max(res.metric, num / den);
    }
  }
  res.passed = res.metric < res.threshold;
  res.detail = "60 configurations over (2,2), (4,4), (6,6), max relative error " + sci(res.metric);
  return res;
}

CriterionResult c10_resources(const AcceptanceOptions&) {
  CriterionResult res;
  const ResourceBudget strong = dyson_lcu_budget(338, 338, 1e-3, 1.0, {7, 9});
  const bool dyson_ok = strong.r == 338 && strong.dR == 2366 && strong.dI == 3042 && strong.Q_total == 5408;
  const double lb_weak = lower_bound(338, 15.6, 1e-3), lb_strong = lower_bound(338, 338, 1e-3);
  const bool lb_ok = std::abs(lb_weak - 357) <= 1 && std::abs(lb_strong - 680) <= 1;
  const BenchmarkTable t = benchmark_table(strong_preset());
  const bool ratio_ok = std::abs(t.reference_ratio - 4.22) < 5e-3;
  const BenchmarkTable w = benchmark_table(weak_preset());
  const bool tagged = w.rows.size() >= 2 && w.rows[1].reference.present && w.rows[1].reference.Q == 407;
  res.metric = std::max(std::abs(lb_weak - 357), std::abs(lb_strong - 680));
  res.threshold = 1.0;
  res.passed = dyson_ok && lb_ok && ratio_ok && tagged;
  std::ostringstream os;
  os << "Dyson LCU (" << strong.dR << ", " << strong.dI << ", " << strong.Q_total << "); lower bounds "
     << lb_weak << ", " << lb_strong << "; reference ratio " << t.reference_ratio
     << "; weak M-QSP 361/46/407 shipped as reference data";
  res.detail = os.str();
  return res;
}

CriterionResult c11_dyson_landscape(const AcceptanceOptions& o) {
  const int cfg[][2] = {{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 3}, {3, 4}, {4, 4}, {5, 4}, {4, 5}, {5, 5}};
  CriterionResult res;
  res.threshold = 0.5;
  res.passed = true;
  std::ostringstream os;
  double lo = INFINITY;
  int k = 0;
  for (const auto& c : cfg) {
    DysonParams p;
    p.alphaRT = 0.8;
    p.betaIT = 0.4;
    p.r = 1;
    p.dR_seg = c[0];
    p.M = c[1];
    p.normalize_sup = true;
    const DysonTarget t = build_dyson_target(p);
    PipelineOptions po;
    po.lenient = true;
    po.restarts = 8;
    po.sigma = M_PI / 4;
    po.seed = o.seed + 1000 + static_cast<std::uint64_t>(k++);
    const PipelineResult pr = angles_pipeline(t.P_delta, Schedule::blocks(c[0], c[1], 1), {}, po);
    const double best = pr.report.final_cost;
    const bool ok = best >= 0.05 && best <= 0.5 && pr.report.basins >= 2;
    res.passed = res.passed && ok;
    res.metric = std::max(res.metric, best);
    lo = std::min(lo, best);
    os << "(" << c[0] << "," << c[1] << ") " << sci(best) << "/" << pr.report.basins << (ok ? "" : " FAIL") << "; ";
  }
  res.detail = os.str() + "best residual range [" + sci(lo) + ", " + sci(res.metric) + "]";
  return res;
}

CriterionResult c12_selectors(const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 1100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CriterionResult res;
  res.passed = true;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const double eps = std::pow(10.0, -2.0 - 12.0 * u(rng));
    const double tau = 20.0 * u(rng), c = 0.1 + 4.9 * u(rng), b = 0.1 + 9.9 * u(rng), x = 0.1 + 9.9 * u(rng);
    const int dj = ja_degree(tau, eps).degree;
    const int dt = taylor_order(c, eps).degree;
    const int dd = dyson_order(b, eps).degree;
    const int de = min_degree_bounded_exp(x, eps).degree;
    const bool ok = ja_degree_holds(tau, eps, dj) && (dj == 0 || !ja_degree_holds(tau, eps, dj - 1)) &&
                    taylor_order_holds(c, eps, dt) && (dt == 0 || !taylor_order_holds(c, eps, dt - 1)) &&
                    dyson_order_holds(b, eps, dd) && (dd == 0 || !dyson_order_holds(b, eps, dd - 1)) &&
                    min_degree_bounded_exp_holds(x, eps, de) &&
                    (de == 0 || !min_degree_bounded_exp_holds(x, eps, de - 1));
    if (!ok) ++failures;
  }
  double band_lo = INFINITY, band_hi = 0.0;
  for (int k = 4; k <= 16; ++k) {
    const double eps = std::pow(10.0, -k);
    const double L = std::log(1.0 / eps);
    const double ratio = min_degree_bounded_exp(1.0, eps).degree * std::log(L) / L;
    band_lo = std::min(band_lo, ratio);
    band_hi = std::max(band_hi, ratio);
  }
  res.passed = failures == 0 && band_lo >= 1.0 / 3.0 && band_hi <= 3.0;
  res.metric = failures;
  res.threshold = 0;
  res.detail = std::to_string(failures) + " non-minimal of 50 draws x 4 selectors; d*(1, eps) lnln/ln in [" +
               std::to_string(band_lo) + ", " + std::to_string(band_hi) + "]";
  return res;
}

}  // namespace

std::string criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) throw Error(ErrorKind::Config, "no criterion " + std::to_string(id));
  return kCriteria[id - 1].name;
}

std::string criterion_group(int id) {
  if (id < 1 || id > kCriterionCount) throw Error(ErrorKind::Config, "no criterion " + std::to_string(id));
  return kCriteria[id - 1].group;
}

std::set<int> parse_subset(const std::string& subset) {
  std::set<int> ids;
  std::stringstream ss(subset);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty()) continue;
    if (std::all_of(tok.begin(), tok.end(), ::isdigit)) {
      const int id = std::stoi(tok);
      criterion_name(id);
      ids.insert(id);
      continue;
    }
    bool found = false;
    for (int id = 1; id <= kCriterionCount; ++id) {
      if (kCriteria[id - 1].group == tok) {
        ids.insert(id);
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::Config, "unknown subset '" + tok + "'");
  }
  return ids;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  static constexpr Fn table[kCriterionCount] = {c1_roundtrip, c2_rank2,        c3_factorization, c4_midpoint,
                                                c5_dyson,     c6_lorentzian,   c7_telescoping,   c8_obstruction,
                                                c9_gradient,  c10_resources,   c11_dyson_landscape, c12_selectors};
  criterion_name(id);
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult res;
  try {
    res = table[id - 1](opts);
  } catch (const Error& e) {
    res.passed = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.id = id;
  res.name = kCriteria[id - 1].name;
  res.group = kCriteria[id - 1].group;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (opts.ids.empty() || opts.ids.count(id)) out.push_back(run_criterion(id, opts));
  }
  return out;
}

json to_json(const CriterionResult& r) {
  return {{"id", r.id},          {"name", r.name},           {"group", r.group},
          {"passed", r.passed},  {"metric", r.metric},       {"threshold", r.threshold},
          {"detail", r.detail},  {"seconds", r.seconds}};
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << ": " << r.detail;
  os.precision(2);
  os << " (" << std::fixed << r.seconds << " s)";
  return os.str();
}

}  // namespace mqsp
