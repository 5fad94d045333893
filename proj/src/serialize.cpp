#include "serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "error.hpp"

namespace mqsp {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Config, what); }

const json& field(const json& j, const std::string& key) {
  if (!j.is_object()) bad("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) bad("missing key '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) bad("'" + what + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) bad("'" + what + "' must be an integer");
  return j.get<int>();
}

json pair_of(cplx c) { return json::array({c.real(), c.imag()}); }

cplx cplx_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) bad("'" + what + "' entries must be [re, im] pairs");
  return {number(j[0], what), number(j[1], what)};
}

Window window_of(const json& j, const std::string& key) {
  const json& w = field(j, key);
  if (!w.is_array() || w.size() != 2) bad("'" + key + "' must be [lo, hi]");
  Window out{integer(w[0], key), integer(w[1], key)};
  if (out.hi < out.lo) bad("'" + key + "' has hi < lo");
  return out;
}

std::string quote_free(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ',' || c == '\n') c = ' ';
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(const BiLaurent& P) {
  json c = json::array();
  for (const cplx& v : P.coeffs()) c.push_back(pair_of(v));
  return {{"window1", {P.window1().lo, P.window1().hi}},
          {"window2", {P.window2().lo, P.window2().hi}},
          {"coeffs", c}};
}

BiLaurent bilaurent_from_json(const json& j) {
  const Window w1 = window_of(j, "window1"), w2 = window_of(j, "window2");
  const json& c = field(j, "coeffs");
  const std::size_t n = static_cast<std::size_t>(w1.span()) * w2.span();
  if (!c.is_array() || c.size() != n) bad("'coeffs' must hold span1 * span2 = " + std::to_string(n) + " entries");
  std::vector<cplx> v;
  v.reserve(n);
  for (const json& e : c) v.push_back(cplx_of(e, "coeffs"));
  return BiLaurent(w1, w2, std::move(v));
}

json to_json(const CircuitSpec& spec) {
  json a = json::array();
  for (const Angle& x : spec.angles) a.push_back({x.theta, x.phi});
  return {{"schedule", spec.schedule.entries}, {"angles", a}};
}

CircuitSpec circuit_from_json(const json& j) {
  const json& s = field(j, "schedule");
  if (!s.is_string()) bad("'schedule' must be a string over {R, I}");
  CircuitSpec spec;
  try {
    spec.schedule = Schedule::parse(s.get<std::string>());
  } catch (const Error& e) {
    bad(e.what());
  }
  const json& a = field(j, "angles");
  if (!a.is_array()) bad("'angles' must be an array of [theta, phi]");
  for (const json& e : a) {
    if (!e.is_array() || e.size() != 2) bad("'angles' entries must be [theta, phi]");
    spec.angles.push_back({number(e[0], "angles"), number(e[1], "angles")});
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  return spec;
}

json to_json(const Mat& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < A.cols(); ++k) row.push_back(pair_of(A(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) bad("'" + key + "' must be a nonempty array of rows");
  const std::size_t n = j.size();
  const std::size_t m = j[0].is_array() ? j[0].size() : 0;
  Mat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != m) bad("'" + key + "' rows must have equal length");
    for (std::size_t k = 0; k < m; ++k) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cplx_of(j[i][k], key);
    }
  }
  return A;
}

json to_json(const HamiltonianPair& pair) {
  return {{"H_R", to_json(pair.H_R)}, {"H_I", to_json(pair.H_I)}, {"label", pair.label}};
}

HamiltonianPair hamiltonian_from_json(const json& j) {
  const Mat HR = matrix_from_json(field(j, "H_R"), "H_R");
  const Mat HI = matrix_from_json(field(j, "H_I"), "H_I");
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) bad("'label' must be a string");
    label = j["label"].get<std::string>();
  }
  return HamiltonianPair::make(HR, HI, label);
}

json to_json(const DysonParams& p) {
  return {{"alphaRT", p.alphaRT}, {"betaIT", p.betaIT}, {"r", p.r},       {"M", p.M},
          {"dR_seg", p.dR_seg},   {"delta", p.delta},   {"N1", p.N1},     {"N2", p.N2},
          {"normalize_sup", p.normalize_sup}};
}

DysonParams dyson_params_from_json(const json& j) {
  if (!j.is_object()) bad("DysonParams must be a JSON object");
  DysonParams p;
  if (j.contains("alphaRT")) p.alphaRT = number(j["alphaRT"], "alphaRT");
  if (j.contains("betaIT")) p.betaIT = number(j["betaIT"], "betaIT");
  if (j.contains("r")) p.r = integer(j["r"], "r");
  if (j.contains("M")) p.M = integer(j["M"], "M");
  if (j.contains("dR_seg")) p.dR_seg = integer(j["dR_seg"], "dR_seg");
  if (j.contains("delta")) p.delta = number(j["delta"], "delta");
  if (j.contains("N1")) p.N1 = integer(j["N1"], "N1");
  if (j.contains("N2")) p.N2 = integer(j["N2"], "N2");
  if (j.contains("normalize_sup")) {
    if (!j["normalize_sup"].is_boolean()) bad("'normalize_sup' must be a boolean");
    p.normalize_sup = j["normalize_sup"].get<bool>();
  }
  return p;
}

json to_json(const DysonTarget& t) {
  return {{"P", to_json(t.P_delta)},
          {"schedule", t.schedule.entries},
          {"lambda", t.lambda},
          {"zero_locus_deficit", t.zero_locus_deficit},
          {"sup_norm", t.sup_norm},
          {"sup_rescale", t.sup_rescale},
          {"dR", t.dR},
          {"dI", t.dI},
          {"analytic_dR", t.analytic_dR},
          {"analytic_dI", t.analytic_dI},
          {"stated_dI", t.stated_dI}};
}

json to_json(const SOSDecomposition& s) {
  json terms = json::array();
  for (const BiLaurent& q : s.terms) terms.push_back(to_json(q));
  return {{"method", s.method},       {"L", s.L},
          {"residual", s.residual},   {"tolerance", std::isfinite(s.tolerance) ? json(s.tolerance) : json(nullptr)},
          {"regularization", s.regularization}, {"iterations", s.iterations},
          {"terms", terms}};
}

json to_json(const OptimizeReport& r) {
  return {{"initial_cost", r.initial_cost}, {"final_cost", r.final_cost},
          {"iterations", r.iterations},     {"converged", r.converged},
          {"gradient_norm", r.gradient_norm}, {"stop_reason", r.stop_reason},
          {"restart_results", r.restart_results}, {"basins", r.basins},
          {"best_restart", r.best_restart}};
}

json to_json(const MethodResult& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params_used) params[k] = v;
  return {{"method", r.method},
          {"error_norm", r.error_norm},
          {"bound_predicted", r.bound_predicted},
          {"bound_applies", r.bound_applies},
          {"calibrated", r.calibrated},
          {"gronwall_ratio", r.gronwall_ratio},
          {"params_used", params},
          {"approx_propagator", to_json(r.approx_propagator)},
          {"exact_reference", to_json(r.exact_reference)}};
}

json to_json(const ResourceBudget& b) {
  json j = {{"method", b.method}, {"dR", b.dR}, {"dI", b.dI}, {"Q_total", b.Q_total}};
  if (b.r >= 0) j["r"] = b.r;
  if (b.M >= 0) j["M"] = b.M;
  if (b.p >= 0) j["p"] = b.p;
  if (b.dR_seg >= 0) j["dR_seg"] = b.dR_seg;
  if (b.dI_seg >= 0) j["dI_seg"] = b.dI_seg;
  j["log10_P"] = b.log10_P;
  j["log10_repetitions"] = b.log10_repetitions;
  j["postselections"] = b.postselections;
  if (b.reference.present) {
    json ref = {{"dR", b.reference.dR}, {"dI", b.reference.dI}, {"Q_total", b.reference.Q}};
    if (b.reference.repetitions > 0) ref["repetitions"] = b.reference.repetitions;
    ref["provenance"] = "quoted benchmark table";
    j["reference"] = ref;
  }
  j["notes"] = b.notes;
  return j;
}

json to_json(const BenchmarkTable& t) {
  json rows = json::array();
  for (const ResourceBudget& b : t.rows) rows.push_back(to_json(b));
  json j = {{"preset", t.preset.name},
            {"alphaT", t.preset.alphaT},
            {"betaT", t.preset.betaT},
            {"eps", t.preset.eps},
            {"survival_sq", t.preset.survival_sq},
            {"lower_bound", t.lower_bound},
            {"rows", rows}};
  if (t.reference_lower_bound > 0) j["reference_lower_bound"] = t.reference_lower_bound;
  if (t.reference_ratio > 0) j["reference_ratio"] = t.reference_ratio;
  return j;
}

std::string peel_trace_csv(const std::vector<PeelTraceRow>& trace) {
  std::ostringstream os;
  os << "step,var,theta,phi,deviation,kappa\n";
  for (const PeelTraceRow& r : trace) {
    os << r.step << ',' << (r.var == 1 ? "R" : r.var == 2 ? "I" : "base") << ',' << format_double(r.theta) << ','
       << format_double(r.phi) << ',' << format_double(r.deviation) << ',' << format_double(r.kappa) << '\n';
  }
  return os.str();
}

std::string optimize_trace_csv(const std::vector<LbfgsTraceRow>& trace) {
  std::ostringstream os;
  os << "iter,cost,grad_norm,step_length\n";
  for (const LbfgsTraceRow& r : trace) {
    os << r.iter << ',' << format_double(r.cost) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.step) << '\n';
  }
  return os.str();
}

std::string restarts_csv(const std::vector<double>& finals) {
  std::ostringstream os;
  os << "restart,final_cost\n";
  for (std::size_t i = 0; i < finals.size(); ++i) os << i << ',' << format_double(finals[i]) << '\n';
  return os.str();
}

std::string grid_csv(const TorusGrid& g) {
  std::ostringstream os;
  os << "j,k,theta1,theta2,re,im\n";
  for (int j = 0; j < g.N1; ++j) {
    for (int k = 0; k < g.N2; ++k) {
      const cplx v = g(j, k);
      os << j << ',' << k << ',' << format_double(2.0 * M_PI * j / g.N1) << ','
         << format_double(2.0 * M_PI * k / g.N2) << ',' << format_double(v.real()) << ','
         << format_double(v.imag()) << '\n';
    }
  }
  return os.str();
}

std::string benchmark_csv(const BenchmarkTable& t) {
  std::ostringstream os;
  os << "method,dR,dI,Q_total,r,log10_repetitions,ref_dR,ref_dI,ref_Q_total,ref_repetitions,lower_bound,notes\n";
  for (const ResourceBudget& b : t.rows) {
    os << b.method << ',' << b.dR << ',' << b.dI << ',' << b.Q_total << ',' << b.r << ','
       << format_double(b.log10_repetitions) << ',';
    if (b.reference.present) {
      os << b.reference.dR << ',' << b.reference.dI << ',' << b.reference.Q << ','
         << format_double(b.reference.repetitions);
    } else {
      os << ",,,";
    }
    os << ',' << format_double(t.lower_bound) << ',';
    for (std::size_t i = 0; i < b.notes.size(); ++i) os << (i ? "; " : "") << quote_free(b.notes[i]);
    os << '\n';
  }
  os << "lower_bound,,," << format_double(t.lower_bound) << ",,,,,"
     << (t.reference_lower_bound > 0 ? format_double(t.reference_lower_bound) : "") << ",,"
     << format_double(t.lower_bound) << ",closed form\n";
  return os.str();
}

std::string benchmark_text(const BenchmarkTable& t) {
  std::ostringstream os;
  os << "preset " << t.preset.name << ": alphaT = " << t.preset.alphaT << ", betaT = " << t.preset.betaT
     << ", eps = " << t.preset.eps << "\n";
  os << std::left << std::setw(12) << "method" << std::right << std::setw(10) << "dR" << std::setw(10) << "dI"
     << std::setw(10) << "Q" << std::setw(12) << "log10 reps" << std::setw(10) << "ref dR" << std::setw(10)
     << "ref dI" << std::setw(10) << "ref Q" << std::setw(12) << "ref reps" << "\n";
  for (const ResourceBudget& b : t.rows) {
    os << std::left << std::setw(12) << b.method << std::right << std::setw(10) << b.dR << std::setw(10) << b.dI
       << std::setw(10) << b.Q_total << std::setw(12) << std::fixed << std::setprecision(2) << b.log10_repetitions;
    os.unsetf(std::ios::fixed);
    if (b.reference.present) {
      os << std::setw(10) << b.reference.dR << std::setw(10) << b.reference.dI << std::setw(10) << b.reference.Q
         << std::setw(12) << std::setprecision(2) << b.reference.repetitions;
    }
    os << "\n";
  }
  os << std::left << std::setw(12) << "lower bound" << std::right << std::setw(30) << std::fixed
     << std::setprecision(2) << t.lower_bound;
  if (t.reference_lower_bound > 0) os << std::setw(42) << std::setprecision(0) << t.reference_lower_bound;
  os << "\n";
  if (t.reference_ratio > 0) {
    os << "reference Dyson/M-QSP ratio " << std::setprecision(2) << t.reference_ratio << "\n";
  }
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace mqsp
