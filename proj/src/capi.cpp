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

#include "mqsp/mqsp.h"

#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>
#include <string>

#include "acceptance.hpp"
#include "error.hpp"
#include "serialize.hpp"

struct mqsp_bilaurent {
  mqsp::BiLaurent p;
};
struct mqsp_circuit {
  mqsp::CircuitSpec spec;
};
struct mqsp_hamiltonian {
  mqsp::HamiltonianPair pair;
};

namespace {

using mqsp::Error;
using mqsp::ErrorKind;
using mqsp::json;

thread_local std::string g_last_error;
thread_local double g_last_value = 0.0;

constexpr int kMaxSimulationDim = 64;

mqsp_status null_argument() {
  g_last_error = "required pointer argument is NULL";
  g_last_value = 0.0;
  return MQSP_ERR_NULL_ARGUMENT;
}

mqsp_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return MQSP_ERR_VALIDATION;
    case ErrorKind::DegreeOverflow: return MQSP_ERR_DEGREE_OVERFLOW;
    case ErrorKind::Domain: return MQSP_ERR_DOMAIN;
    case ErrorKind::CrcViolation: return MQSP_ERR_CRC_VIOLATION;
    case ErrorKind::Instability: return MQSP_ERR_INSTABILITY;
    case ErrorKind::NotConverged: return MQSP_ERR_NOT_CONVERGED;
    case ErrorKind::Indefinite: return MQSP_ERR_INDEFINITE;
    case ErrorKind::Config: return MQSP_ERR_CONFIG;
    case ErrorKind::Io: return MQSP_ERR_IO;
  }
  return MQSP_ERR_INTERNAL;
}

template <class F>
mqsp_status guard(F&& f) {
  g_last_error.clear();
  g_last_value = 0.0;
  try {
    f();
    return MQSP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    g_last_value = e.value();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return MQSP_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MQSP_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

json parse(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed ") + what + ": " + e.what());
  }
}

template <class T>
T opt(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Config, std::string("option '") + key + "' has the wrong type");
  }
}

struct AnglesInput {
  mqsp::BiLaurent P;
  mqsp::Schedule schedule;
  std::vector<mqsp::BiLaurent> complements;  // empty: factor 1 - |P|^2
};

AnglesInput angles_input(const json& t, const json& o) {
  AnglesInput in;
  const std::string window = opt<std::string>(o, "window", "analytic");
  if (window != "analytic" && window != "laurent") throw Error(ErrorKind::Config, "window must be analytic or laurent");
  if (t.is_object() && t.contains("angles")) {
    // A circuit: peel its own P against its own Q.
    const mqsp::CircuitSpec c = mqsp::circuit_from_json(t);
    const mqsp::CircuitPolys pq = mqsp::circuit_polynomials(c);
    in.P = pq.P;
    in.schedule = c.schedule;
    in.complements.push_back(pq.Q);
  } else if (t.is_object() && t.contains("P")) {
    const mqsp::BiLaurent P = mqsp::bilaurent_from_json(t.at("P"));
    const int dR = opt<int>(t, "dR", 0), dI = opt<int>(t, "dI", 0);
    if (window == "analytic") {
      in.P = mqsp::monomial_shift(P, dR, dI);
      in.schedule = mqsp::Schedule::parse(opt<std::string>(t, "schedule", ""));
    } else {
      in.P = P;
      in.schedule = mqsp::Schedule::blocks(dR, dI, 1);
    }
  } else {
    in.P = mqsp::bilaurent_from_json(t);
    in.schedule = mqsp::Schedule::blocks(std::max(0, in.P.window1().hi), std::max(0, in.P.window2().hi), 1);
  }
  if (t.is_object() && t.contains("complements")) {
    const json& cs = t.at("complements");
    if (!cs.is_array()) throw Error(ErrorKind::Config, "'complements' must be an array of polynomials");
    in.complements.clear();
    for (const json& q : cs) in.complements.push_back(mqsp::bilaurent_from_json(q));
  }
  if (o.contains("schedule")) in.schedule = mqsp::Schedule::parse(opt<std::string>(o, "schedule", ""));
  if (in.schedule.size() == 0) throw Error(ErrorKind::Config, "empty schedule");
  return in;
}

mqsp::MethodResult simulate_one(const mqsp::HamiltonianPair& pair, const std::string& method, double T, int r,
                                int M, double s_max, int Mpts, int rk4) {
  if (method == "exact") return mqsp::exact_method(pair, T);
  if (method == "midpoint") return mqsp::midpoint_method(pair, T, r, rk4);
  if (method == "dyson-lcu") return mqsp::dyson_lcu_propagator(pair, T, r, M, rk4);
  if (method == "lorentzian") {
    const double smax = s_max > 0 ? s_max : 20.0 * T / r;
    return mqsp::lorentzian_method(pair, T, r, {smax, Mpts});
  }
  throw Error(ErrorKind::Config, "unknown method '" + method + "' (exact, midpoint, dyson-lcu, lorentzian)");
}

}  // namespace

extern "C" {

const char* mqsp_version(void) { return "0.1.0"; }

const char* mqsp_status_name(mqsp_status s) {
  switch (s) {
    case MQSP_OK: return "ok";
    case MQSP_ERR_VALIDATION: return "validation";
    case MQSP_ERR_DEGREE_OVERFLOW: return "degree-overflow";
    case MQSP_ERR_DOMAIN: return "domain";
    case MQSP_ERR_CRC_VIOLATION: return "crc-violation";
    case MQSP_ERR_INSTABILITY: return "instability";
    case MQSP_ERR_NOT_CONVERGED: return "not-converged";
    case MQSP_ERR_INDEFINITE: return "indefinite";
    case MQSP_ERR_CONFIG: return "config";
    case MQSP_ERR_IO: return "io";
    case MQSP_ERR_NULL_ARGUMENT: return "null-argument";
    case MQSP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mqsp_last_error(void) { return g_last_error.c_str(); }
double mqsp_last_error_value(void) { return g_last_value; }
void mqsp_string_free(char* s) { std::free(s); }

mqsp_status mqsp_bilaurent_from_json(const char* text, mqsp_bilaurent** out) {
  if (!text || !out) return null_argument();
  return guard([&] { *out = new mqsp_bilaurent{mqsp::bilaurent_from_json(parse(text, "polynomial JSON"))}; });
}

mqsp_status mqsp_bilaurent_to_json(const mqsp_bilaurent* p, char** out) {
  if (!p || !out) return null_argument();
  return guard([&] { *out = dup(mqsp::to_json(p->p).dump()); });
}

mqsp_status mqsp_bilaurent_eval(const mqsp_bilaurent* p, double theta1, double theta2, double* re, double* im) {
  if (!p || !re || !im) return null_argument();
  return guard([&] {
    const mqsp::cplx v = p->p.eval(theta1, theta2);
    *re = v.real();
    *im = v.imag();
  });
}

mqsp_status mqsp_bilaurent_window(const mqsp_bilaurent* p, int* lo1, int* hi1, int* lo2, int* hi2) {
  if (!p || !lo1 || !hi1 || !lo2 || !hi2) return null_argument();
  *lo1 = p->p.window1().lo;
  *hi1 = p->p.window1().hi;
  *lo2 = p->p.window2().lo;
  *hi2 = p->p.window2().hi;
  return MQSP_OK;
}

void mqsp_bilaurent_free(mqsp_bilaurent* p) { delete p; }

mqsp_status mqsp_circuit_from_json(const char* text, mqsp_circuit** out) {
  if (!text || !out) return null_argument();
  return guard([&] { *out = new mqsp_circuit{mqsp::circuit_from_json(parse(text, "circuit JSON"))}; });
}

mqsp_status mqsp_circuit_to_json(const mqsp_circuit* c, char** out) {
  if (!c || !out) return null_argument();
  return guard([&] { *out = dup(mqsp::to_json(c->spec).dump()); });
}

mqsp_status mqsp_circuit_random(const char* schedule, uint64_t seed, mqsp_circuit** out) {
  if (!schedule || !out) return null_argument();
  return guard([&] {
    std::mt19937_64 rng(seed);
    *out = new mqsp_circuit{mqsp::random_circuit(mqsp::Schedule::parse(schedule), rng)};
  });
}

mqsp_status mqsp_circuit_p(const mqsp_circuit* c, mqsp_bilaurent** out) {
  if (!c || !out) return null_argument();
  return guard([&] { *out = new mqsp_bilaurent{mqsp::circuit_polynomials(c->spec).P}; });
}

mqsp_status mqsp_circuit_q(const mqsp_circuit* c, mqsp_bilaurent** out) {
  if (!c || !out) return null_argument();
  return guard([&] { *out = new mqsp_bilaurent{mqsp::circuit_polynomials(c->spec).Q}; });
}

mqsp_status mqsp_circuit_roundtrip(const mqsp_bilaurent* target, const mqsp_circuit* c, double* rel_err) {
  if (!target || !c || !rel_err) return null_argument();
  return guard([&] {
    const mqsp::TorusGrid g = mqsp::target_grid_for(target->p, c->spec.schedule);
    *rel_err = mqsp::roundtrip_verify(target->p, c->spec, g.N1, g.N2);
  });
}

void mqsp_circuit_free(mqsp_circuit* c) { delete c; }

mqsp_status mqsp_hamiltonian_from_json(const char* text, mqsp_hamiltonian** out) {
  if (!text || !out) return null_argument();
  return guard([&] { *out = new mqsp_hamiltonian{mqsp::hamiltonian_from_json(parse(text, "Hamiltonian JSON"))}; });
}

mqsp_status mqsp_hamiltonian_norms(const mqsp_hamiltonian* h, int* dim, double* alpha_R, double* beta_I) {
  if (!h || !dim || !alpha_R || !beta_I) return null_argument();
  *dim = h->pair.dim();
  *alpha_R = h->pair.alpha_R;
  *beta_I = h->pair.beta_I;
  return MQSP_OK;
}

void mqsp_hamiltonian_free(mqsp_hamiltonian* h) { delete h; }

mqsp_status mqsp_target_build(const char* params_json, char** target_json, char** grid_csv, char** report_json) {
  if (!params_json) return null_argument();
  return guard([&] {
    const mqsp::DysonParams p = mqsp::dyson_params_from_json(parse(params_json, "DysonParams JSON"));
    const mqsp::DysonTarget t = mqsp::build_dyson_target(p);
    json target = mqsp::to_json(t);
    target["params"] = mqsp::to_json(p);
    json report = {{"zero_locus_deficit", t.zero_locus_deficit},
                   {"sup_norm", t.sup_norm},
                   {"sup_rescale", t.sup_rescale},
                   {"lambda", t.lambda},
                   {"warnings", json::array()}};
    if (p.delta == 0.0) report["warnings"].push_back("delta = 0: sup norm may reach 1 and 1 - |P|^2 can vanish");
    emit(target_json, target.dump(2) + "\n");
    emit(grid_csv, mqsp::grid_csv(mqsp::evaluate_grid(t.P_delta, p.N1, p.N2)));
    emit(report_json, report.dump(2) + "\n");
  });
}

mqsp_status mqsp_angles(const char* target_json, const char* options_json, char** circuit_json, char** report_json,
                        char** peel_csv, char** trace_csv, char** restarts_csv) {
  if (!target_json) return null_argument();
  return guard([&] {
    const json o = parse(options_json, "options");
    const AnglesInput in = angles_input(parse(target_json, "target JSON"), o);
    mqsp::PipelineOptions po;
    po.lenient = opt<bool>(o, "lenient", false);
    po.restarts = opt<int>(o, "restarts", 0);
    po.sigma = opt<double>(o, "sigma", M_PI / 4);
    po.seed = opt<std::uint64_t>(o, "seed", 1);
    po.refine.max_iters = opt<int>(o, "max_iters", po.refine.max_iters);
    if (po.restarts < 0) throw Error(ErrorKind::Config, "restarts must be >= 0");
    const mqsp::PipelineResult pr = mqsp::angles_pipeline(in.P, in.schedule, in.complements, po);
    json peel = {{"kappa_total", pr.peel.kappa_total}, {"max_deviation", pr.peel.max_deviation},
                 {"drift", pr.peel.drift},             {"ratio_ops", pr.peel.ratio_ops},
                 {"update_ops", pr.peel.update_ops},   {"fallback_used", pr.peel.fallback_used}};
    json sos = mqsp::to_json(pr.sos);
    sos.erase("terms");
    json report = {{"schedule", in.schedule.entries},
                   {"roundtrip_error", pr.roundtrip_error},
                   {"residual", pr.report.final_cost},
                   {"c_inf_estimate", pr.report.final_cost},
                   {"peel", peel},
                   {"sos", sos},
                   {"optimize", mqsp::to_json(pr.report)}};
    emit(circuit_json, mqsp::to_json(pr.spec).dump(2) + "\n");
    emit(report_json, report.dump(2) + "\n");
    emit(peel_csv, mqsp::peel_trace_csv(pr.peel.trace));
    emit(trace_csv, mqsp::optimize_trace_csv(pr.report.trace));
    emit(restarts_csv, mqsp::restarts_csv(pr.report.restart_results));
  });
}

mqsp_status mqsp_simulate(const mqsp_hamiltonian* h, const char* options_json, char** result_json, char** sweep_csv) {
  if (!h) return null_argument();
  return guard([&] {
    if (h->pair.dim() > kMaxSimulationDim) {
      throw Error(ErrorKind::Validation, "dimension " + std::to_string(h->pair.dim()) + " exceeds the limit of 64");
    }
    const json o = parse(options_json, "options");
    const std::string method = opt<std::string>(o, "method", "exact");
    const double T = opt<double>(o, "T", 1.0);
    const int r = opt<int>(o, "r", 8), M = opt<int>(o, "M", 4), Mpts = opt<int>(o, "Mpts", 1024);
    const int rk4 = opt<int>(o, "rk4_steps", 4096);
    const double s_max = opt<double>(o, "s_max", 0.0);
    if (!(T > 0.0)) throw Error(ErrorKind::Config, "T must be positive");
    const mqsp::MethodResult res = simulate_one(h->pair, method, T, r, M, s_max, Mpts, rk4);
    json out = mqsp::to_json(res);
    std::ostringstream csv;
    csv << "param,error,bound\n";
    const std::vector<int> sweep = opt<std::vector<int>>(o, "sweep", {});
    if (!sweep.empty()) {
      std::vector<double> xs, es;
      json rows = json::array();
      for (int rr : sweep) {
        const mqsp::MethodResult m = simulate_one(h->pair, method, T, rr, M, s_max, Mpts, rk4);
        csv << rr << ',' << mqsp::format_double(m.error_norm) << ',' << mqsp::format_double(m.bound_predicted)
            << '\n';
        rows.push_back({{"r", rr}, {"error", m.error_norm}, {"bound", m.bound_predicted}});
        if (m.error_norm > 0) {
          xs.push_back(rr);
          es.push_back(m.error_norm);
        }
      }
      json sw = {{"rows", rows}};
      if (xs.size() >= 2) sw["slope"] = mqsp::loglog_fit(xs, es).slope;
      out["sweep"] = sw;
    } else {
      csv << r << ',' << mqsp::format_double(res.error_norm) << ',' << mqsp::format_double(res.bound_predicted)
          << '\n';
    }
    emit(result_json, out.dump(2) + "\n");
    emit(sweep_csv, csv.str());
  });
}

mqsp_status mqsp_estimate(const char* options_json, char** table_json, char** table_csv, char** table_text) {
  return guard([&] {
    const json o = parse(options_json, "options");
    mqsp::BenchmarkPreset p;
    if (o.contains("preset")) {
      p = mqsp::preset_by_name(opt<std::string>(o, "preset", ""));
    } else {
      p.name = "custom";
      if (!o.contains("alphaT") || !o.contains("betaT") || !o.contains("eps")) {
        throw Error(ErrorKind::Config, "estimate needs a preset or alphaT, betaT and eps");
      }
    }
    p.alphaT = opt<double>(o, "alphaT", p.alphaT);
    p.betaT = opt<double>(o, "betaT", p.betaT);
    p.eps = opt<double>(o, "eps", p.eps);
    p.survival_sq = opt<double>(o, "survival_sq", p.survival_sq);
    p.dyson.dR_seg = opt<int>(o, "dR_seg", p.dyson.dR_seg);
    p.dyson.M_seg = opt<int>(o, "M_seg", p.dyson.M_seg);
    const mqsp::BenchmarkTable t = mqsp::benchmark_table(p);
    emit(table_json, mqsp::to_json(t).dump(2) + "\n");
    emit(table_csv, mqsp::benchmark_csv(t));
    emit(table_text, mqsp::benchmark_text(t));
  });
}

mqsp_status mqsp_verify(const char* subset, uint64_t seed, double perturb_angles, char** report_json,
                        char** summary_text, int* all_passed) {
  return guard([&] {
    mqsp::AcceptanceOptions opts;
    if (subset && *subset) opts.ids = mqsp::parse_subset(subset);
    opts.seed = seed;
    opts.perturb_angles = perturb_angles;
    const std::vector<mqsp::CriterionResult> results = mqsp::run_acceptance(opts);
    json arr = json::array();
    std::string text;
    json failed = json::array();
    for (const auto& r : results) {
      arr.push_back(mqsp::to_json(r));
      text += mqsp::summary_line(r) + "\n";
      if (!r.passed) failed.push_back(r.id);
    }
    json report = {{"seed", seed}, {"passed", failed.empty()}, {"failed", failed}, {"criteria", arr}};
    emit(report_json, report.dump(2) + "\n");
    emit(summary_text, text);
    if (all_passed) *all_passed = failed.empty() ? 1 : 0;
  });
}

}  // extern "C"
