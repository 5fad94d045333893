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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mqsp/mqsp.h"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCrc = 3;
constexpr int kExitInstability = 4;

struct CliError {
  int code;
  std::string message;
};

int exit_code_of(mqsp_status s) {
  switch (s) {
    case MQSP_OK: return kExitOk;
    case MQSP_ERR_CRC_VIOLATION: return kExitCrc;
    case MQSP_ERR_INSTABILITY:
    case MQSP_ERR_NOT_CONVERGED:
    case MQSP_ERR_INDEFINITE:
    case MQSP_ERR_INTERNAL: return kExitInstability;
    default: return kExitConfig;
  }
}

void check(mqsp_status s) {
  if (s == MQSP_OK) return;
  std::ostringstream os;
  os << mqsp_status_name(s) << ": " << mqsp_last_error();
  if (s == MQSP_ERR_CRC_VIOLATION || s == MQSP_ERR_INSTABILITY) os << " (value " << mqsp_last_error_value() << ")";
  throw CliError{exit_code_of(s), os.str()};
}

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { mqsp_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitConfig, "cannot read '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw CliError{kExitConfig, "malformed JSON in '" + path + "': " + e.what()};
  }
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{kExitConfig, "cannot create output directory '" + dir + "': " + ec.message()};
  return fs::path(dir);
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitConfig, "cannot write '" + path.string() + "'"};
  out << text;
}

json config_or_empty(const std::string& path) { return path.empty() ? json::object() : read_json(path); }

template <class T>
void override_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

struct TargetArgs {
  std::string config, out = ".";
  std::optional<double> alphaRT, betaIT, delta;
  std::optional<int> r, M, dR_seg, N1, N2;
  bool normalize_sup = false;
};

int cmd_target_build(const TargetArgs& a) {
  json params = config_or_empty(a.config);
  override_opt(params, "alphaRT", a.alphaRT);
  override_opt(params, "betaIT", a.betaIT);
  override_opt(params, "delta", a.delta);
  override_opt(params, "r", a.r);
  override_opt(params, "M", a.M);
  override_opt(params, "dR_seg", a.dR_seg);
  override_opt(params, "N1", a.N1);
  override_opt(params, "N2", a.N2);
  if (a.normalize_sup) params["normalize_sup"] = true;
  Owned target, grid, report;
  check(mqsp_target_build(params.dump().c_str(), &target.p, &grid.p, &report.p));
  const fs::path out = prepare_out(a.out);
  write(out / "target.json", target.str());
  write(out / "target_grid.csv", grid.str());
  write(out / "target_report.json", report.str());
  for (const auto& w : json::parse(report.str())["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  std::cout << "wrote " << (out / "target.json").string() << "\n";
  return kExitOk;
}

struct AnglesArgs {
  std::string target, config, out = ".", window, schedule;
  bool lenient = false;
  std::optional<int> multistart, max_iters;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
};

int cmd_angles(const AnglesArgs& a) {
  json o = config_or_empty(a.config);
  if (a.lenient) o["lenient"] = true;
  override_opt(o, "restarts", a.multistart);
  override_opt(o, "sigma", a.sigma);
  override_opt(o, "seed", a.seed);
  override_opt(o, "max_iters", a.max_iters);
  if (!a.window.empty()) o["window"] = a.window;
  if (!a.schedule.empty()) o["schedule"] = a.schedule;
  if (o.value("restarts", 0) > 0 && !o.contains("seed")) {
    throw CliError{kExitConfig, "--seed is required with --multistart"};
  }
  const std::string target = read_file(a.target);
  Owned circuit, report, peel, trace, restarts;
  check(mqsp_angles(target.c_str(), o.dump().c_str(), &circuit.p, &report.p, &peel.p, &trace.p, &restarts.p));
  const fs::path out = prepare_out(a.out);
  write(out / "circuit.json", circuit.str());
  write(out / "angles_report.json", report.str());
  write(out / "peel_trace.csv", peel.str());
  write(out / "optimize_trace.csv", trace.str());
  write(out / "restarts.csv", restarts.str());
  const json r = json::parse(report.str());
  std::cout << "roundtrip_error " << r["roundtrip_error"].get<double>() << ", residual "
            << r["residual"].get<double>() << ", basins " << r["optimize"]["basins"].get<int>() << "\n";
  return kExitOk;
}

struct SimArgs {
  std::string hamiltonian, config, out = ".", method, sweep;
  std::optional<double> T, s_max;
  std::optional<int> r, M, Mpts, rk4_steps;
};

int cmd_simulate(const SimArgs& a) {
  json o = config_or_empty(a.config);
  if (!a.method.empty()) o["method"] = a.method;
  override_opt(o, "T", a.T);
  override_opt(o, "s_max", a.s_max);
  override_opt(o, "r", a.r);
  override_opt(o, "M", a.M);
  override_opt(o, "Mpts", a.Mpts);
  override_opt(o, "rk4_steps", a.rk4_steps);
  if (!a.sweep.empty()) {
    json s = json::array();
    std::stringstream ss(a.sweep);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        s.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw CliError{kExitConfig, "--sweep expects comma-separated integers"};
      }
    }
    o["sweep"] = s;
  }
  const std::string text = read_file(a.hamiltonian);
  mqsp_hamiltonian* h = nullptr;
  check(mqsp_hamiltonian_from_json(text.c_str(), &h));
  Owned result, csv;
  const mqsp_status s = mqsp_simulate(h, o.dump().c_str(), &result.p, &csv.p);
  mqsp_hamiltonian_free(h);
  check(s);
  const fs::path out = prepare_out(a.out);
  write(out / "method_result.json", result.str());
  write(out / "convergence.csv", csv.str());
  const json r = json::parse(result.str());
  std::cout << r["method"].get<std::string>() << ": error " << r["error_norm"].get<double>() << ", bound "
            << r["bound_predicted"].get<double>();
  if (r.contains("sweep") && r["sweep"].contains("slope")) std::cout << ", slope " << r["sweep"]["slope"].get<double>();
  std::cout << "\n";
  return kExitOk;
}

struct EstimateArgs {
  std::string config, out = ".", preset;
  std::optional<double> alphaT, betaT, eps, survival;
  std::optional<int> dR_seg, M_seg;
};

int cmd_estimate(const EstimateArgs& a) {
  json o = config_or_empty(a.config);
  if (!a.preset.empty()) o["preset"] = a.preset;
  override_opt(o, "alphaT", a.alphaT);
  override_opt(o, "betaT", a.betaT);
  override_opt(o, "eps", a.eps);
  override_opt(o, "survival_sq", a.survival);
  override_opt(o, "dR_seg", a.dR_seg);
  override_opt(o, "M_seg", a.M_seg);
  Owned tj, tc, tt;
  check(mqsp_estimate(o.dump().c_str(), &tj.p, &tc.p, &tt.p));
  const fs::path out = prepare_out(a.out);
  write(out / "benchmark.json", tj.str());
  write(out / "benchmark.csv", tc.str());
  write(out / "benchmark.txt", tt.str());
  std::cout << tt.str();
  return kExitOk;
}

struct VerifyArgs {
  std::string subset, report;
  std::uint64_t seed = 20250101;
  double perturb = 0.0;
};

int cmd_verify(const VerifyArgs& a) {
  Owned report, summary;
  int all = 0;
  check(mqsp_verify(a.subset.c_str(), a.seed, a.perturb, &report.p, &summary.p, &all));
  std::cout << summary.str();
  if (!a.report.empty()) write(a.report, report.str());
  if (!all) {
    const json r = json::parse(report.str());
    std::cerr << "failed criteria:";
    for (const auto& id : r["failed"]) std::cerr << " " << id.get<int>();
    std::cerr << "\n";
    return kExitAcceptance;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mqsp: bivariate signal-processing circuits for non-Hermitian simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mqsp_version()));

  TargetArgs ta;
  auto* tb = app.add_subcommand("target-build", "Build a Dyson target polynomial");
  tb->add_option("--config", ta.config, "DysonParams JSON");
  tb->add_option("--out", ta.out, "Output directory");
  tb->add_option("--alphaRT", ta.alphaRT);
  tb->add_option("--betaIT", ta.betaIT);
  tb->add_option("--delta", ta.delta);
  tb->add_option("--r", ta.r);
  tb->add_option("--M", ta.M);
  tb->add_option("--dR-seg", ta.dR_seg);
  tb->add_option("--N1", ta.N1);
  tb->add_option("--N2", ta.N2);
  tb->add_flag("--normalize-sup", ta.normalize_sup);

  AnglesArgs aa;
  auto* an = app.add_subcommand("angles", "SOS, peel and refine circuit angles for a target");
  an->add_option("--target", aa.target, "Polynomial or target-build JSON")->required();
  an->add_option("--config", aa.config, "Options JSON");
  an->add_option("--out", aa.out, "Output directory");
  an->add_flag("--lenient", aa.lenient, "Peel off-manifold targets as a warm start");
  an->add_option("--multistart", aa.multistart, "Number of perturbed restarts");
  an->add_option("--sigma", aa.sigma, "Restart perturbation scale");
  an->add_option("--seed", aa.seed, "Seed (required with --multistart)");
  an->add_option("--max-iters", aa.max_iters);
  an->add_option("--window", aa.window, "analytic or laurent")->check(CLI::IsMember({"analytic", "laurent"}));
  an->add_option("--schedule", aa.schedule, "Query order over {R, I}");

  SimArgs sa;
  auto* si = app.add_subcommand("simulate", "Simulate one propagation method against the dense oracle");
  si->add_option("--hamiltonian", sa.hamiltonian, "Hamiltonian JSON")->required();
  si->add_option("--config", sa.config, "Options JSON");
  si->add_option("--out", sa.out, "Output directory");
  si->add_option("--method", sa.method, "exact, midpoint, dyson-lcu or lorentzian");
  si->add_option("--T", sa.T);
  si->add_option("--r", sa.r);
  si->add_option("--M", sa.M);
  si->add_option("--s-max", sa.s_max);
  si->add_option("--mpts", sa.Mpts);
  si->add_option("--rk4-steps", sa.rk4_steps);
  si->add_option("--sweep", sa.sweep, "Comma-separated segment counts");

  EstimateArgs ea;
  auto* es = app.add_subcommand("estimate", "Query-count and postselection tables");
  es->add_option("--config", ea.config, "Options JSON");
  es->add_option("--out", ea.out, "Output directory");
  es->add_option("--preset", ea.preset, "weak or strong");
  es->add_option("--alphaT", ea.alphaT);
  es->add_option("--betaT", ea.betaT);
  es->add_option("--eps", ea.eps);
  es->add_option("--survival", ea.survival);
  es->add_option("--dR-seg", ea.dR_seg);
  es->add_option("--M-seg", ea.M_seg);

  VerifyArgs va;
  auto* ve = app.add_subcommand("verify", "Run the acceptance criteria");
  ve->add_option("--subset", va.subset, "Groups or ids, comma-separated");
  ve->add_option("--seed", va.seed);
  ve->add_option("--perturb-angles", va.perturb, "Added to recovered angles (mutation test)");
  ve->add_option("--report", va.report, "Per-criterion JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*tb) return cmd_target_build(ta);
    if (*an) return cmd_angles(aa);
    if (*si) return cmd_simulate(sa);
    if (*es) return cmd_estimate(ea);
    if (*ve) return cmd_verify(va);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kExitConfig;
}
