#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anglefind.hpp"
#include "bilaurent.hpp"
#include "dyson_target.hpp"
#include "matops.hpp"
#include "method_sim.hpp"
#include "mqsp_circuit.hpp"
#include "qsp_optimize.hpp"
#include "resource_estimator.hpp"
#include "sos_factor.hpp"

namespace mqsp {

using json = nlohmann::ordered_json;

// Malformed payloads raise ErrorKind::Config naming the offending key.
json to_json(const BiLaurent& P);
BiLaurent bilaurent_from_json(const json& j);

json to_json(const CircuitSpec& spec);
CircuitSpec circuit_from_json(const json& j);

json to_json(const Mat& A);
Mat matrix_from_json(const json& j, const std::string& key);

json to_json(const HamiltonianPair& pair);
HamiltonianPair hamiltonian_from_json(const json& j);

json to_json(const DysonParams& p);
// Missing keys keep their defaults; unknown keys are ignored.
DysonParams dyson_params_from_json(const json& j);
json to_json(const DysonTarget& t);

json to_json(const SOSDecomposition& s);
json to_json(const OptimizeReport& r);
json to_json(const MethodResult& r);
json to_json(const ResourceBudget& b);
json to_json(const BenchmarkTable& t);

// %.17g
std::string format_double(double x);

std::string peel_trace_csv(const std::vector<PeelTraceRow>& trace);
std::string optimize_trace_csv(const std::vector<LbfgsTraceRow>& trace);
std::string restarts_csv(const std::vector<double>& finals);
std::string grid_csv(const TorusGrid& g);
std::string benchmark_csv(const BenchmarkTable& t);
std::string benchmark_text(const BenchmarkTable& t);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
void write_json_file(const std::string& path, const json& j);

}  // namespace mqsp
