#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "serialize.hpp"

namespace mqsp {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string group;
  bool passed = false;
  double metric = 0.0;     // worst observed value
  double threshold = 0.0;  // bar it was compared against
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::set<int> ids;  // empty: all criteria
  std::uint64_t seed = 20250101;
  // Added to every recovered theta before the roundtrip comparison (mutation test).
  double perturb_angles = 0.0;
};

// Group names: anglefind, sos, sim, optimize, resources, specfun. Also
// accepts comma-separated criterion numbers. Throws Config on unknown names.
std::set<int> parse_subset(const std::string& subset);

constexpr int kCriterionCount = 12;
std::string criterion_name(int id);
std::string criterion_group(int id);

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

json to_json(const CriterionResult& r);
// "[PASS] 1 anglefind-roundtrip: ..." style line.
std::string summary_line(const CriterionResult& r);

}  // namespace mqsp
