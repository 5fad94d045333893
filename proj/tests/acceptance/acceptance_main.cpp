// Runs every acceptance criterion and prints one pass/fail line per criterion.
// Optional argument: a subset (group names or criterion ids, comma-separated).
#include <cstdio>
#include <exception>

#include "acceptance.hpp"
#include "error.hpp"

int main(int argc, char** argv) {
  mqsp::AcceptanceOptions opts;
  try {
    if (argc > 1) opts.ids = mqsp::parse_subset(argv[1]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  int failed = 0, ran = 0;
  for (int id = 1; id <= mqsp::kCriterionCount; ++id) {
    if (!opts.ids.empty() && opts.ids.count(id) == 0) continue;
    mqsp::CriterionResult r;
    try {
      r = mqsp::run_criterion(id, opts);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = mqsp::criterion_name(id);
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s\n", mqsp::summary_line(r).c_str());
    std::fflush(stdout);
    ++ran;
    if (!r.passed) ++failed;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
