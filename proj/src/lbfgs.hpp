#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mqsp {

struct LbfgsOptions {
  int max_iters = 500;
  double cost_tol = 0.0;     // stop when cost <= cost_tol
  double grad_tol = 1e-12;   // stop when ||grad||_2 <= grad_tol
  int memory = 10;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  // Stop after this many consecutive accepted steps with relative decrease < 1e-15.
  int stall_iters = 20;
};

struct LbfgsTraceRow {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct LbfgsResult {
  std::vector<double> x;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<LbfgsTraceRow> trace;
};

// Returns f(x) and writes the gradient into g (already sized).
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& g)>;

// Limited-memory BFGS with Armijo backtracking. Accepted steps never raise the cost.
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts);

}  // namespace mqsp
