#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anglefind.hpp"
#include "bilaurent.hpp"
#include "lbfgs.hpp"
#include "mqsp_circuit.hpp"
#include "sos_factor.hpp"

namespace mqsp {

struct OptimizeReport {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::string stop_reason;
  std::vector<double> restart_results;  // final cost per restart
  int basins = 0;                       // distinct final costs at basin_resolution
  int best_restart = -1;
  std::vector<LbfgsTraceRow> trace;     // best run
};

// Mean over the grid of |P_circuit - P_target|^2.
double cost(const CircuitSpec& spec, const TorusGrid& target_grid);
// Coefficient-space sum |c_circuit - c_target|^2; equals cost() on a Nyquist grid.
double cost_coefficients(const CircuitSpec& spec, const BiLaurent& target);
// (dF/dtheta_0, dF/dphi_0, dF/dtheta_1, ...), matching CircuitSpec::flatten.
std::vector<double> gradient(const CircuitSpec& spec, const TorusGrid& target_grid);
double cost_and_gradient(const CircuitSpec& spec, const TorusGrid& target_grid, std::vector<double>& grad);

// Smallest power-of-two grid (>= 16) holding index spread `degree` without aliasing.
int nyquist_size(int degree);
// Grid on which cost() equals the coefficient-space distance between the
// circuit P and target, for any target window (Laurent targets included).
TorusGrid target_grid_for(const BiLaurent& target, const Schedule& schedule);

struct RefineOptions {
  int max_iters = 500;
  double cost_tol = 1e-26;
  double grad_tol = 1e-13;
  int memory = 10;
};

struct RefineResult {
  CircuitSpec spec;
  OptimizeReport report;
};

RefineResult refine(const CircuitSpec& spec0, const TorusGrid& target_grid, const RefineOptions& opts = {});

constexpr double kBasinResolution = 1e-6;
int count_basins(std::vector<double> costs, double resolution = kBasinResolution);

// k refinements from init + N(0, sigma^2) angle perturbations (seeded).
RefineResult multistart(const TorusGrid& target_grid, const CircuitSpec& init, int k, double sigma,
                        std::uint64_t seed, const RefineOptions& opts = {});

struct PipelineOptions {
  bool lenient = false;  // peel leniently instead of raising CRC errors
  double warm_margin = 1e-3;  // lenient: peel target rescaled to sup <= 1 - warm_margin
  int restarts = 0;      // 0 = single refinement from the peel angles
  double sigma = M_PI / 4;
  std::uint64_t seed = 1;
  RefineOptions refine;
  PeelOptions peel;
};

struct PipelineResult {
  SOSDecomposition sos;
  AngleFindResult peel;
  CircuitSpec spec;
  OptimizeReport report;
  double roundtrip_error = 0.0;
};

// Peels the projection of target onto the schedule window against an SOS
// complement of 1 - |P|^2 (unless complements are given), then refines the
// angles against the full target. Off-manifold targets need opts.lenient.
PipelineResult angles_pipeline(const BiLaurent& target, const Schedule& schedule,
                               const std::vector<BiLaurent>& complements, const PipelineOptions& opts);

}  // namespace mqsp
