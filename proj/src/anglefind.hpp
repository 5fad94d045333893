#pragma once

#include <vector>

#include "bilaurent.hpp"
#include "dyson_target.hpp"
#include "mqsp_circuit.hpp"

namespace mqsp {

struct PeelOptions {
  // CRC tolerance is crc_tol * kappa_running.
  double crc_tol = 1e-8;
  // Norm-identity drift allowed is drift_tol * kappa_running.
  double drift_tol = 1e-6;
  // Lenient mode never raises CRC or drift errors and truncates out-of-window
  // rows; used to warm-start refinement on off-manifold targets.
  bool lenient = false;
  bool reorthogonalize = false;
  // Median of pointwise slice ratios instead of the least-squares ratio.
  bool median_ratio = false;
  // Check |P|^2 + sum |Q_l|^2 = 1 on a grid before peeling.
  bool check_precondition = true;
};

struct PeelState {
  BiLaurent P;
  std::vector<BiLaurent> complements;
  Schedule remaining;
  double kappa_running = 1.0;
  double drift = 0.0;  // accumulated norm-identity tolerance
  std::vector<Angle> angles_so_far;
  int last_active = -1;  // complement rotated by the most recent peel step
};

struct PeelTraceRow {
  int step = 0;
  int var = 0;  // 1 = R, 2 = I, 0 = base rotation
  double theta = 0.0;
  double phi = 0.0;
  double deviation = 0.0;
  double kappa = 1.0;
};

struct CrcRatio {
  cplx rho;
  double deviation = 0.0;  // ||Q - rho P|| / ||P|| over the leading slices
  int ops = 0;             // coefficient reads spent on the estimate
};

// Ratio of the leading slices of P and Q in var. Throws CrcViolation when
// the deviation reaches tol.
CrcRatio crc_ratio(const BiLaurent& P, const BiLaurent& Q, int var, double tol, bool median = false);

struct PeelStepResult {
  double theta = 0.0;
  double phi = 0.0;
  double deviation = 0.0;
  int ratio_ops = 0;
  long update_ops = 0;
  bool edge_case = false;
  bool fallback = false;  // block ratio rejected, recursive estimate used
};

// Peels the outermost query of state.remaining in place.
PeelStepResult peel_step(PeelState& state, const PeelOptions& opts = {});

struct AngleFindResult {
  CircuitSpec spec;
  double kappa_total = 1.0;
  double max_deviation = 0.0;
  double drift = 0.0;
  std::vector<PeelTraceRow> trace;
  long ratio_ops = 0;
  long update_ops = 0;
  bool fallback_used = false;
};

AngleFindResult recursive_angle_find(const BiLaurent& P, const std::vector<BiLaurent>& complements,
                                     const Schedule& schedule, const PeelOptions& opts = {});

// Same peel chain with an O(1) ratio read from one corner coefficient of the
// leading slices, cross-checked against a second index. Steps failing the
// check fall back to the recursive estimate and set fallback_used.
AngleFindResult block_peel(const BiLaurent& P, const std::vector<BiLaurent>& complements,
                           const Schedule& schedule, const PeelOptions& opts = {});
AngleFindResult block_peel(const DysonTarget& target, const std::vector<BiLaurent>& complements,
                           const PeelOptions& opts = {});

// ||grid(circuit P) - grid(target P)||_F / ||grid(target P)||_F
double roundtrip_verify(const BiLaurent& target_P, const CircuitSpec& spec, int N1, int N2);

}  // namespace mqsp
