#pragma once

#include "bilaurent.hpp"
#include "mqsp_circuit.hpp"

namespace mqsp {

struct DysonParams {
  double alphaRT = 0.0;
  double betaIT = 0.0;
  int r = 1;
  int M = 0;
  int dR_seg = 0;
  double delta = 1e-6;
  int N1 = 64;
  int N2 = 64;
  // Divide by max(1, grid sup of the unregularized product) so the sup
  // invariant holds even when the Jacobi-Anger tails exceed modulus 1.
  bool normalize_sup = false;

  void validate() const;
};

struct DysonTarget {
  BiLaurent P_delta;      // Laurent window [-r dR_seg, r dR_seg] x [-r M, r M]
  Schedule schedule;     // r blocks of 2 dR_seg R queries then 2 M I queries
  double lambda = 1.0;    // mu^r
  double zero_locus_deficit = 0.0;
  double sup_norm = 0.0;
  double sup_rescale = 1.0;
  int dR = 0;             // Laurent half-widths
  int dI = 0;
  int analytic_dR = 0;    // window after shifting into [0, .]
  int analytic_dI = 0;
  int stated_dI = 0;      // single-segment Taylor budget M

  // P_delta shifted by (dR, dI) into the analytic window.
  BiLaurent analytic() const;
};

// sum_{|n|<=d} (-i)^{|n|} J_{|n|}(tau) z1^n
BiLaurent frame_block(double tau, int d);
// sum_{m<=M} (c cos theta2)^m / m! in the z2 Laurent basis
BiLaurent taylor_block(double c, int M);
DysonTarget build_dyson_target(const DysonParams& params);
// e^{-i aT cos theta1} e^{bT (cos theta2 - 1)}
TorusGrid target_grid_exact(double alphaRT, double betaIT, int N1, int N2);
Schedule dyson_schedule(const DysonParams& params);

struct ErrorBudget {
  double quadrature = 0.0;
  double taylor = 0.0;
  double total = 0.0;
};

// Budget in terms of alpha_R, beta_I and T separately (alphaRT, betaIT in params are ignored).
ErrorBudget error_budget(double alpha_R, double beta_I, double T, int r, int M, double C_mag = 1.0);
ErrorBudget error_budget(const DysonParams& params, double T, double C_mag = 1.0);

}  // namespace mqsp
