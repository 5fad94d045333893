#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bilaurent.hpp"
#include "matops.hpp"

namespace mqsp {

using Mat2 = Eigen::Matrix2cd;

// Query order over {R, I}; R queries z1, I queries z2.
struct Schedule {
  std::string entries;

  static Schedule parse(const std::string& s);
  // r blocks of (nR/r R's then nI/r I's), remainders spread over the first blocks.
  static Schedule blocks(int dR, int dI, int r);
  int size() const { return static_cast<int>(entries.size()); }
  int dR() const;
  int dI() const;
  int var(int j) const { return entries[static_cast<std::size_t>(j)] == 'R' ? 1 : 2; }
};

struct Angle {
  double theta = 0.0;
  double phi = 0.0;
};

struct CircuitSpec {
  Schedule schedule;
  std::vector<Angle> angles;  // schedule.size() + 1 entries

  void validate() const;
  std::vector<double> flatten() const;  // (theta_0, phi_0, theta_1, ...)
  static CircuitSpec unflatten(const Schedule& s, const std::vector<double>& x);
};

Mat2 rotation_matrix(double theta, double phi);

// First column (P, Q) of G = R_0 prod_j diag(z_{s(j)}, 1) R_j at one torus point.
std::pair<cplx, cplx> circuit_column(const CircuitSpec& spec, cplx z1, cplx z2);

struct CircuitGrids {
  TorusGrid P;
  TorusGrid Q;
};

CircuitGrids evaluate_circuit_grid(const CircuitSpec& spec, int N1, int N2);
double unitarity_defect(const CircuitGrids& g);

struct CircuitPolys {
  BiLaurent P;
  BiLaurent Q;
};

// Exact coefficient recursion; windows [0, dR] x [0, dI].
CircuitPolys circuit_polynomials(const CircuitSpec& spec);

// (1 - delta)^2 ||V(T) psi0||^2 / e^{2 beta_I T}
double success_probability(const CircuitSpec& spec, const HamiltonianPair& pair, double T,
                           const Vec& psi0, double delta, int steps = 4096);

// W = (2 Pi - I) U with U the one-ancilla block encoding of H/alpha.
Mat build_walk_operator(const Mat& H, double alpha);

// theta uniform in [theta_lo, theta_hi], phi uniform in (-pi, pi].
CircuitSpec random_circuit(const Schedule& s, std::mt19937_64& rng, double theta_lo = 0.1,
                           double theta_hi = 1.4);

}  // namespace mqsp
