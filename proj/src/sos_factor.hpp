#pragma once

#include <string>
#include <vector>

#include "bilaurent.hpp"
#include "matops.hpp"

namespace mqsp {

// Rows/columns indexed by (m, n) in [0, d1] x [0, d2], flattened m * (d2 + 1) + n.
struct MomentMatrix {
  int d1 = 0;
  int d2 = 0;
  Mat M;
};

struct SOSDecomposition {
  std::vector<BiLaurent> terms;
  int L = 0;
  double residual = 0.0;   // max grid |H - sum |Q_l|^2|
  double tolerance = 0.0;  // declared bound on residual
  double regularization = 0.0;
  int iterations = 0;
  std::string method;
};

struct GramResult {
  Mat G;
  double min_eig = 0.0;
  double affine_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Symmetric degrees of a real trigonometric polynomial.
void real_degrees(const BiLaurent& H, int& d1, int& d2);
void require_real(const BiLaurent& H);

MomentMatrix moment_matrix(const BiLaurent& H);
// Lag-averaged Gram: G_{ab} = H_{a-b} / #{pairs with lag a-b}.
Mat averaged_gram(const BiLaurent& H, int d1, int d2);
// Alternating projections between {lag sums = H_k} and {G >= margin I}.
GramResult find_gram(const BiLaurent& H, int d1, int d2, double margin, int max_iters = 20000);
// Terms sqrt(lambda) v for eigenpairs above rank_tol * lambda_max.
std::vector<BiLaurent> gram_terms(const Mat& G, int d1, int d2, double rank_tol);

double sos_residual(const BiLaurent& H, const std::vector<BiLaurent>& terms);
double grid_min(const BiLaurent& H);
int numerical_rank(const Eigen::VectorXd& eigenvalues, double rel_tol = 1e-9);

SOSDecomposition sos_from_moment(const BiLaurent& H, double tol = 1e-9);
// Best-effort terms from a PSD-clipped Gram after max_iters projections. The
// residual is reported, not bounded; meant for warm starts when H nearly
// touches zero and no exact certificate is found.
SOSDecomposition approximate_sos(const BiLaurent& H, int max_iters = 2000);

struct FejerRieszOptions {
  int max_iters = 200000;
  double tol = 1e-12;
};

// which_var indexes the matrix blocks; L <= d_{which_var} + 1.
SOSDecomposition matrix_fejer_riesz(const BiLaurent& H, int which_var, const FejerRieszOptions& opts = {});
// Picks the smaller-degree variable for the blocks.
SOSDecomposition matrix_fejer_riesz(const BiLaurent& H);

// Terms {sqrt(2 delta - delta^2), (1 - delta) Q}; P_delta = (1 - delta) P_circuit.
SOSDecomposition rank2_complement(const BiLaurent& P_delta, const BiLaurent& Q_circuit, double delta);

struct FeasibilityResult {
  bool feasible = false;
  int moment_rank = 0;
  double rank1_residual = 0.0;  // ||autocorr(q) - H||_2 / ||H||_2 at the best start
  BiLaurent factor;
};

FeasibilityResult scalar_factorization_feasible(const BiLaurent& H, double tol = 1e-6);

}  // namespace mqsp
