#pragma once

#include <complex>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace mqsp {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct EigenDecomp {
  Eigen::VectorXd values;  // ascending
  Mat vectors;             // columns are eigenvectors
};

// Throws ErrorKind::Validation naming the max asymmetry when H is not
// Hermitian to 1e-12 relative.
EigenDecomp hermitian_eigendecompose(const Mat& H);

Mat matrix_exponential(const Mat& A);

double operator_norm(const Mat& A);
double max_abs_entry(const Mat& A);
double hermitian_defect(const Mat& A);
bool all_finite(const Mat& A);

struct OperatorNorms {
  double alpha_R = 0.0;
  double beta_I = 0.0;
  double numerical_abscissa = 0.0;
};

struct HamiltonianPair {
  Mat H_R;
  Mat H_I;
  double alpha_R = 0.0;
  double beta_I = 0.0;
  std::string label;

  // Validates, symmetrizes and recomputes the norms.
  static HamiltonianPair make(const Mat& H_R, const Mat& H_I, std::string label = "");
  int dim() const { return static_cast<int>(H_R.rows()); }
};

OperatorNorms operator_norms(const HamiltonianPair& pair);

// e^{-i(H_R + i H_I) T}
Mat exact_propagator(const HamiltonianPair& pair, double T);

// H_R eigenbasis cache for the rotating frame H~(t) = e^{iH_R t} H_I e^{-iH_R t}.
class InteractionFrame {
 public:
  explicit InteractionFrame(const HamiltonianPair& pair);

  Mat htilde(double t) const;
  // e^{-i H_R t}
  Mat free_evolution(double t) const;
  // H~(t) expressed in the H_R eigenbasis
  Mat htilde_eigenbasis(double t) const;
  const Mat& basis() const { return basis_; }

 private:
  Eigen::VectorXd lambda_;
  Mat basis_;
  Mat hi_eig_;
};

// V(T) with V' = H~(t) V, V(0) = I, by uniform-step RK4.
Mat interaction_propagator(const HamiltonianPair& pair, double T, int steps = 4096);

// Two-qubit benchmark: H_R = J ZZ + h (XI + IX), amplitude damping on both
// qubits, H_I = (gamma/2) sum_k L_k^dag L_k (PSD convention).
HamiltonianPair lindblad_benchmark_pair(double J = 1.0, double h = 0.5, double gamma = 0.3);

Mat random_hermitian(int n, std::mt19937_64& rng);
Mat random_psd(int n, std::mt19937_64& rng);
// H_R scaled to norm alpha, H_I PSD scaled to norm beta.
HamiltonianPair random_pair(int n, double alpha, double beta, std::mt19937_64& rng);
Vec random_state(int n, std::mt19937_64& rng);

}  // namespace mqsp
