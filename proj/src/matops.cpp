// Copyright 2025 The mqsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "matops.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "error.hpp"

namespace mqsp {

namespace {

constexpr cplx kI(0.0, 1.0);

void require_square(const Mat& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << A.rows() << "x" << A.cols();
    throw Error(ErrorKind::Validation, os.str());
  }
}

}  // namespace

double max_abs_entry(const Mat& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

double hermitian_defect(const Mat& A) {
  return max_abs_entry(A - A.adjoint());
}

bool all_finite(const Mat& A) {
  for (Eigen::Index k = 0; k < A.size(); ++k) {
    if (!std::isfinite(A.data()[k].real()) || !std::isfinite(A.data()[k].imag())) return false;
  }
  return true;
}

double operator_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

EigenDecomp hermitian_eigendecompose(const Mat& H) {
  require_square(H, "hermitian_eigendecompose");
  const double scale = max_abs_entry(H);
  const double asym = hermitian_defect(H);
  if (asym > 1e-12 * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max asymmetry " << asym;
    throw Error(ErrorKind::Validation, os.str(), asym);
  }
  Mat sym = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Instability, "Hermitian eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat matrix_exponential(const Mat& A) {
  require_square(A, "matrix_exponential");
  return A.exp();
}

HamiltonianPair HamiltonianPair::make(const Mat& H_R, const Mat& H_I, std::string label) {
  require_square(H_R, "H_R");
  require_square(H_I, "H_I");
  if (H_R.rows() != H_I.rows()) {
    throw Error(ErrorKind::Validation, "H_R and H_I dimensions differ");
  }
  if (!all_finite(H_R) || !all_finite(H_I)) {
    throw Error(ErrorKind::Validation, "Hamiltonian has non-finite entries");
  }
  HamiltonianPair p;
  const double nr = max_abs_entry(H_R);
  const double ni = max_abs_entry(H_I);
  const double ar = hermitian_defect(H_R);
  const double ai = hermitian_defect(H_I);
  if (ar > 1e-12 * std::max(nr, 1e-300)) {
    throw Error(ErrorKind::Validation, "H_R is not Hermitian: max asymmetry " + std::to_string(ar), ar);
  }
  if (ai > 1e-12 * std::max(ni, 1e-300)) {
    throw Error(ErrorKind::Validation, "H_I is not Hermitian: max asymmetry " + std::to_string(ai), ai);
  }
  p.H_R = 0.5 * (H_R + H_R.adjoint());
  p.H_I = 0.5 * (H_I + H_I.adjoint());
  const auto er = hermitian_eigendecompose(p.H_R);
  const auto ei = hermitian_eigendecompose(p.H_I);
  p.alpha_R = std::max(std::abs(er.values(0)), std::abs(er.values(er.values.size() - 1)));
  const double lo = ei.values(0);
  const double hi = ei.values(ei.values.size() - 1);
  const double bnorm = std::max(std::abs(lo), std::abs(hi));
  if (lo < -1e-12 * std::max(bnorm, 1e-300)) {
    std::ostringstream os;
    os << "H_I is not positive semidefinite: min eigenvalue " << lo;
    throw Error(ErrorKind::Validation, os.str(), lo);
  }
  p.beta_I = bnorm;
  p.label = std::move(label);
  return p;
}

OperatorNorms operator_norms(const HamiltonianPair& pair) {
  const auto er = hermitian_eigendecompose(pair.H_R);
  const auto ei = hermitian_eigendecompose(pair.H_I);
  OperatorNorms n;
  n.alpha_R = std::max(std::abs(er.values(0)), std::abs(er.values(er.values.size() - 1)));
  n.beta_I = std::max(std::abs(ei.values(0)), std::abs(ei.values(ei.values.size() - 1)));
  // Hermitian part of -i H_eff is H_I.
  n.numerical_abscissa = ei.values(ei.values.size() - 1);
  return n;
}

Mat exact_propagator(const HamiltonianPair& pair, double T) {
  if (T < 0.0) throw Error(ErrorKind::Validation, "T must be nonnegative");
  Mat gen = (-kI * pair.H_R + pair.H_I) * T;
  return matrix_exponential(gen);
}

InteractionFrame::InteractionFrame(const HamiltonianPair& pair) {
  const auto e = hermitian_eigendecompose(pair.H_R);
  lambda_ = e.values;
  basis_ = e.vectors;
  hi_eig_ = basis_.adjoint() * pair.H_I * basis_;
}

Mat InteractionFrame::htilde_eigenbasis(double t) const {
  const Eigen::Index n = lambda_.size();
  Mat out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      out(a, b) = std::exp(kI * ((lambda_(a) - lambda_(b)) * t)) * hi_eig_(a, b);
    }
  }
  return out;
}

Mat InteractionFrame::htilde(double t) const {
  return basis_ * htilde_eigenbasis(t) * basis_.adjoint();
}

Mat InteractionFrame::free_evolution(double t) const {
  Vec phases(lambda_.size());
  for (Eigen::Index a = 0; a < lambda_.size(); ++a) phases(a) = std::exp(-kI * (lambda_(a) * t));
  return basis_ * phases.asDiagonal() * basis_.adjoint();
}

Mat interaction_propagator(const HamiltonianPair& pair, double T, int steps) {
  if (steps < 1) throw Error(ErrorKind::Validation, "steps must be >= 1");
  if (T < 0.0) throw Error(ErrorKind::Validation, "T must be nonnegative");
  InteractionFrame frame(pair);
  const int n = pair.dim();
  const double h = T / steps;
  Mat V = Mat::Identity(n, n);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Mat A0 = frame.htilde_eigenbasis(t);
    const Mat Am = frame.htilde_eigenbasis(t + 0.5 * h);
    const Mat A1 = frame.htilde_eigenbasis(t + h);
    const Mat k1 = A0 * V;
    const Mat k2 = Am * (V + 0.5 * h * k1);
    const Mat k3 = Am * (V + 0.5 * h * k2);
    const Mat k4 = A1 * (V + h * k3);
    V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return frame.basis() * V * frame.basis().adjoint();
}

HamiltonianPair lindblad_benchmark_pair(double J, double h, double gamma) {
  Mat X(2, 2), Z(2, 2), I2 = Mat::Identity(2, 2), sm(2, 2);
  X << 0, 1, 1, 0;
  Z << 1, 0, 0, -1;
  // sigma^- : |1> -> |0>
  sm << 0, 1, 0, 0;
  auto kron = [](const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  Mat HR = J * kron(Z, Z) + h * (kron(X, I2) + kron(I2, X));
  Mat L1 = kron(sm, I2);
  Mat L2 = kron(I2, sm);
  Mat HI = 0.5 * gamma * (L1.adjoint() * L1 + L2.adjoint() * L2);
  return HamiltonianPair::make(HR, HI, "lindblad-2q");
}

Mat random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (A + A.adjoint());
}

Mat random_psd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
  return A * A.adjoint();
}

HamiltonianPair random_pair(int n, double alpha, double beta, std::mt19937_64& rng) {
  Mat hr = random_hermitian(n, rng);
  Mat hi = random_psd(n, rng);
  const double nr = operator_norm(hr);
  const double ni = operator_norm(hi);
  if (nr > 0) hr *= alpha / nr;
  if (ni > 0) hi *= beta / ni;
  return HamiltonianPair::make(hr, hi, "random");
}

Vec random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace mqsp
