#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "matops.hpp"

using namespace mqsp;

namespace {

// Scaling and squaring around a long Taylor sum; independent of the library path.
Mat taylor_expm(const Mat& A) {
  const double n = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (std::ldexp(n, -s) > 0.25) ++s;
  const Mat B = A / std::ldexp(1.0, s);
  Mat term = Mat::Identity(A.rows(), A.cols());
  Mat sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

Mat diag2(cplx a, cplx b) {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

}  // namespace

TEST_CASE("hermitian_eigendecompose examples") {
  auto e = hermitian_eigendecompose(Mat::Identity(2, 2));
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(1.0));

  auto z = hermitian_eigendecompose(diag2(1.0, -1.0));
  CHECK(z.values(0) == doctest::Approx(-1.0));
  CHECK(z.values(1) == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat H = random_hermitian(4, rng);
    auto d = hermitian_eigendecompose(H);
    const Mat rec = d.vectors * d.values.cast<cplx>().asDiagonal() * d.vectors.adjoint();
    CHECK((rec - H).norm() < 1e-11);
    CHECK((d.vectors.adjoint() * d.vectors - Mat::Identity(4, 4)).norm() < 1e-12);
  }
}

TEST_CASE("hermitian_eigendecompose rejects non-Hermitian input") {
  Mat A = Mat::Zero(2, 2);
  A(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigendecompose(A), Error);
}

TEST_CASE("matrix_exponential examples") {
  CHECK((matrix_exponential(Mat::Zero(3, 3)) - Mat::Identity(3, 3)).norm() < 1e-15);
  const Mat D = matrix_exponential(diag2(1.0, 2.0));
  CHECK(std::abs(D(0, 0) - std::exp(1.0)) < 1e-13);
  CHECK(std::abs(D(1, 1) - std::exp(2.0)) < 1e-12);
  CHECK(std::abs(D(0, 1)) < 1e-15);
  Mat N = Mat::Zero(2, 2);
  N(0, 1) = 1.0;
  CHECK((matrix_exponential(N) - (Mat::Identity(2, 2) + N)).norm() < 1e-15);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Mat A = Mat::Random(5, 5);
    const Mat ref = taylor_expm(A);
    CHECK((matrix_exponential(A) - ref).norm() / ref.norm() < 1e-12);
  }
}

TEST_CASE("exact_propagator examples") {
  std::mt19937_64 rng(3);
  const Mat hr = random_hermitian(3, rng);
  auto unitary = HamiltonianPair::make(hr, Mat::Zero(3, 3));
  const Mat U = exact_propagator(unitary, 1.3);
  CHECK((U.adjoint() * U - Mat::Identity(3, 3)).norm() < 1e-12);
  CHECK(operator_norm(U) == doctest::Approx(1.0).epsilon(1e-12));

  const double beta = 0.7, T = 1.5;
  auto diag = HamiltonianPair::make(Mat::Zero(2, 2), diag2(0.0, beta));
  const Mat D = exact_propagator(diag, T);
  CHECK(std::abs(D(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(D(1, 1) - std::exp(beta * T)) < 1e-12);

  auto lb = lindblad_benchmark_pair(1.0, 0.5, 0.3);
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    CHECK(operator_norm(exact_propagator(lb, t)) <= std::exp(lb.beta_I * t) * (1 + 1e-12));
  }
}

TEST_CASE("interaction_propagator examples") {
  std::mt19937_64 rng(5);
  const Mat hr = random_hermitian(3, rng);
  auto pure = HamiltonianPair::make(hr, Mat::Zero(3, 3));
  CHECK((interaction_propagator(pure, 1.0, 64) - Mat::Identity(3, 3)).norm() < 1e-14);

  // Commuting pair: both diagonal, so H~ = H_I.
  Mat HR = Mat::Zero(3, 3), HI = Mat::Zero(3, 3);
  HR(0, 0) = 1.0; HR(1, 1) = -0.5; HR(2, 2) = 2.0;
  HI(0, 0) = 0.1; HI(1, 1) = 0.4; HI(2, 2) = 0.0;
  auto comm = HamiltonianPair::make(HR, HI);
  CHECK((interaction_propagator(comm, 1.2, 256) - taylor_expm(HI * 1.2)).norm() < 1e-12);

  // e^{-i H_eff T} = e^{-i H_R T} V(T)
  for (int trial = 0; trial < 4; ++trial) {
    auto p = random_pair(4, 1.0, 0.5, rng);
    InteractionFrame frame(p);
    const Mat lhs = exact_propagator(p, 1.0);
    const Mat rhs = frame.free_evolution(1.0) * interaction_propagator(p, 1.0, 4096);
    CHECK((lhs - rhs).norm() < 1e-8);
  }
}

TEST_CASE("interaction frame is the conjugated dissipator") {
  std::mt19937_64 rng(9);
  auto p = random_pair(4, 1.3, 0.6, rng);
  InteractionFrame frame(p);
  for (double t : {0.0, 0.3, 1.7}) {
    const Mat U = taylor_expm(cplx(0, 1) * p.H_R * t);
    const Mat ref = U * p.H_I * U.adjoint();
    CHECK((frame.htilde(t) - ref).norm() < 1e-11);
    CHECK(operator_norm(frame.htilde(t)) == doctest::Approx(p.beta_I).epsilon(1e-10));
  }
}

TEST_CASE("operator_norms examples") {
  auto p = HamiltonianPair::make(Mat::Zero(2, 2), diag2(0.0, 0.5));
  CHECK(operator_norms(p).beta_I == doctest::Approx(0.5));
  CHECK(operator_norms(p).numerical_abscissa == doctest::Approx(0.5));

  std::mt19937_64 rng(2);
  auto u = HamiltonianPair::make(random_hermitian(3, rng), Mat::Zero(3, 3));
  CHECK(std::abs(operator_norms(u).numerical_abscissa) < 1e-15);

  // Sum of L^dag L for amplitude damping on two qubits is diag(0, 1, 1, 2).
  const double gamma = 0.3;
  auto lb = lindblad_benchmark_pair(1.0, 0.5, gamma);
  CHECK(lb.beta_I == doctest::Approx(0.5 * gamma * 2.0).epsilon(1e-12));
  CHECK(lb.alpha_R == doctest::Approx(operator_norm(lb.H_R)).epsilon(1e-12));
  CHECK(lb.dim() == 4);
}

TEST_CASE("HamiltonianPair::make validation") {
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(HamiltonianPair::make(bad, Mat::Zero(2, 2)), Error);
  CHECK_THROWS_AS(HamiltonianPair::make(Mat::Zero(2, 2), diag2(-1.0, 0.0)), Error);
  CHECK_THROWS_AS(HamiltonianPair::make(Mat::Zero(2, 2), Mat::Zero(3, 3)), Error);
  Mat nan = Mat::Zero(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(HamiltonianPair::make(nan, Mat::Zero(2, 2)), Error);
}

TEST_CASE("random generators honour requested norms") {
  std::mt19937_64 rng(13);
  auto p = random_pair(5, 2.0, 0.75, rng);
  CHECK(p.alpha_R == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(p.beta_I == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(hermitian_eigendecompose(p.H_I).values(0) >= -1e-12);
  CHECK(random_state(5, rng).norm() == doctest::Approx(1.0));
}
