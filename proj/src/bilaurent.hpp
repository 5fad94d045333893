#pragma once

#include <complex>
#include <vector>

namespace mqsp {

using cplx = std::complex<double>;

struct Window {
  int lo = 0;
  int hi = 0;
  int span() const { return hi - lo + 1; }
  bool contains(int k) const { return k >= lo && k <= hi; }
  bool operator==(const Window&) const = default;
};

// Bivariate Laurent polynomial sum_{m,n} c_{mn} z1^m z2^n over an index
// window. Coefficients are stored row-major: m outer, n inner.
class BiLaurent {
 public:
  BiLaurent();
  BiLaurent(Window w1, Window w2);
  BiLaurent(Window w1, Window w2, std::vector<cplx> coeffs);

  static BiLaurent constant(cplx c);
  static BiLaurent monomial(int m, int n, cplx c = 1.0);

  const Window& window1() const { return w1_; }
  const Window& window2() const { return w2_; }
  const Window& window(int var) const { return var == 1 ? w1_ : w2_; }

  cplx coeff(int m, int n) const;
  cplx& at(int m, int n);
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<cplx>& coeffs() { return c_; }

  // Zeroes coefficients with |c| < tol; the window is left as is.
  BiLaurent& prune(double tol = 1e-14);
  // Smallest window holding every coefficient with |c| > tol.
  BiLaurent trimmed(double tol = 0.0) const;
  // Copy into another window; coefficients outside it are dropped.
  BiLaurent rewindowed(Window w1, Window w2) const;
  // Largest |c| outside (w1, w2).
  double mass_outside(Window w1, Window w2) const;

  double coeff_norm2() const;
  double max_abs_coeff() const;
  // conj(P) on the torus: c'_{mn} = conj(c_{-m,-n}).
  BiLaurent conj_reflect() const;
  cplx eval(double theta1, double theta2) const;
  // Max |c_{mn} - conj(c_{-m,-n})|; zero iff P is real on the torus.
  double real_defect() const;

  BiLaurent& operator+=(const BiLaurent& o);
  BiLaurent& operator-=(const BiLaurent& o);
  BiLaurent& operator*=(cplx s);

 private:
  std::size_t index(int m, int n) const;
  Window w1_, w2_;
  std::vector<cplx> c_;
};

BiLaurent operator+(BiLaurent a, const BiLaurent& b);
BiLaurent operator-(BiLaurent a, const BiLaurent& b);
BiLaurent operator*(cplx s, BiLaurent a);

struct Laurent1 {
  int lo = 0;
  std::vector<cplx> c;
  int hi() const { return lo + static_cast<int>(c.size()) - 1; }
  cplx eval(double theta) const;
  double norm2() const;
};

struct TorusGrid {
  int N1 = 0;
  int N2 = 0;
  std::vector<cplx> values;  // row-major, theta1 index outer

  TorusGrid() = default;
  TorusGrid(int n1, int n2) : N1(n1), N2(n2), values(static_cast<std::size_t>(n1) * n2) {}
  cplx& operator()(int j, int k) { return values[static_cast<std::size_t>(j) * N2 + k]; }
  cplx operator()(int j, int k) const { return values[static_cast<std::size_t>(j) * N2 + k]; }
};

TorusGrid evaluate_grid(const BiLaurent& P, int N1, int N2);
// Direct double sum; O(N1 N2 span1 span2). Reference evaluator.
TorusGrid evaluate_grid_direct(const BiLaurent& P, int N1, int N2);
BiLaurent coefficients_from_grid(const TorusGrid& G, Window w1, Window w2, double leak_tol = 1e-10);

BiLaurent multiply(const BiLaurent& P, const BiLaurent& Q);
// |P|^2 = P * conj_reflect(P)
BiLaurent abs_squared(const BiLaurent& P);
Laurent1 leading_slice(const BiLaurent& P, int var);
// Coefficients of P at index k of var, as a polynomial in the other variable.
Laurent1 slice(const BiLaurent& P, int var, int k);
BiLaurent monomial_shift(const BiLaurent& P, int p1, int p2);

// Max |P| over an N1 x N2 grid, which must oversample each window span 4x.
// A grid maximum, so a lower bound on the true sup.
double sup_norm(const BiLaurent& P, int N1, int N2);
double sup_norm(const BiLaurent& P);

double grid_max_abs_diff(const TorusGrid& a, const TorusGrid& b);
double grid_mean_abs2(const TorusGrid& a);

}  // namespace mqsp
