#include "bilaurent.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "error.hpp"

namespace mqsp {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

void fft2(std::vector<cplx>& data, int N1, int N2, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(N1, N2, ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

BiLaurent::BiLaurent() : BiLaurent(Window{0, 0}, Window{0, 0}) {}

BiLaurent::BiLaurent(Window w1, Window w2) : w1_(w1), w2_(w2) {
  if (w1.lo > w1.hi || w2.lo > w2.hi) {
    throw Error(ErrorKind::Validation, "window must satisfy lo <= hi");
  }
  c_.assign(static_cast<std::size_t>(w1.span()) * w2.span(), cplx(0.0, 0.0));
}

BiLaurent::BiLaurent(Window w1, Window w2, std::vector<cplx> coeffs) : BiLaurent(w1, w2) {
  if (coeffs.size() != c_.size()) {
    std::ostringstream os;
    os << "coefficient count " << coeffs.size() << " does not match window size " << c_.size();
    throw Error(ErrorKind::Validation, os.str());
  }
  c_ = std::move(coeffs);
  prune();
}

BiLaurent BiLaurent::constant(cplx c) {
  BiLaurent p;
  p.c_[0] = c;
  return p;
}

BiLaurent BiLaurent::monomial(int m, int n, cplx c) {
  BiLaurent p(Window{m, m}, Window{n, n});
  p.c_[0] = c;
  return p;
}

std::size_t BiLaurent::index(int m, int n) const {
  return static_cast<std::size_t>(m - w1_.lo) * w2_.span() + (n - w2_.lo);
}

cplx BiLaurent::coeff(int m, int n) const {
  if (!w1_.contains(m) || !w2_.contains(n)) return {0.0, 0.0};
  return c_[index(m, n)];
}

cplx& BiLaurent::at(int m, int n) {
  if (!w1_.contains(m) || !w2_.contains(n)) {
    throw Error(ErrorKind::Validation, "coefficient index outside window");
  }
  return c_[index(m, n)];
}

BiLaurent& BiLaurent::prune(double tol) {
  for (auto& v : c_) {
    if (std::abs(v) < tol) v = 0.0;
  }
  return *this;
}

BiLaurent BiLaurent::trimmed(double tol) const {
  int m_lo = w1_.hi + 1, m_hi = w1_.lo - 1, n_lo = w2_.hi + 1, n_hi = w2_.lo - 1;
  for (int m = w1_.lo; m <= w1_.hi; ++m) {
    for (int n = w2_.lo; n <= w2_.hi; ++n) {
      if (std::abs(coeff(m, n)) > tol) {
        m_lo = std::min(m_lo, m);
        m_hi = std::max(m_hi, m);
        n_lo = std::min(n_lo, n);
        n_hi = std::max(n_hi, n);
      }
    }
  }
  if (m_lo > m_hi) return BiLaurent();
  return rewindowed(Window{m_lo, m_hi}, Window{n_lo, n_hi});
}

BiLaurent BiLaurent::rewindowed(Window w1, Window w2) const {
  BiLaurent out(w1, w2);
  for (int m = std::max(w1.lo, w1_.lo); m <= std::min(w1.hi, w1_.hi); ++m) {
    for (int n = std::max(w2.lo, w2_.lo); n <= std::min(w2.hi, w2_.hi); ++n) {
      out.at(m, n) = coeff(m, n);
    }
  }
  return out;
}

double BiLaurent::mass_outside(Window w1, Window w2) const {
  double worst = 0.0;
  for (int m = w1_.lo; m <= w1_.hi; ++m) {
    for (int n = w2_.lo; n <= w2_.hi; ++n) {
      if (!w1.contains(m) || !w2.contains(n)) worst = std::max(worst, std::abs(coeff(m, n)));
    }
  }
  return worst;
}

double BiLaurent::coeff_norm2() const {
  double s = 0.0;
  for (const auto& v : c_) s += std::norm(v);
  return s;
}

double BiLaurent::max_abs_coeff() const {
  double s = 0.0;
  for (const auto& v : c_) s = std::max(s, std::abs(v));
  return s;
}

BiLaurent BiLaurent::conj_reflect() const {
  BiLaurent out(Window{-w1_.hi, -w1_.lo}, Window{-w2_.hi, -w2_.lo});
  for (int m = w1_.lo; m <= w1_.hi; ++m)
    for (int n = w2_.lo; n <= w2_.hi; ++n) out.at(-m, -n) = std::conj(coeff(m, n));
  return out;
}

cplx BiLaurent::eval(double theta1, double theta2) const {
  cplx s(0.0, 0.0);
  for (int m = w1_.lo; m <= w1_.hi; ++m) {
    cplx row(0.0, 0.0);
    for (int n = w2_.lo; n <= w2_.hi; ++n) row += coeff(m, n) * std::polar(1.0, n * theta2);
    s += row * std::polar(1.0, m * theta1);
  }
  return s;
}

double BiLaurent::real_defect() const {
  double worst = 0.0;
  for (int m = std::min(w1_.lo, -w1_.hi); m <= std::max(w1_.hi, -w1_.lo); ++m)
    for (int n = std::min(w2_.lo, -w2_.hi); n <= std::max(w2_.hi, -w2_.lo); ++n)
      worst = std::max(worst, std::abs(coeff(m, n) - std::conj(coeff(-m, -n))));
  return worst;
}

BiLaurent& BiLaurent::operator+=(const BiLaurent& o) {
  Window w1{std::min(w1_.lo, o.w1_.lo), std::max(w1_.hi, o.w1_.hi)};
  Window w2{std::min(w2_.lo, o.w2_.lo), std::max(w2_.hi, o.w2_.hi)};
  BiLaurent out = rewindowed(w1, w2);
  for (int m = o.w1_.lo; m <= o.w1_.hi; ++m)
    for (int n = o.w2_.lo; n <= o.w2_.hi; ++n) out.at(m, n) += o.coeff(m, n);
  *this = std::move(out);
  return *this;
}

BiLaurent& BiLaurent::operator-=(const BiLaurent& o) {
  BiLaurent neg = o;
  neg *= -1.0;
  return *this += neg;
}

BiLaurent& BiLaurent::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  return *this;
}

BiLaurent operator+(BiLaurent a, const BiLaurent& b) { return a += b; }
BiLaurent operator-(BiLaurent a, const BiLaurent& b) { return a -= b; }
BiLaurent operator*(cplx s, BiLaurent a) { return a *= s; }

cplx Laurent1::eval(double theta) const {
  cplx s(0.0, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::polar(1.0, (lo + static_cast<int>(k)) * theta);
  return s;
}

double Laurent1::norm2() const {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

TorusGrid evaluate_grid(const BiLaurent& P, int N1, int N2) {
  const Window& w1 = P.window1();
  const Window& w2 = P.window2();
  if (N1 < w1.span() || N2 < w2.span()) {
    std::ostringstream os;
    os << "grid " << N1 << "x" << N2 << " aliases window spans " << w1.span() << "x" << w2.span();
    throw Error(ErrorKind::Validation, os.str());
  }
  TorusGrid g(N1, N2);
  for (int m = w1.lo; m <= w1.hi; ++m)
    for (int n = w2.lo; n <= w2.hi; ++n) g(mod(m, N1), mod(n, N2)) += P.coeff(m, n);
  fft2(g.values, N1, N2, FFTW_BACKWARD);
  return g;
}

TorusGrid evaluate_grid_direct(const BiLaurent& P, int N1, int N2) {
  TorusGrid g(N1, N2);
  for (int j = 0; j < N1; ++j)
    for (int k = 0; k < N2; ++k) g(j, k) = P.eval(2.0 * M_PI * j / N1, 2.0 * M_PI * k / N2);
  return g;
}

BiLaurent coefficients_from_grid(const TorusGrid& G, Window w1, Window w2, double leak_tol) {
  if (G.N1 < w1.span() || G.N2 < w2.span()) {
    throw Error(ErrorKind::Validation, "grid too small for requested window");
  }
  std::vector<cplx> data = G.values;
  fft2(data, G.N1, G.N2, FFTW_FORWARD);
  const double inv = 1.0 / (static_cast<double>(G.N1) * G.N2);
  double scale = 1.0;
  for (const auto& v : G.values) scale = std::max(scale, std::abs(v));
  BiLaurent out(w1, w2);
  double leak = 0.0;
  for (int a = 0; a < G.N1; ++a) {
    const int m = w1.lo + mod(a - w1.lo, G.N1);
    for (int b = 0; b < G.N2; ++b) {
      const int n = w2.lo + mod(b - w2.lo, G.N2);
      const cplx v = data[static_cast<std::size_t>(a) * G.N2 + b] * inv;
      if (m <= w1.hi && n <= w2.hi) {
        out.at(m, n) = v;
      } else {
        leak = std::max(leak, std::abs(v));
      }
    }
  }
  if (leak > leak_tol * scale) {
    std::ostringstream os;
    os << "degree overflow: out-of-window coefficient magnitude " << leak;
    throw Error(ErrorKind::DegreeOverflow, os.str(), leak);
  }
  out.prune();
  return out;
}

BiLaurent multiply(const BiLaurent& P, const BiLaurent& Q) {
  const Window& p1 = P.window1();
  const Window& p2 = P.window2();
  const Window& q1 = Q.window1();
  const Window& q2 = Q.window2();
  BiLaurent out(Window{p1.lo + q1.lo, p1.hi + q1.hi}, Window{p2.lo + q2.lo, p2.hi + q2.hi});
  for (int m = p1.lo; m <= p1.hi; ++m) {
    for (int n = p2.lo; n <= p2.hi; ++n) {
      const cplx a = P.coeff(m, n);
      if (a == cplx(0.0, 0.0)) continue;
      for (int k = q1.lo; k <= q1.hi; ++k)
        for (int l = q2.lo; l <= q2.hi; ++l) out.at(m + k, n + l) += a * Q.coeff(k, l);
    }
  }
  return out;
}

BiLaurent abs_squared(const BiLaurent& P) {
  return multiply(P, P.conj_reflect());
}

Laurent1 slice(const BiLaurent& P, int var, int k) {
  Laurent1 out;
  if (var == 1) {
    const Window& w = P.window2();
    out.lo = w.lo;
    for (int n = w.lo; n <= w.hi; ++n) out.c.push_back(P.coeff(k, n));
  } else if (var == 2) {
    const Window& w = P.window1();
    out.lo = w.lo;
    for (int m = w.lo; m <= w.hi; ++m) out.c.push_back(P.coeff(m, k));
  } else {
    throw Error(ErrorKind::Validation, "variable index must be 1 or 2");
  }
  return out;
}

Laurent1 leading_slice(const BiLaurent& P, int var) {
  if (var != 1 && var != 2) throw Error(ErrorKind::Validation, "variable index must be 1 or 2");
  return slice(P, var, P.window(var).hi);
}

BiLaurent monomial_shift(const BiLaurent& P, int p1, int p2) {
  const Window& w1 = P.window1();
  const Window& w2 = P.window2();
  BiLaurent out(Window{w1.lo + p1, w1.hi + p1}, Window{w2.lo + p2, w2.hi + p2});
  out.coeffs() = P.coeffs();
  return out;
}

double sup_norm(const BiLaurent& P, int N1, int N2) {
  if (N1 < 4 * P.window1().span() || N2 < 4 * P.window2().span()) {
    throw Error(ErrorKind::Validation, "sup_norm grid must oversample each window span 4x");
  }
  const TorusGrid g = evaluate_grid(P, N1, N2);
  double s = 0.0;
  for (const auto& v : g.values) s = std::max(s, std::abs(v));
  return s;
}

double sup_norm(const BiLaurent& P) {
  return sup_norm(P, std::max(8, 4 * P.window1().span()), std::max(8, 4 * P.window2().span()));
}

double grid_max_abs_diff(const TorusGrid& a, const TorusGrid& b) {
  if (a.N1 != b.N1 || a.N2 != b.N2) throw Error(ErrorKind::Validation, "grid shapes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s = std::max(s, std::abs(a.values[i] - b.values[i]));
  return s;
}

double grid_mean_abs2(const TorusGrid& a) {
  double s = 0.0;
  for (const auto& v : a.values) s += std::norm(v);
  return a.values.empty() ? 0.0 : s / static_cast<double>(a.values.size());
}

}  // namespace mqsp
