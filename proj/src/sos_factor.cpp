#include "sos_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "error.hpp"
#include "lbfgs.hpp"

namespace mqsp {

namespace {

// Flattened (m, n) index pairs grouped by lag (m - m', n - n').
struct LagTable {
  int d1, d2, N, nlag;
  std::vector<int> lag;    // N*N, lag id of (a, b)
  std::vector<int> count;  // per lag id

  LagTable(int d1_, int d2_) : d1(d1_), d2(d2_), N((d1_ + 1) * (d2_ + 1)), nlag((2 * d1_ + 1) * (2 * d2_ + 1)) {
    lag.resize(static_cast<std::size_t>(N) * N);
    count.assign(static_cast<std::size_t>(nlag), 0);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        const int id = id_of(a / (d2 + 1) - b / (d2 + 1), a % (d2 + 1) - b % (d2 + 1));
        lag[static_cast<std::size_t>(a) * N + b] = id;
        ++count[static_cast<std::size_t>(id)];
      }
  }
  int id_of(int dm, int dn) const { return (dm + d1) * (2 * d2 + 1) + (dn + d2); }
  int dm_of(int id) const { return id / (2 * d2 + 1) - d1; }
  int dn_of(int id) const { return id % (2 * d2 + 1) - d2; }
};

std::vector<cplx> lag_targets(const BiLaurent& H, const LagTable& t) {
  std::vector<cplx> h(static_cast<std::size_t>(t.nlag));
  for (int id = 0; id < t.nlag; ++id) h[static_cast<std::size_t>(id)] = H.coeff(t.dm_of(id), t.dn_of(id));
  return h;
}

// Returns the max lag-sum violation before projecting.
double project_affine(Mat& G, const LagTable& t, const std::vector<cplx>& h) {
  std::vector<cplx> sums(static_cast<std::size_t>(t.nlag), cplx(0.0, 0.0));
  for (int a = 0; a < t.N; ++a)
    for (int b = 0; b < t.N; ++b) sums[static_cast<std::size_t>(t.lag[static_cast<std::size_t>(a) * t.N + b])] += G(a, b);
  double worst = 0.0;
  for (int id = 0; id < t.nlag; ++id) {
    const std::size_t i = static_cast<std::size_t>(id);
    worst = std::max(worst, std::abs(sums[i] - h[i]));
    sums[i] = (h[i] - sums[i]) / static_cast<double>(t.count[i]);
  }
  for (int a = 0; a < t.N; ++a)
    for (int b = 0; b < t.N; ++b) G(a, b) += sums[static_cast<std::size_t>(t.lag[static_cast<std::size_t>(a) * t.N + b])];
  return worst;
}

BiLaurent vector_to_poly(const Vec& q, int d1, int d2) {
  BiLaurent out(Window{0, d1}, Window{0, d2});
  for (int m = 0; m <= d1; ++m)
    for (int n = 0; n <= d2; ++n) out.at(m, n) = q(m * (d2 + 1) + n);
  return out;
}

double coeff_scale(const BiLaurent& H) {
  return std::max(H.max_abs_coeff(), 1e-300);
}

}  // namespace

void require_real(const BiLaurent& H) {
  const double defect = H.real_defect();
  if (defect > 1e-10 * coeff_scale(H) + 1e-14) {
    std::ostringstream os;
    os << "polynomial is not real on the torus: coefficient asymmetry " << defect;
    throw Error(ErrorKind::Validation, os.str(), defect);
  }
}

void real_degrees(const BiLaurent& H, int& d1, int& d2) {
  const BiLaurent t = H.trimmed(0.0);
  d1 = std::max(std::abs(t.window1().lo), std::abs(t.window1().hi));
  d2 = std::max(std::abs(t.window2().lo), std::abs(t.window2().hi));
}

MomentMatrix moment_matrix(const BiLaurent& H) {
  require_real(H);
  MomentMatrix mm;
  real_degrees(H, mm.d1, mm.d2);
  const LagTable t(mm.d1, mm.d2);
  const auto h = lag_targets(H, t);
  mm.M.resize(t.N, t.N);
  for (int a = 0; a < t.N; ++a)
    for (int b = 0; b < t.N; ++b) mm.M(a, b) = h[static_cast<std::size_t>(t.lag[static_cast<std::size_t>(a) * t.N + b])];
  mm.M = 0.5 * (mm.M + mm.M.adjoint());
  return mm;
}

Mat averaged_gram(const BiLaurent& H, int d1, int d2) {
  const LagTable t(d1, d2);
  const auto h = lag_targets(H, t);
  Mat G(t.N, t.N);
  for (int a = 0; a < t.N; ++a)
    for (int b = 0; b < t.N; ++b) {
      const int id = t.lag[static_cast<std::size_t>(a) * t.N + b];
      G(a, b) = h[static_cast<std::size_t>(id)] / static_cast<double>(t.count[static_cast<std::size_t>(id)]);
    }
  return 0.5 * (G + G.adjoint());
}

GramResult find_gram(const BiLaurent& H, int d1, int d2, double margin, int max_iters) {
  const LagTable t(d1, d2);
  const auto h = lag_targets(H, t);
  GramResult r;
  r.G = averaged_gram(H, d1, d2);
  const double scale = coeff_scale(H);
  for (int it = 0; it <= max_iters; ++it) {
    Eigen::SelfAdjointEigenSolver<Mat> es(r.G);
    const Eigen::VectorXd& lam = es.eigenvalues();
    r.min_eig = lam(0);
    r.iterations = it;
    const double slack = 1e-13 * std::max(scale, lam(lam.size() - 1));
    if (lam(0) >= margin - slack) {
      if (lam(0) < margin) {
        Eigen::VectorXd clipped = lam.cwiseMax(margin);
        r.G = es.eigenvectors() * clipped.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
      }
      r.converged = true;
      break;
    }
    if (it == max_iters) break;
    Eigen::VectorXd clipped = lam.cwiseMax(margin);
    r.G = es.eigenvectors() * clipped.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    r.G = 0.5 * (r.G + r.G.adjoint());
    project_affine(r.G, t, h);
  }
  Mat probe = r.G;
  r.affine_residual = project_affine(probe, t, h);
  return r;
}

std::vector<BiLaurent> gram_terms(const Mat& G, int d1, int d2, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double top = lam(lam.size() - 1);
  std::vector<BiLaurent> terms;
  for (Eigen::Index k = lam.size() - 1; k >= 0; --k) {
    if (!(lam(k) > rank_tol * top) || lam(k) <= 0.0) break;
    terms.push_back(vector_to_poly(std::sqrt(lam(k)) * es.eigenvectors().col(k), d1, d2));
  }
  return terms;
}

double grid_min(const BiLaurent& H) {
  const int n1 = std::max(16, 4 * H.window1().span());
  const int n2 = std::max(16, 4 * H.window2().span());
  const TorusGrid g = evaluate_grid(H, n1, n2);
  double m = g.values[0].real();
  for (const auto& v : g.values) m = std::min(m, v.real());
  return m;
}

double sos_residual(const BiLaurent& H, const std::vector<BiLaurent>& terms) {
  BiLaurent acc = H;
  for (const auto& q : terms) acc -= abs_squared(q);
  const int n1 = std::max(64, 2 * acc.window1().span());
  const int n2 = std::max(64, 2 * acc.window2().span());
  const TorusGrid g = evaluate_grid(acc, n1, n2);
  double worst = 0.0;
  for (const auto& v : g.values) worst = std::max(worst, std::abs(v));
  return worst;
}

int numerical_rank(const Eigen::VectorXd& eigenvalues, double rel_tol) {
  if (eigenvalues.size() == 0) return 0;
  const double top = eigenvalues.cwiseAbs().maxCoeff();
  int r = 0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k)
    if (eigenvalues(k) > rel_tol * top) ++r;
  return r;
}

SOSDecomposition sos_from_moment(const BiLaurent& H, double tol) {
  require_real(H);
  int d1, d2;
  real_degrees(H, d1, d2);
  const double hnorm = coeff_scale(H);
  const double hmin = grid_min(H);
  if (hmin < -tol * hnorm) {
    std::ostringstream os;
    os << "H is indefinite: min grid value " << hmin;
    throw Error(ErrorKind::Indefinite, os.str(), hmin);
  }
  const int N = (d1 + 1) * (d2 + 1);
  // Interior margins converge in finitely many projections; fall back to the
  // PSD boundary when H touches zero.
  std::vector<double> margins;
  if (hmin > 0.0) {
    for (double m = hmin / (2.0 * N); m > 1e-6 * hmin / N; m /= 8.0) margins.push_back(m);
  }
  margins.push_back(0.0);
  GramResult gr;
  for (double m : margins) {
    gr = find_gram(H, d1, d2, m);
    if (gr.converged) break;
  }
  if (!gr.converged) {
    throw Error(ErrorKind::NotConverged, "no positive semidefinite Gram matrix found", gr.min_eig);
  }
  SOSDecomposition out;
  out.method = "gram-eigen";
  out.terms = gram_terms(gr.G, d1, d2, tol);
  out.L = static_cast<int>(out.terms.size());
  out.iterations = gr.iterations;
  out.residual = sos_residual(H, out.terms);
  out.tolerance = 1e-10 * hnorm;
  return out;
}

SOSDecomposition approximate_sos(const BiLaurent& H, int max_iters) {
  require_real(H);
  int d1, d2;
  real_degrees(H, d1, d2);
  const GramResult gr = find_gram(H, d1, d2, 0.0, max_iters);
  SOSDecomposition out;
  out.method = "gram-approx";
  out.terms = gram_terms(gr.G, d1, d2, 1e-12);
  out.L = static_cast<int>(out.terms.size());
  out.iterations = gr.iterations;
  out.residual = sos_residual(H, out.terms);
  out.tolerance = std::numeric_limits<double>::infinity();
  return out;
}

SOSDecomposition matrix_fejer_riesz(const BiLaurent& H) {
  int d1, d2;
  require_real(H);
  real_degrees(H, d1, d2);
  return matrix_fejer_riesz(H, d1 <= d2 ? 1 : 2);
}

SOSDecomposition matrix_fejer_riesz(const BiLaurent& H, int which_var, const FejerRieszOptions& opts) {
  if (which_var != 1 && which_var != 2) throw Error(ErrorKind::Validation, "which_var must be 1 or 2");
  require_real(H);
  int d1, d2;
  real_degrees(H, d1, d2);
  const double hnorm = coeff_scale(H);
  const double hmin = grid_min(H);
  if (hmin < -1e-12 * hnorm) {
    std::ostringstream os;
    os << "H is indefinite: min grid value " << hmin;
    throw Error(ErrorKind::Indefinite, os.str(), hmin);
  }
  SOSDecomposition out;
  out.method = "matrix-fejer-riesz";
  const double floor = 1e-10 * hnorm;
  BiLaurent Hr = H;
  if (hmin < floor) {
    out.regularization = floor - hmin;
    Hr += BiLaurent::constant(out.regularization);
  }
  const double hmin_r = std::max(hmin, 0.0) + out.regularization;
  const int N = (d1 + 1) * (d2 + 1);

  GramResult gr;
  for (double m = hmin_r / (2.0 * N); m >= 1e-4 * hmin_r / N; m /= 4.0) {
    gr = find_gram(Hr, d1, d2, m);
    if (gr.converged) break;
  }
  if (!gr.converged) {
    throw Error(ErrorKind::NotConverged, "no strictly positive Gram matrix found at this bidegree", gr.min_eig);
  }

  // Blocks indexed by the which_var degree, trigonometric in the other variable.
  const int p = (which_var == 1 ? d1 : d2) + 1;
  const int b = (which_var == 1 ? d2 : d1);
  auto flat = [&](int mw, int no) { return which_var == 1 ? mw * (d2 + 1) + no : no * (d2 + 1) + mw; };
  std::vector<Mat> C(static_cast<std::size_t>(2 * b + 1), Mat::Zero(p, p));
  for (int m = 0; m < p; ++m)
    for (int mp = 0; mp < p; ++mp)
      for (int n = 0; n <= b; ++n)
        for (int np = 0; np <= b; ++np) C[static_cast<std::size_t>(n - np + b)](m, mp) += gr.G(flat(m, n), flat(mp, np));
  auto Ck = [&](int k) -> const Mat& { return C[static_cast<std::size_t>(k + b)]; };

  // H(theta_o) = A(z_o) A(z_o)^*, A(z) = sum_s B_s z^s; columns become the terms.
  const double drop = 1e-13 * std::sqrt(hnorm);
  auto terms_of = [&](const std::vector<Mat>& blocks) {
    std::vector<BiLaurent> terms;
    for (int l = 0; l < p; ++l) {
      BiLaurent q(Window{0, d1}, Window{0, d2});
      for (int m = 0; m < p; ++m)
        for (int s = 0; s <= b; ++s) {
          const cplx v = blocks[static_cast<std::size_t>(s)](m, l);
          if (which_var == 1) q.at(m, s) = v;
          else q.at(s, m) = v;
        }
      if (std::sqrt(q.coeff_norm2()) > drop) terms.push_back(q);
    }
    return terms;
  };
  // Near-singular inputs converge slowly in the successive-change sense, so
  // the factor's own residual is checked every kResidualEvery rows.
  constexpr int kResidualEvery = 4096;
  const double accept = 0.1 * 1e-8 * hnorm;

  // Banded block-Toeplitz Cholesky, one block row at a time. rows[s] holds
  // the previous rows; row i stores blocks L_{i, i-s} for s = 0..b.
  std::vector<std::vector<Mat>> rows;
  std::vector<Mat> prev;
  double change = 0.0;
  int i = 0;
  bool converged = false;
  for (; i < opts.max_iters; ++i) {
    std::vector<Mat> row(static_cast<std::size_t>(b + 1), Mat::Zero(p, p));
    const int lo = std::max(0, i - b);
    for (int j = lo; j < i; ++j) {
      // L_{ij} = (C_{i-j} - sum_{l<j} L_{il} L_{jl}^*) L_{jj}^{-*}
      Mat R = Ck(i - j);
      const auto& rj = rows[rows.size() - static_cast<std::size_t>(i - j)];
      for (int l = std::max(lo, j - b); l < j; ++l) {
        R -= row[static_cast<std::size_t>(i - l)] * rj[static_cast<std::size_t>(j - l)].adjoint();
      }
      const Mat& Ljj = rj[0];
      row[static_cast<std::size_t>(i - j)] = Ljj.triangularView<Eigen::Lower>().solve(R.adjoint()).adjoint();
    }
    Mat D = Ck(0);
    for (int l = lo; l < i; ++l) D -= row[static_cast<std::size_t>(i - l)] * row[static_cast<std::size_t>(i - l)].adjoint();
    Eigen::LLT<Mat> llt(0.5 * (D + D.adjoint()));
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::Instability, "block Cholesky lost positive definiteness", static_cast<double>(i));
    }
    row[0] = llt.matrixL();
    if (i >= b && !prev.empty()) {
      change = 0.0;
      for (int s = 0; s <= b; ++s)
        change = std::max(change, max_abs_entry(row[static_cast<std::size_t>(s)] - prev[static_cast<std::size_t>(s)]));
      if (change < opts.tol || ((i + 1) % kResidualEvery == 0 && sos_residual(H, terms_of(row)) < accept)) {
        prev = row;
        converged = true;
        ++i;
        break;
      }
    }
    prev = row;
    rows.push_back(row);
    if (rows.size() > static_cast<std::size_t>(b + 1)) rows.erase(rows.begin());
  }
  out.iterations = i;
  if (!converged) {
    std::ostringstream os;
    os << "block-Toeplitz Cholesky did not converge in " << opts.max_iters << " rows; last change " << change;
    throw Error(ErrorKind::NotConverged, os.str(), change);
  }

  out.terms = terms_of(prev);
  out.L = static_cast<int>(out.terms.size());
  out.residual = sos_residual(H, out.terms);
  out.tolerance = 1e-8 * hnorm;
  if (!(out.residual < out.tolerance)) {
    std::ostringstream os;
    os << "matrix Fejer-Riesz residual " << out.residual << " exceeds " << out.tolerance;
    throw Error(ErrorKind::Instability, os.str(), out.residual);
  }
  return out;
}

SOSDecomposition rank2_complement(const BiLaurent& P_delta, const BiLaurent& Q_circuit, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorKind::Validation, "delta must lie in [0, 1)");
  BiLaurent P = P_delta;
  P *= 1.0 / (1.0 - delta);
  BiLaurent defect = abs_squared(P) + abs_squared(Q_circuit) - BiLaurent::constant(1.0);
  const int n1 = std::max(64, 2 * defect.window1().span());
  const int n2 = std::max(64, 2 * defect.window2().span());
  const TorusGrid dg = evaluate_grid(defect, n1, n2);
  double worst = 0.0;
  for (const auto& v : dg.values) worst = std::max(worst, std::abs(v));
  if (worst > 1e-10) {
    std::ostringstream os;
    os << "|P|^2 + |Q|^2 = 1 violated: max defect " << worst;
    throw Error(ErrorKind::Validation, os.str(), worst);
  }
  SOSDecomposition out;
  out.method = "rank2";
  const double c = std::sqrt(2.0 * delta - delta * delta);
  if (c > 0.0) out.terms.push_back(BiLaurent::constant(c));
  BiLaurent q = Q_circuit;
  q *= (1.0 - delta);
  out.terms.push_back(q);
  out.L = static_cast<int>(out.terms.size());
  const BiLaurent H = BiLaurent::constant(1.0) - abs_squared(P_delta);
  out.residual = sos_residual(H, out.terms);
  out.tolerance = 1e-12;
  return out;
}

FeasibilityResult scalar_factorization_feasible(const BiLaurent& H, double tol) {
  require_real(H);
  FeasibilityResult fr;
  const MomentMatrix mm = moment_matrix(H);
  Eigen::SelfAdjointEigenSolver<Mat> es(mm.M);
  fr.moment_rank = numerical_rank(es.eigenvalues());
  const int d1 = mm.d1, d2 = mm.d2;
  const LagTable t(d1, d2);
  const auto h = lag_targets(H, t);
  double hn2 = 0.0;
  for (const auto& v : h) hn2 += std::norm(v);
  if (hn2 == 0.0) {
    fr.feasible = true;
    fr.factor = BiLaurent::constant(0.0);
    return fr;
  }
  if (grid_min(H) < -1e-10 * std::sqrt(hn2)) {
    fr.feasible = false;
    fr.rank1_residual = 1.0;
    return fr;
  }
  const int N = t.N;
  // f(q) = sum_k |sum_{a-b=k} q_a conj(q_b) - H_k|^2 / ||H||^2
  Objective obj = [&](const std::vector<double>& x, std::vector<double>& g) {
    std::vector<cplx> q(static_cast<std::size_t>(N));
    for (int a = 0; a < N; ++a) q[static_cast<std::size_t>(a)] = cplx(x[2 * a], x[2 * a + 1]);
    std::vector<cplx> r(static_cast<std::size_t>(t.nlag), cplx(0.0, 0.0));
    for (int a = 0; a < N; ++a)
      for (int bb = 0; bb < N; ++bb)
        r[static_cast<std::size_t>(t.lag[static_cast<std::size_t>(a) * N + bb])] += q[static_cast<std::size_t>(a)] * std::conj(q[static_cast<std::size_t>(bb)]);
    double f = 0.0;
    for (int id = 0; id < t.nlag; ++id) {
      r[static_cast<std::size_t>(id)] -= h[static_cast<std::size_t>(id)];
      f += std::norm(r[static_cast<std::size_t>(id)]);
    }
    // df/dconj(q_a) = 2 sum_b r_{a-b} q_b
    for (int a = 0; a < N; ++a) {
      cplx ga(0.0, 0.0);
      for (int bb = 0; bb < N; ++bb)
        ga += r[static_cast<std::size_t>(t.lag[static_cast<std::size_t>(a) * N + bb])] * q[static_cast<std::size_t>(bb)];
      g[2 * a] = 4.0 * ga.real() / hn2;
      g[2 * a + 1] = 4.0 * ga.imag() / hn2;
    }
    return f / hn2;
  };
  std::vector<std::vector<double>> starts;
  {
    const Mat G = averaged_gram(H, d1, d2);
    Eigen::SelfAdjointEigenSolver<Mat> eg(G);
    const double lam = std::max(eg.eigenvalues()(N - 1), 0.0);
    const Vec v = std::sqrt(lam) * eg.eigenvectors().col(N - 1);
    std::vector<double> x(2 * static_cast<std::size_t>(N));
    for (int a = 0; a < N; ++a) {
      x[2 * a] = v(a).real();
      x[2 * a + 1] = v(a).imag();
    }
    starts.push_back(x);
  }
  std::mt19937_64 rng(20250101);
  std::normal_distribution<double> gauss(0.0, std::sqrt(std::max(h[static_cast<std::size_t>(t.id_of(0, 0))].real(), 1e-300) / (2.0 * N)));
  for (int s = 0; s < 11; ++s) {
    std::vector<double> x(2 * static_cast<std::size_t>(N));
    for (auto& v : x) v = gauss(rng);
    starts.push_back(x);
  }
  LbfgsOptions lo;
  lo.max_iters = 3000;
  lo.cost_tol = 1e-4 * tol * tol;
  lo.grad_tol = 1e-15;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (const auto& x0 : starts) {
    const LbfgsResult res = lbfgs_minimize(obj, x0, lo);
    if (res.final_cost < best) {
      best = res.final_cost;
      best_x = res.x;
    }
    if (std::sqrt(best) < 1e-2 * tol) break;
  }
  fr.rank1_residual = std::sqrt(std::max(best, 0.0));
  fr.feasible = fr.rank1_residual < tol;
  Vec q(N);
  for (int a = 0; a < N; ++a) q(a) = cplx(best_x[2 * a], best_x[2 * a + 1]);
  fr.factor = vector_to_poly(q, d1, d2);
  return fr;
}

}  // namespace mqsp
