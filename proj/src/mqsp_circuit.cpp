#include "mqsp_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace mqsp {

Schedule Schedule::parse(const std::string& s) {
  for (char c : s) {
    if (c != 'R' && c != 'I') {
      throw Error(ErrorKind::Validation, std::string("schedule entries must be R or I, got '") + c + "'");
    }
  }
  return Schedule{s};
}

Schedule Schedule::blocks(int dR, int dI, int r) {
  if (r < 1 || dR < 0 || dI < 0) throw Error(ErrorKind::Validation, "block schedule needs r >= 1");
  Schedule s;
  for (int j = 0; j < r; ++j) {
    const int nr = dR / r + (j < dR % r ? 1 : 0);
    const int ni = dI / r + (j < dI % r ? 1 : 0);
    s.entries.append(static_cast<std::size_t>(nr), 'R');
    s.entries.append(static_cast<std::size_t>(ni), 'I');
  }
  return s;
}

int Schedule::dR() const {
  return static_cast<int>(std::count(entries.begin(), entries.end(), 'R'));
}

int Schedule::dI() const {
  return static_cast<int>(std::count(entries.begin(), entries.end(), 'I'));
}

void CircuitSpec::validate() const {
  if (angles.size() != static_cast<std::size_t>(schedule.size()) + 1) {
    std::ostringstream os;
    os << "angle count " << angles.size() << " must equal schedule length + 1 = " << schedule.size() + 1;
    throw Error(ErrorKind::Validation, os.str());
  }
  for (const auto& a : angles) {
    if (!std::isfinite(a.theta) || !std::isfinite(a.phi)) {
      throw Error(ErrorKind::Validation, "non-finite circuit angle");
    }
  }
}

std::vector<double> CircuitSpec::flatten() const {
  std::vector<double> x;
  x.reserve(2 * angles.size());
  for (const auto& a : angles) {
    x.push_back(a.theta);
    x.push_back(a.phi);
  }
  return x;
}

CircuitSpec CircuitSpec::unflatten(const Schedule& s, const std::vector<double>& x) {
  CircuitSpec c;
  c.schedule = s;
  c.angles.resize(x.size() / 2);
  for (std::size_t k = 0; k < c.angles.size(); ++k) c.angles[k] = {x[2 * k], x[2 * k + 1]};
  c.validate();
  return c;
}

Mat2 rotation_matrix(double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 R;
  R << std::polar(c, phi), -s, s, std::polar(c, -phi);
  return R;
}

std::pair<cplx, cplx> circuit_column(const CircuitSpec& spec, cplx z1, cplx z2) {
  const int d = spec.schedule.size();
  const Angle& last = spec.angles[static_cast<std::size_t>(d)];
  cplx p = std::polar(std::cos(last.theta), last.phi);
  cplx q = std::sin(last.theta);
  for (int j = d - 1; j >= 0; --j) {
    p *= spec.schedule.var(j) == 1 ? z1 : z2;
    const Angle& a = spec.angles[static_cast<std::size_t>(j)];
    const double c = std::cos(a.theta), s = std::sin(a.theta);
    const cplx np = std::polar(c, a.phi) * p - s * q;
    const cplx nq = s * p + std::polar(c, -a.phi) * q;
    p = np;
    q = nq;
  }
  return {p, q};
}

CircuitGrids evaluate_circuit_grid(const CircuitSpec& spec, int N1, int N2) {
  spec.validate();
  CircuitGrids g{TorusGrid(N1, N2), TorusGrid(N1, N2)};
  for (int j = 0; j < N1; ++j) {
    const cplx z1 = std::polar(1.0, 2.0 * M_PI * j / N1);
    for (int k = 0; k < N2; ++k) {
      const cplx z2 = std::polar(1.0, 2.0 * M_PI * k / N2);
      const auto pq = circuit_column(spec, z1, z2);
      g.P(j, k) = pq.first;
      g.Q(j, k) = pq.second;
    }
  }
  return g;
}

double unitarity_defect(const CircuitGrids& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.P.values.size(); ++i) {
    worst = std::max(worst, std::abs(std::norm(g.P.values[i]) + std::norm(g.Q.values[i]) - 1.0));
  }
  return worst;
}

CircuitPolys circuit_polynomials(const CircuitSpec& spec) {
  spec.validate();
  const int d = spec.schedule.size();
  const Window w1{0, spec.schedule.dR()};
  const Window w2{0, spec.schedule.dI()};
  BiLaurent p(w1, w2), q(w1, w2);
  const Angle& last = spec.angles[static_cast<std::size_t>(d)];
  p.at(0, 0) = std::polar(std::cos(last.theta), last.phi);
  q.at(0, 0) = std::sin(last.theta);
  int m1 = 0, m2 = 0;  // current degrees
  for (int j = d - 1; j >= 0; --j) {
    const int var = spec.schedule.var(j);
    // p <- z_var p, in place from the top down
    if (var == 1) {
      for (int m = m1; m >= 0; --m)
        for (int n = 0; n <= m2; ++n) {
          p.at(m + 1, n) = p.at(m, n);
          p.at(m, n) = 0.0;
        }
      ++m1;
    } else {
      for (int m = 0; m <= m1; ++m)
        for (int n = m2; n >= 0; --n) {
          p.at(m, n + 1) = p.at(m, n);
          p.at(m, n) = 0.0;
        }
      ++m2;
    }
    const Angle& a = spec.angles[static_cast<std::size_t>(j)];
    const double c = std::cos(a.theta), s = std::sin(a.theta);
    const cplx e_plus = std::polar(c, a.phi), e_minus = std::polar(c, -a.phi);
    for (int m = 0; m <= m1; ++m)
      for (int n = 0; n <= m2; ++n) {
        const cplx pv = p.at(m, n), qv = q.at(m, n);
        p.at(m, n) = e_plus * pv - s * qv;
        q.at(m, n) = s * pv + e_minus * qv;
      }
  }
  return {p, q};
}

double success_probability(const CircuitSpec& spec, const HamiltonianPair& pair, double T,
                           const Vec& psi0, double delta, int steps) {
  spec.validate();
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw Error(ErrorKind::Validation, "psi0 must be normalized");
  if (psi0.size() != pair.dim()) throw Error(ErrorKind::Validation, "psi0 dimension mismatch");
  const Mat V = interaction_propagator(pair, T, steps);
  const double amp = (V * psi0).squaredNorm();
  const double p = (1.0 - delta) * (1.0 - delta) * amp * std::exp(-2.0 * pair.beta_I * T);
  return std::clamp(p, 0.0, 1.0);
}

Mat build_walk_operator(const Mat& H, double alpha) {
  const auto e = hermitian_eigendecompose(H);
  const double hn = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
  if (!(alpha > 0.0) || hn > alpha * (1.0 + 1e-12)) {
    throw Error(ErrorKind::Domain, "walk operator needs ||H|| <= alpha", hn);
  }
  const Eigen::Index n = H.rows();
  Vec a(n), s(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = std::clamp(e.values(k) / alpha, -1.0, 1.0);
    a(k) = lam;
    s(k) = std::sqrt(std::max(0.0, 1.0 - lam * lam));
  }
  const Mat A = e.vectors * a.asDiagonal() * e.vectors.adjoint();
  const Mat S = e.vectors * s.asDiagonal() * e.vectors.adjoint();
  // (2 Pi - I) [[A, S], [S, -A]] = [[A, S], [-S, A]]
  Mat W(2 * n, 2 * n);
  W.topLeftCorner(n, n) = A;
  W.topRightCorner(n, n) = S;
  W.bottomLeftCorner(n, n) = -S;
  W.bottomRightCorner(n, n) = A;
  return W;
}

CircuitSpec random_circuit(const Schedule& s, std::mt19937_64& rng, double theta_lo, double theta_hi) {
  std::uniform_real_distribution<double> th(theta_lo, theta_hi);
  std::uniform_real_distribution<double> ph(-M_PI, M_PI);
  CircuitSpec c;
  c.schedule = s;
  c.angles.resize(static_cast<std::size_t>(s.size()) + 1);
  for (auto& a : c.angles) {
    a.theta = th(rng);
    a.phi = ph(rng);
  }
  return c;
}

}  // namespace mqsp
