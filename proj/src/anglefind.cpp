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

#include "anglefind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace mqsp {

namespace {

constexpr double kEdgeTol = 1e-14;

// Coefficient at index k of var and index j of the other variable.
cplx get(const BiLaurent& P, int var, int k, int j) {
  return var == 1 ? P.coeff(k, j) : P.coeff(j, k);
}

std::vector<cplx> top_slice(const BiLaurent& P, int var, int k, int other_hi) {
  std::vector<cplx> s(static_cast<std::size_t>(other_hi) + 1);
  for (int j = 0; j <= other_hi; ++j) s[static_cast<std::size_t>(j)] = get(P, var, k, j);
  return s;
}

double slice_norm(const std::vector<cplx>& s) {
  double a = 0.0;
  for (const auto& v : s) a += std::norm(v);
  return std::sqrt(a);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CrcRatio ratio_of_slices(const std::vector<cplx>& p, const std::vector<cplx>& q, bool use_median) {
  CrcRatio r;
  r.ops = 2 * static_cast<int>(p.size());
  double pp = 0.0, pmax = 0.0;
  cplx pq(0.0, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    pp += std::norm(p[k]);
    pq += std::conj(p[k]) * q[k];
    pmax = std::max(pmax, std::abs(p[k]));
  }
  if (pp == 0.0) {
    r.rho = 0.0;
    r.deviation = std::numeric_limits<double>::infinity();
    return r;
  }
  r.rho = pq / pp;
  if (use_median) {
    std::vector<double> re, im;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (std::abs(p[k]) > 1e-3 * pmax) {
        const cplx v = q[k] / p[k];
        re.push_back(v.real());
        im.push_back(v.imag());
      }
    }
    r.rho = cplx(median(re), median(im));
  }
  double res = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) res += std::norm(q[k] - r.rho * p[k]);
  r.deviation = std::sqrt(res / pp);
  return r;
}

int active_complement(const std::vector<BiLaurent>& qs, int var, int k, int other_hi) {
  int best = 0;
  double best_norm = -1.0;
  for (std::size_t l = 0; l < qs.size(); ++l) {
    const double n = slice_norm(top_slice(qs[l], var, k, other_hi));
    if (n > best_norm) {
      best_norm = n;
      best = static_cast<int>(l);
    }
  }
  return best;
}

// Sum of |c| outside the window; bounds the grid change from dropping them.
double l1_outside(const BiLaurent& P, Window w1, Window w2) {
  double s = 0.0;
  for (int m = P.window1().lo; m <= P.window1().hi; ++m)
    for (int n = P.window2().lo; n <= P.window2().hi; ++n)
      if (!w1.contains(m) || !w2.contains(n)) s += std::abs(P.coeff(m, n));
  return s;
}

double norm_identity_defect(const BiLaurent& P, const std::vector<BiLaurent>& qs) {
  BiLaurent acc = abs_squared(P);
  for (const auto& q : qs) acc += abs_squared(q);
  acc -= BiLaurent::constant(1.0);
  const int n1 = std::max(16, 2 * acc.window1().span());
  const int n2 = std::max(16, 2 * acc.window2().span());
  const TorusGrid g = evaluate_grid(acc, n1, n2);
  double worst = 0.0;
  for (const auto& v : g.values) worst = std::max(worst, std::abs(v));
  return worst;
}

void check_drift(const PeelState& s, const PeelOptions& opts) {
  if (!opts.lenient && s.drift > opts.drift_tol * s.kappa_running) {
    std::ostringstream os;
    os << "norm identity drift " << s.drift << " exceeds " << opts.drift_tol << " * kappa (kappa = " << s.kappa_running
       << ")";
    throw Error(ErrorKind::Instability, os.str(), s.kappa_running);
  }
}

CrcRatio recursive_ratio(const BiLaurent& P, const BiLaurent& Q, int var, int k, int other_hi, double tol,
                         bool median_flag) {
  CrcRatio r = ratio_of_slices(top_slice(P, var, k, other_hi), top_slice(Q, var, k, other_hi), median_flag);
  if (r.deviation >= tol) {
    std::ostringstream os;
    os << "CRC violation: leading-slice ratio deviation " << r.deviation << " >= " << tol;
    throw Error(ErrorKind::CrcViolation, os.str(), r.deviation);
  }
  return r;
}

PeelStepResult peel_step_impl(PeelState& st, const PeelOptions& opts, bool block) {
  if (st.remaining.size() == 0) throw Error(ErrorKind::Validation, "peel_step needs a nonempty schedule");
  if (st.complements.empty()) throw Error(ErrorKind::Validation, "peel_step needs at least one complement");
  const int var = st.remaining.var(0);
  const int cR = st.remaining.dR(), cI = st.remaining.dI();
  const int k = var == 1 ? cR : cI;
  const int other_hi = var == 1 ? cI : cR;
  const int a = active_complement(st.complements, var, k, other_hi);
  BiLaurent& Q = st.complements[static_cast<std::size_t>(a)];
  st.last_active = a;

  PeelStepResult out;
  const double tol = opts.lenient ? std::numeric_limits<double>::infinity() : opts.crc_tol * st.kappa_running;
  // Cross-check index next to the corner: it carries one sine factor, while
  // index 0 carries one per query of the other variable and underflows the
  // floor for small angles.
  const int check_idx = other_hi - 1;
  const cplx p_corner = get(st.P, var, k, other_hi);
  const cplx p_base = other_hi > 0 ? get(st.P, var, k, check_idx) : cplx(0.0, 0.0);
  const double scale = 1.0;
  bool have_ratio = false;
  CrcRatio r;
  if (block) {
    // Separable tops: the ratio at one index is the ratio everywhere.
    const double floor = 1e-10 * scale;
    if (std::abs(p_corner) > floor) {
      const cplx rc = get(Q, var, k, other_hi) / p_corner;
      bool ok = true;
      if (other_hi > 0) {
        ok = std::abs(p_base) > floor;
        if (ok) {
          const cplx rb = get(Q, var, k, check_idx) / p_base;
          ok = std::abs(rc - rb) <= std::max(opts.crc_tol * st.kappa_running, 1e-12) * std::max(1.0, std::abs(rc));
        }
      }
      if (ok) {
        r.rho = rc;
        r.ops = other_hi > 0 ? 4 : 2;
        have_ratio = true;
      }
    }
    if (!have_ratio) out.fallback = true;
  }
  double theta = 0.0, phi = 0.0;
  bool edge = false;
  if (!have_ratio) {
    const double np = slice_norm(top_slice(st.P, var, k, other_hi));
    const double nq = slice_norm(top_slice(Q, var, k, other_hi));
    if (np < kEdgeTol * scale) {
      theta = M_PI / 2;
      edge = true;
    } else if (nq < kEdgeTol * scale) {
      theta = 0.0;
      edge = true;
    } else {
      r = recursive_ratio(st.P, Q, var, k, other_hi, tol, opts.median_ratio);
    }
    if (edge) out.ratio_ops += 2 * (other_hi + 1);
  }
  if (!edge) {
    theta = std::atan(std::abs(r.rho));
    phi = r.rho == cplx(0.0, 0.0) ? 0.0 : -std::arg(r.rho);
    out.deviation = r.deviation;
    out.ratio_ops += r.ops;
  }
  out.edge_case = edge;
  out.theta = theta;
  out.phi = phi;

  // (P, Q) <- R(theta, phi)^dagger (P, Q), then P /= z_var and drop Q's top row.
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx em = std::polar(c, -phi), ep = std::polar(c, phi);
  const Window w1{0, cR}, w2{0, cI};
  const Window n1{0, var == 1 ? cR - 1 : cR}, n2{0, var == 2 ? cI - 1 : cI};
  BiLaurent P2(n1, n2), Q2(n1, n2);
  double dropped = 0.0;
  for (int m = 0; m <= cR; ++m)
    for (int n = 0; n <= cI; ++n) {
      const cplx pv = st.P.coeff(m, n), qv = Q.coeff(m, n);
      const cplx np = em * pv + s * qv;
      const cplx nq = -s * pv + ep * qv;
      const int pm = var == 1 ? m - 1 : m, pn = var == 2 ? n - 1 : n;
      if (pm >= 0 && pn >= 0) P2.at(pm, pn) = np;
      else dropped += std::abs(np);
      if (n1.contains(m) && n2.contains(n)) Q2.at(m, n) = nq;
      else dropped += std::abs(nq);
    }
  out.update_ops += 2L * w1.span() * w2.span();
  dropped += l1_outside(st.P, w1, w2) + l1_outside(Q, w1, w2);
  st.P = std::move(P2);
  Q = std::move(Q2);
  for (std::size_t l = 0; l < st.complements.size(); ++l) {
    if (static_cast<int>(l) == a) continue;
    BiLaurent& q = st.complements[l];
    dropped += l1_outside(q, n1, n2);
    q = q.rewindowed(n1, n2);
  }
  st.drift += 2.0 * dropped + dropped * dropped;

  if (!edge) st.kappa_running *= 1.0 / std::max(c, 1e-16);
  st.angles_so_far.push_back({theta, phi});
  st.remaining.entries.erase(0, 1);

  if (opts.reorthogonalize) {
    double total = st.P.coeff_norm2();
    for (const auto& q : st.complements) total += q.coeff_norm2();
    if (total > 0.0) {
      const double f = 1.0 / std::sqrt(total);
      st.P *= f;
      for (auto& q : st.complements) q *= f;
    }
  }
  check_drift(st, opts);
  return out;
}

AngleFindResult run_peel(const BiLaurent& P, const std::vector<BiLaurent>& complements, const Schedule& schedule,
                         const PeelOptions& opts, bool block) {
  if (complements.empty()) throw Error(ErrorKind::Validation, "angle finding needs at least one complement");
  const Window w1{0, schedule.dR()}, w2{0, schedule.dI()};
  if (opts.check_precondition && !opts.lenient) {
    const double d = norm_identity_defect(P, complements);
    if (d > 1e-8) {
      std::ostringstream os;
      os << "|P|^2 + sum |Q_l|^2 = 1 violated by " << d;
      throw Error(ErrorKind::Validation, os.str(), d);
    }
  }
  PeelState st;
  st.remaining = schedule;
  const double outside = l1_outside(P, w1, w2);
  if (!opts.lenient && outside > 1e-10) {
    std::ostringstream os;
    os << "target has coefficients outside the schedule bidegree (" << w1.hi << ", " << w2.hi << "): " << outside;
    throw Error(ErrorKind::DegreeOverflow, os.str(), outside);
  }
  st.P = P.rewindowed(w1, w2);
  for (const auto& q : complements) st.complements.push_back(q.rewindowed(w1, w2));
  st.drift = outside;

  AngleFindResult res;
  const int d = schedule.size();
  for (int j = 0; j < d; ++j) {
    const int var = st.remaining.var(0);
    const PeelStepResult ps = peel_step_impl(st, opts, block);
    res.max_deviation = std::max(res.max_deviation, ps.deviation);
    res.ratio_ops += ps.ratio_ops;
    res.update_ops += ps.update_ops;
    res.fallback_used = res.fallback_used || ps.fallback;
    res.trace.push_back({j, var, ps.theta, ps.phi, ps.deviation, st.kappa_running});
  }
  // Base rotation on the remaining constants.
  // The complement carried through the rotations pairs with P; the others are
  // spectators. With no peel steps, take the largest constant.
  double best = 0.0;
  if (st.last_active >= 0) {
    best = std::abs(st.complements[static_cast<std::size_t>(st.last_active)].coeff(0, 0));
  } else {
    for (const auto& q : st.complements) best = std::max(best, std::abs(q.coeff(0, 0)));
  }
  const cplx p0 = st.P.coeff(0, 0);
  const double theta = std::atan2(best, std::abs(p0));
  const double phi = std::abs(p0) > 0.0 ? std::arg(p0) : 0.0;
  st.angles_so_far.push_back({theta, phi});
  st.kappa_running *= 1.0 / std::max(std::cos(theta), 1e-16);
  res.trace.push_back({d, 0, theta, phi, 0.0, st.kappa_running});

  res.spec.schedule = schedule;
  res.spec.angles = st.angles_so_far;
  res.kappa_total = st.kappa_running;
  res.drift = st.drift;
  return res;
}

}  // namespace

CrcRatio crc_ratio(const BiLaurent& P, const BiLaurent& Q, int var, double tol, bool median) {
  if (var != 1 && var != 2) throw Error(ErrorKind::Validation, "var must be 1 or 2");
  const int k = std::max(P.window(var).hi, Q.window(var).hi);
  const int other = var == 1 ? 2 : 1;
  const int lo = std::min(P.window(other).lo, Q.window(other).lo);
  const int hi = std::max(P.window(other).hi, Q.window(other).hi);
  std::vector<cplx> p, q;
  for (int j = lo; j <= hi; ++j) {
    p.push_back(get(P, var, k, j));
    q.push_back(get(Q, var, k, j));
  }
  CrcRatio r = ratio_of_slices(p, q, median);
  if (r.deviation >= tol) {
    std::ostringstream os;
    os << "CRC violation: leading-slice ratio deviation " << r.deviation << " >= " << tol;
    throw Error(ErrorKind::CrcViolation, os.str(), r.deviation);
  }
  return r;
}

PeelStepResult peel_step(PeelState& state, const PeelOptions& opts) {
  return peel_step_impl(state, opts, false);
}

AngleFindResult recursive_angle_find(const BiLaurent& P, const std::vector<BiLaurent>& complements,
                                     const Schedule& schedule, const PeelOptions& opts) {
  return run_peel(P, complements, schedule, opts, false);
}

AngleFindResult block_peel(const BiLaurent& P, const std::vector<BiLaurent>& complements,
                           const Schedule& schedule, const PeelOptions& opts) {
  return run_peel(P, complements, schedule, opts, true);
}

AngleFindResult block_peel(const DysonTarget& target, const std::vector<BiLaurent>& complements,
                           const PeelOptions& opts) {
  return run_peel(target.analytic(), complements, target.schedule, opts, true);
}

double roundtrip_verify(const BiLaurent& target_P, const CircuitSpec& spec, int N1, int N2) {
  const CircuitGrids cg = evaluate_circuit_grid(spec, N1, N2);
  const TorusGrid tg = evaluate_grid(target_P, N1, N2);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < tg.values.size(); ++i) {
    num += std::norm(cg.P.values[i] - tg.values[i]);
    den += std::norm(tg.values[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace mqsp
