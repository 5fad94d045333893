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

#include "qsp_optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "error.hpp"

namespace mqsp {

namespace {

using Row = std::array<cplx, 2>;

struct Rot {
  cplx a, b, c, e;  // [[a, b], [c, e]]
};

Rot rot(double theta, double phi) {
  const double co = std::cos(theta), si = std::sin(theta);
  return {std::polar(co, phi), -si, si, std::polar(co, -phi)};
}

Rot drot_theta(double theta, double phi) {
  const double co = std::cos(theta), si = std::sin(theta);
  return {-std::polar(si, phi), -co, co, -std::polar(si, -phi)};
}

Rot drot_phi(double theta, double phi) {
  const double co = std::cos(theta);
  const cplx i(0.0, 1.0);
  return {i * std::polar(co, phi), 0.0, 0.0, -i * std::polar(co, -phi)};
}

Row row_times(const Row& l, const Rot& r) {
  return {l[0] * r.a + l[1] * r.c, l[0] * r.b + l[1] * r.e};
}

Row rot_times(const Rot& r, const Row& v) {
  return {r.a * v[0] + r.b * v[1], r.c * v[0] + r.e * v[1]};
}

cplx sandwich(const Row& l, const Rot& r, const Row& v) {
  return l[0] * (r.a * v[0] + r.b * v[1]) + l[1] * (r.c * v[0] + r.e * v[1]);
}

void check_grid(const TorusGrid& g) {
  if (g.N1 < 1 || g.N2 < 1 || g.values.size() != static_cast<std::size_t>(g.N1) * g.N2) {
    throw Error(ErrorKind::Validation, "malformed target grid");
  }
}

}  // namespace

double cost_and_gradient(const CircuitSpec& spec, const TorusGrid& tg, std::vector<double>& grad) {
  spec.validate();
  check_grid(tg);
  const int d = spec.schedule.size();
  std::vector<Rot> R(static_cast<std::size_t>(d) + 1), Dt(R.size()), Dp(R.size());
  for (int j = 0; j <= d; ++j) {
    const Angle& a = spec.angles[static_cast<std::size_t>(j)];
    R[static_cast<std::size_t>(j)] = rot(a.theta, a.phi);
    Dt[static_cast<std::size_t>(j)] = drot_theta(a.theta, a.phi);
    Dp[static_cast<std::size_t>(j)] = drot_phi(a.theta, a.phi);
  }
  grad.assign(2 * (static_cast<std::size_t>(d) + 1), 0.0);
  std::vector<Row> left(static_cast<std::size_t>(d) + 1);
  const double inv = 1.0 / (static_cast<double>(tg.N1) * tg.N2);
  double total = 0.0;
  for (int jj = 0; jj < tg.N1; ++jj) {
    const cplx z1 = std::polar(1.0, 2.0 * M_PI * jj / tg.N1);
    for (int kk = 0; kk < tg.N2; ++kk) {
      const cplx z2 = std::polar(1.0, 2.0 * M_PI * kk / tg.N2);
      // left[j] = e0^T R_0 A_1 ... R_{j-1} A_j
      Row l{1.0, 0.0};
      for (int j = 0; j <= d; ++j) {
        left[static_cast<std::size_t>(j)] = l;
        if (j == d) break;
        l = row_times(l, R[static_cast<std::size_t>(j)]);
        l[0] *= spec.schedule.var(j) == 1 ? z1 : z2;
      }
      // right = A_{j+1} R_{j+1} ... R_d e0, walked backwards
      Row r{1.0, 0.0};
      const cplx P = sandwich(left[static_cast<std::size_t>(d)], R[static_cast<std::size_t>(d)], r);
      const cplx diff = P - tg(jj, kk);
      total += std::norm(diff);
      const cplx w = 2.0 * inv * std::conj(diff);
      for (int j = d; j >= 0; --j) {
        const std::size_t u = static_cast<std::size_t>(j);
        const Row& lj = left[u];
        grad[2 * u] += (w * sandwich(lj, Dt[u], r)).real();
        grad[2 * u + 1] += (w * sandwich(lj, Dp[u], r)).real();
        if (j == 0) break;
        r = rot_times(R[u], r);
        r[0] *= spec.schedule.var(j - 1) == 1 ? z1 : z2;
      }
    }
  }
  return total * inv;
}

double cost(const CircuitSpec& spec, const TorusGrid& target_grid) {
  spec.validate();
  check_grid(target_grid);
  const CircuitGrids g = evaluate_circuit_grid(spec, target_grid.N1, target_grid.N2);
  return grid_mean_abs2([&] {
    TorusGrid d = g.P;
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= target_grid.values[i];
    return d;
  }());
}

double cost_coefficients(const CircuitSpec& spec, const BiLaurent& target) {
  const CircuitPolys cp = circuit_polynomials(spec);
  const BiLaurent d = cp.P - target;
  return d.coeff_norm2();
}

std::vector<double> gradient(const CircuitSpec& spec, const TorusGrid& target_grid) {
  std::vector<double> g;
  cost_and_gradient(spec, target_grid, g);
  return g;
}

int nyquist_size(int degree) {
  int n = 16;
  while (n < degree + 1) n *= 2;
  return n;
}

TorusGrid target_grid_for(const BiLaurent& target, const Schedule& schedule) {
  const BiLaurent t = target.trimmed(0.0);
  const int n1 = nyquist_size(std::max(schedule.dR(), t.window1().hi) - std::min(0, t.window1().lo));
  const int n2 = nyquist_size(std::max(schedule.dI(), t.window2().hi) - std::min(0, t.window2().lo));
  return evaluate_grid(t, n1, n2);
}

RefineResult refine(const CircuitSpec& spec0, const TorusGrid& target_grid, const RefineOptions& opts) {
  spec0.validate();
  const Schedule& s = spec0.schedule;
  Objective f = [&](const std::vector<double>& x, std::vector<double>& g) {
    return cost_and_gradient(CircuitSpec::unflatten(s, x), target_grid, g);
  };
  LbfgsOptions lo;
  lo.max_iters = opts.max_iters;
  lo.cost_tol = opts.cost_tol;
  lo.grad_tol = opts.grad_tol;
  lo.memory = opts.memory;
  const LbfgsResult lr = lbfgs_minimize(f, spec0.flatten(), lo);
  RefineResult out;
  out.spec = CircuitSpec::unflatten(s, lr.x);
  out.report.initial_cost = lr.initial_cost;
  out.report.final_cost = lr.final_cost;
  out.report.iterations = lr.iterations;
  out.report.converged = lr.converged;
  out.report.gradient_norm = lr.grad_norm;
  out.report.stop_reason = lr.stop_reason;
  out.report.trace = lr.trace;
  out.report.restart_results = {lr.final_cost};
  out.report.basins = 1;
  out.report.best_restart = 0;
  return out;
}

int count_basins(std::vector<double> costs, double resolution) {
  if (costs.empty()) return 0;
  std::sort(costs.begin(), costs.end());
  int n = 1;
  double anchor = costs[0];
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i] - anchor > resolution) {
      ++n;
      anchor = costs[i];
    }
  }
  return n;
}

RefineResult multistart(const TorusGrid& target_grid, const CircuitSpec& init, int k, double sigma,
                        std::uint64_t seed, const RefineOptions& opts) {
  if (k < 1) throw Error(ErrorKind::Validation, "multistart needs k >= 1");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::Validation, "sigma must be >= 0");
  init.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RefineResult best;
  std::vector<double> finals;
  for (int i = 0; i < k; ++i) {
    std::vector<double> x = init.flatten();
    for (auto& v : x) v += sigma * gauss(rng);
    RefineResult r = refine(CircuitSpec::unflatten(init.schedule, x), target_grid, opts);
    finals.push_back(r.report.final_cost);
    if (i == 0 || r.report.final_cost < best.report.final_cost) {
      best = std::move(r);
      best.report.best_restart = i;
    }
  }
  best.report.restart_results = finals;
  best.report.basins = count_basins(finals);
  return best;
}

PipelineResult angles_pipeline(const BiLaurent& target, const Schedule& schedule,
                               const std::vector<BiLaurent>& complements, const PipelineOptions& opts) {
  PipelineResult out;
  const Window w1{0, schedule.dR()}, w2{0, schedule.dI()};
  const double outside = target.mass_outside(w1, w2);
  if (!opts.lenient && outside > 1e-10) {
    throw Error(ErrorKind::DegreeOverflow, "target has coefficients outside the schedule bidegree", outside);
  }
  // Projection onto the circuit window; for off-manifold targets it is rescaled
  // below modulus 1 so 1 - |P|^2 admits a complement. It only seeds the peel.
  BiLaurent P = target.rewindowed(w1, w2);
  if (opts.lenient) {
    const double s = sup_norm(P);
    if (s > 1.0 - opts.warm_margin) P *= (1.0 - opts.warm_margin) / s;
  }
  std::vector<BiLaurent> comps = complements;
  if (comps.empty()) {
    const BiLaurent H = BiLaurent::constant(1.0) - abs_squared(P);
    try {
      out.sos = matrix_fejer_riesz(H);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Validation) throw;
      try {
        out.sos = sos_from_moment(H, 1e-9);
      } catch (const Error&) {
        if (!opts.lenient) throw;
        out.sos = approximate_sos(H);
      }
    }
    comps = out.sos.terms;
    if (comps.empty()) comps.push_back(BiLaurent::constant(0.0));
  }
  PeelOptions po = opts.peel;
  po.lenient = opts.lenient;
  out.peel = recursive_angle_find(P, comps, schedule, po);
  const TorusGrid tg = target_grid_for(target, schedule);
  RefineResult rr = opts.restarts > 0
                        ? multistart(tg, out.peel.spec, opts.restarts, opts.sigma, opts.seed, opts.refine)
                        : refine(out.peel.spec, tg, opts.refine);
  out.spec = rr.spec;
  out.report = rr.report;
  out.roundtrip_error = roundtrip_verify(target, out.spec, tg.N1, tg.N2);
  return out;
}

}  // namespace mqsp
