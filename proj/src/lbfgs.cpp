#include "lbfgs.hpp"

#include <cmath>
#include <deque>

#include <Eigen/Dense>

namespace mqsp {

namespace {

using VecD = Eigen::VectorXd;

VecD to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VecD>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const VecD& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  const std::size_t n = x0.size();
  std::vector<double> gbuf(n, 0.0);
  double fx = f(x0, gbuf);
  VecD x = to_eigen(x0);
  VecD g = to_eigen(gbuf);
  res.initial_cost = fx;
  res.trace.push_back({0, fx, g.norm(), 0.0});

  std::deque<VecD> S, Y;
  std::deque<double> rho;
  int stall = 0;
  res.stop_reason = "max_iters";
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const double gn = g.norm();
    if (fx <= opts.cost_tol) {
      res.converged = true;
      res.stop_reason = "cost_tol";
      break;
    }
    if (gn <= opts.grad_tol) {
      res.converged = true;
      res.stop_reason = "grad_tol";
      break;
    }
    // two-loop recursion
    VecD q = g;
    std::vector<double> alpha(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      alpha[static_cast<std::size_t>(k)] = rho[static_cast<std::size_t>(k)] * S[static_cast<std::size_t>(k)].dot(q);
      q -= alpha[static_cast<std::size_t>(k)] * Y[static_cast<std::size_t>(k)];
    }
    if (!S.empty()) {
      const double gamma = S.back().dot(Y.back()) / Y.back().squaredNorm();
      q *= gamma;
    } else {
      q *= 1.0 / std::max(1.0, gn);
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * Y[k].dot(q);
      q += S[k] * (alpha[k] - beta);
    }
    VecD d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = -g / std::max(1.0, gn);
      slope = g.dot(d);
    }

    double step = 1.0;
    bool accepted = false;
    VecD xn;
    double fn = fx;
    std::vector<double> gn_buf(n, 0.0);
    for (int b = 0; b <= opts.max_backtracks; ++b) {
      xn = x + step * d;
      fn = f(to_std(xn), gn_buf);
      if (std::isfinite(fn) && fn <= fx + opts.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      res.stop_reason = "line_search_failed";
      res.converged = false;
      break;
    }
    const VecD gnew = to_eigen(gn_buf);
    const VecD s = xn - x;
    const VecD y = gnew - g;
    const double sy = s.dot(y);
    if (sy > 1e-300 && sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    const double decrease = fx - fn;
    x = xn;
    g = gnew;
    fx = fn;
    res.trace.push_back({it + 1, fx, g.norm(), step});
    if (decrease <= 1e-15 * std::max(std::abs(fx), 1e-300)) {
      if (++stall >= opts.stall_iters) {
        res.converged = true;
        res.stop_reason = "stalled";
        ++it;
        break;
      }
    } else {
      stall = 0;
    }
  }
  res.iterations = it;
  res.x = to_std(x);
  res.final_cost = fx;
  res.grad_norm = g.norm();
  return res;
}

}  // namespace mqsp
