#pragma once

/**
 * @file lyapunov.hpp
 * @brief Lyapunov-Krasovskii pairs evaluated along simulated trajectories.
 *
 * W1(t) = V1(t, x(t)), W2(t) = V2(t, x_t), W = W1 + W2. The checks sample W
 * at every stored node from t0 on; at impulse nodes both the left limit
 * (V1 at x(t^-), V2 on the x_{t^-} window) and the post-jump value are used.
 */

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "impdelay/core.hpp"
#include "impdelay/schedule.hpp"

namespace impdelay {

struct LyapunovPair {
  std::function<double(Time, const State&)> v1;
  std::function<double(Time, const HistoryFunction&)> v2;
  /// Inverse of the class-K-infinity lower bound alpha1 of V1.
  std::function<double(double)> alpha1_inv;
};

struct WValues {
  double w1 = 0.0;
  double w2 = 0.0;
  double w = 0.0;
};

inline WValues evaluate_W(const LyapunovPair& pair, const Trajectory& traj, Time t, Side side = Side::at) {
  auto window = traj.window(t, side);
  const State x = side == Side::before ? traj.left_limit(t) : traj.value(t);
  WValues r;
  r.w1 = pair.v1(t, x);
  r.w2 = pair.v2 ? pair.v2(t, window) : 0.0;
  r.w = r.w1 + r.w2;
  return r;
}

/// One sampled point of W along a trajectory.
struct WSample {
  Time t;
  Side side;  // before = left limit at an impulse node
  State x;
  WValues w;
  std::size_t n_since_t0;  // N(t, t0), with the impulse at t excluded for left limits
};

/// W at every node from t0 on; impulse nodes contribute their left limit first.
inline std::vector<WSample> sample_W(const LyapunovPair& pair, const Trajectory& traj) {
  std::vector<WSample> out;
  const Samples& s = traj.samples();
  std::size_t count = 0;
  for (std::size_t i = traj.first_solution_index(); i < s.size(); ++i) {
    const auto& node = s[i];
    if (node.t < traj.t0()) continue;
    if (node.left && node.t > traj.t0()) {
      out.push_back(WSample{node.t, Side::before, *node.left, evaluate_W(pair, traj, node.t, Side::before), count});
      ++count;
    }
    out.push_back(WSample{node.t, Side::at, node.x, evaluate_W(pair, traj, node.t, Side::at), count});
  }
  return out;
}

struct BoundVerdict {
  bool holds = true;
  /// max over samples of value/bound - 1 (negative when every sample is strictly inside).
  double max_violation = -std::numeric_limits<double>::infinity();
  Time at = 0.0;
  std::size_t samples = 0;
};

namespace detail {

inline void record(BoundVerdict& v, double value, double bound, Time t, double tol) {
  ++v.samples;
  double rel;
  if (bound > 0.0) {
    rel = value / bound - 1.0;
  } else {
    rel = value > 0.0 ? std::numeric_limits<double>::infinity() : -1.0;
  }
  if (rel > v.max_violation) {
    v.max_violation = rel;
    v.at = t;
  }
  if (rel > tol) v.holds = false;
}

}  // namespace detail

/// W(t0) e^{-sigma N(t, t0) - c (t - t0)}
inline double envelope_bound(double w0, double sigma, double c, std::size_t n, double elapsed) {
  return w0 * std::exp(-sigma * static_cast<double>(n) - c * elapsed);
}

/// Checks W(t) <= (1 + tol) W(t0) e^{-sigma N(t, t0) - c (t - t0)} at every sampled node.
inline BoundVerdict check_envelope(const LyapunovPair& pair, const Trajectory& traj, const ImpulseSchedule& sched,
                                   double sigma, double c, double tol = 0.05) {
  const auto samples = sample_W(pair, traj);
  BoundVerdict v;
  if (samples.empty()) return v;
  const double w0 = samples.front().w.w;
  const Time t0 = traj.t0();
  for (const auto& smp : samples) {
    std::size_t n = count_impulses(sched, t0, smp.t);
    if (smp.side == Side::before && n > 0) --n;
    detail::record(v, smp.w.w, envelope_bound(w0, sigma, c, n, smp.t - t0), smp.t, tol);
  }
  return v;
}

/// alpha1^{-1}(e^mu W(t0) e^{-lambda (t - t0)})
inline double norm_bound(const LyapunovPair& pair, double w0, double mu, double lambda, double elapsed) {
  return pair.alpha1_inv(std::exp(mu) * w0 * std::exp(-lambda * elapsed));
}

/// Checks ||x(t)|| <= (1 + tol) alpha1^{-1}(e^mu W(t0) e^{-lambda (t - t0)}) at every sampled node.
inline BoundVerdict check_final_bound(const LyapunovPair& pair, const Trajectory& traj, double mu, double lambda,
                                      double tol = 0.05) {
  const auto samples = sample_W(pair, traj);
  BoundVerdict v;
  if (samples.empty()) return v;
  const double w0 = samples.front().w.w;
  for (const auto& smp : samples) {
    detail::record(v, norm2(smp.x), norm_bound(pair, w0, mu, lambda, smp.t - traj.t0()), smp.t, tol);
  }
  return v;
}

struct DiniVerdict {
  bool holds = true;
  /// max of (W(t+h) - W(t))/h + c W(t); about zero when the rate is exact.
  double worst_excess = -std::numeric_limits<double>::infinity();
  Time at = 0.0;
};

/// Forward-difference check of D+W <= -c W between impulses with slack tol (1 + W).
inline DiniVerdict dini_rate_check(const LyapunovPair& pair, const Trajectory& traj, const ImpulseSchedule& sched,
                                   double c, double tol = 1e-2) {
  DiniVerdict v;
  const Samples& s = traj.samples();
  std::size_t i = traj.first_solution_index();
  if (s[i].t < traj.t0()) ++i;
  if (i >= s.size()) return v;
  double w_prev = evaluate_W(pair, traj, s[i].t).w;
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    const double w_next = evaluate_W(pair, traj, s[j].t).w;
    if (count_impulses(sched, s[j - 1].t, s[j].t) == 0) {
      const double h = s[j].t - s[j - 1].t;
      const double excess = (w_next - w_prev) / h + c * w_prev;
      if (excess > v.worst_excess) {
        v.worst_excess = excess;
        v.at = s[j - 1].t;
      }
      if (excess > tol * (1.0 + w_prev)) v.holds = false;
    }
    w_prev = w_next;
  }
  return v;
}

/// Spot check of V2(t, x_t) <= kappa sup_{s in [-tau, 0]} V1(t + s, x(t + s)) over window nodes.
inline BoundVerdict check_functional_bound(const LyapunovPair& pair, const Trajectory& traj, double kappa,
                                           double tol = 1e-9) {
  BoundVerdict v;
  const Samples& s = traj.samples();
  for (std::size_t i = traj.first_solution_index(); i < s.size(); ++i) {
    const Time t = s[i].t;
    if (t < traj.t0()) continue;
    auto window = traj.window(t, Side::at);
    double sup_v1 = 0.0;
    window.for_each_node([&](double off, const State* left, const State& x) {
      sup_v1 = std::max(sup_v1, pair.v1(t + off, x));
      if (left) sup_v1 = std::max(sup_v1, pair.v1(t + off, *left));
    });
    const double lhs = pair.v2 ? pair.v2(t, window) : 0.0;
    if (kappa * sup_v1 == 0.0 && lhs == 0.0) {
      ++v.samples;
      continue;
    }
    detail::record(v, lhs, kappa * sup_v1, t, tol);
  }
  return v;
}

/// Spot check of V1 after each jump against rho1 V1(t^-) + rho2 sup over the x_{t^-} window.
inline BoundVerdict check_jump_bound(const LyapunovPair& pair, const Trajectory& traj, double rho1, double rho2,
                                     double tol = 1e-9) {
  BoundVerdict v;
  const Samples& s = traj.samples();
  for (std::size_t i = traj.first_solution_index(); i < s.size(); ++i) {
    const auto& node = s[i];
    if (!node.left || node.t <= traj.t0()) continue;
    auto window = traj.window(node.t, Side::before);
    double sup_v1 = 0.0;
    window.for_each_node([&](double off, const State* left, const State& x) {
      sup_v1 = std::max(sup_v1, pair.v1(node.t + off, x));
      if (left) sup_v1 = std::max(sup_v1, pair.v1(node.t + off, *left));
    });
    const double bound = rho1 * pair.v1(node.t, *node.left) + rho2 * sup_v1;
    detail::record(v, pair.v1(node.t, node.x), bound, node.t, tol);
  }
  return v;
}

/// Diagnostic CSV: t, W1, W2, W, envelope_bound, norm_bound (two rows per impulse, left limit first).
inline void write_lyapunov_csv(std::ostream& os, const LyapunovPair& pair, const Trajectory& traj, double sigma,
                               double c, double mu, double lambda) {
  const auto samples = sample_W(pair, traj);
  const auto prec = os.precision(17);
  os << "t,W1,W2,W,envelope_bound,norm_bound\n";
  if (!samples.empty()) {
    const double w0 = samples.front().w.w;
    for (const auto& smp : samples) {
      const double elapsed = smp.t - traj.t0();
      os << smp.t << ',' << smp.w.w1 << ',' << smp.w.w2 << ',' << smp.w.w << ','
         << envelope_bound(w0, sigma, c, smp.n_since_t0, elapsed) << ',' << norm_bound(pair, w0, mu, lambda, elapsed)
         << '\n';
    }
  }
  os.precision(prec);
}

}  // namespace impdelay
