#pragma once

/**
 * @file integrator.hpp
 * @brief Method-of-steps RK4 for impulsive delay systems with prescheduled impulse times.
 *
 * Between impulses the flow is advanced with classical RK4. Delayed reads at
 * stage times are served from the solution stored so far by linear
 * interpolation; the stage value itself is pushed as a provisional node so a
 * read that falls inside the current step interpolates between the step start
 * and the stage value. Impulse times are integration nodes; at each one the
 * jump map sees the x_{t^-} window and the node keeps both limits.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "impdelay/core.hpp"
#include "impdelay/schedule.hpp"

namespace impdelay {

struct SimConfig {
  double base_step = 1e-3;
  Time t_end = 1.0;
  /// Keep every n-th continuous node (impulse nodes and the final node are always kept).
  std::size_t record_stride = 1;
  /// Component magnitude treated as blow-up.
  double divergence_threshold = 1e12;
};

inline void validate(const SimConfig& cfg, const SystemDefinition& sys, const ImpulseSchedule& sched, Time t0) {
  if (!(cfg.base_step > 0.0) || !std::isfinite(cfg.base_step)) throw ConfigError("base_step must be positive");
  if (cfg.record_stride == 0) throw ConfigError("record_stride must be positive");
  if (!(cfg.t_end > t0)) throw ConfigError("t_end must be after t0");
  if (cfg.base_step > sys.tau / 4.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "base_step " << cfg.base_step << " exceeds tau/4 = " << sys.tau / 4.0;
    throw ConfigError(os.str());
  }
  const double gap = sched.min_gap();
  if (std::isfinite(gap) && gap > 0.0 && cfg.base_step > gap / 2.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "base_step " << cfg.base_step << " exceeds half the minimal impulse gap (" << gap / 2.0 << ")";
    throw ConfigError(os.str());
  }
}

namespace detail {

inline void check_state(const State& x, Time t, double threshold) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > threshold) {
      std::ostringstream os;
      os << "solution diverged at t = " << t;
      throw DivergenceError(os.str(), t);
    }
  }
}

inline State eval_field(const SystemDefinition& sys, const Samples& store, Time t, Side side = Side::at) {
  auto h = HistoryFunction::view(store, t, sys.tau, side);
  State v = sys.field(t, h);
  if (v.size() != sys.dimension) throw DimensionError("flow field returned a vector of the wrong dimension");
  return v;
}

inline void apply_jump(const SystemDefinition& sys, Samples& store, Time t, double threshold) {
  auto h = HistoryFunction::view(store, t, sys.tau, Side::before);
  State delta = sys.jump(t, h);
  if (delta.size() != sys.dimension) throw DimensionError("jump map returned a vector of the wrong dimension");
  State post = store.back().x;
  for (std::size_t i = 0; i < post.size(); ++i) post[i] += delta[i];
  check_state(post, t, threshold);
  store.jump_back(std::move(post));
}

/// One RK4 step from the last stored node to t + h; the new node is appended.
inline void rk4_step(const SystemDefinition& sys, Samples& store, double h, double threshold) {
  const Time t = store.back_time();
  const State x = store.back().x;
  const std::size_t n = x.size();
  State y(n);

  const State k1 = eval_field(sys, store, t);

  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k1[i];
  store.append(t + 0.5 * h, y);
  const State k2 = eval_field(sys, store, t + 0.5 * h);
  store.pop_back();

  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k2[i];
  store.append(t + 0.5 * h, y);
  const State k3 = eval_field(sys, store, t + 0.5 * h);
  store.pop_back();

  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k3[i];
  store.append(t + h, y);
  // the last stage is a limit from inside the step: lagged reads landing on a jump take its left limit
  const State k4 = eval_field(sys, store, t + h, Side::before);
  store.pop_back();

  State next(n);
  for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  check_state(next, t + h, threshold);
  store.append(t + h, std::move(next));
}

inline Trajectory thin(const Trajectory& traj, std::size_t stride) {
  if (stride <= 1) return traj;
  const Samples& src = traj.samples();
  auto out = std::make_shared<Samples>(src.dim());
  const std::size_t first = traj.first_solution_index();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto& n = src[i];
    const bool keep = i <= first || n.left || i + 1 == src.size() || (i - first) % stride == 0;
    if (!keep) continue;
    out->append(n.t, n.x);
    if (n.left) out->set_left(out->size() - 1, *n.left);
  }
  return Trajectory(traj.t0(), traj.initial_history(), std::move(out));
}

}  // namespace detail

/// Simulates x' = f(t, x_t) between impulses and x(t_k) = x(t_k^-) + g(t_k, x_{t_k^-}) at impulses.
inline Trajectory simulate(const SystemDefinition& sys, const ImpulseSchedule& sched, const HistoryFunction& phi, Time t0,
                           const SimConfig& cfg) {
  validate(cfg, sys, sched, t0);
  if (phi.dim() != sys.dimension) throw DimensionError("initial history dimension differs from the system");
  if (std::abs(phi.tau() - sys.tau) > 1e-12 * sys.tau) throw DomainError("initial history must live on [-tau, 0]");
  if (auto first = sched.first_time(); first && *first < t0) {
    throw ScheduleError("impulse time before t0");
  }
  if (cfg.t_end > sched.horizon()) throw HorizonError("simulation end beyond the schedule horizon");

  auto store = std::make_shared<Samples>(sys.dimension);
  store->reserve(static_cast<std::size_t>((cfg.t_end - t0) / cfg.base_step) + 64);
  phi.for_each_node([&](double s, const State* left, const State& x) {
    store->append(t0 + s, x);
    if (left) store->set_left(store->size() - 1, *left);
  });

  const auto impulses = sched.times_in(t0 - 1.0, cfg.t_end);
  std::size_t next_impulse = 0;
  if (next_impulse < impulses.size() && impulses[next_impulse] == t0) {
    detail::apply_jump(sys, *store, t0, cfg.divergence_threshold);
    ++next_impulse;
  }

  // segment ends: impulse times, and the times where a lagged read crosses a jump
  std::vector<std::pair<Time, bool>> stops;
  for (std::size_t k = next_impulse; k < impulses.size(); ++k) stops.emplace_back(impulses[k], true);
  std::vector<Time> sources(impulses.begin(), impulses.end());
  phi.for_each_node([&](double s, const State* left, const State&) {
    if (left) sources.push_back(t0 + s);
  });
  for (double lag : sys.lags) {
    for (Time src : sources) {
      const Time b = src + lag;
      if (b > t0 && b < cfg.t_end) stops.emplace_back(b, false);
    }
  }
  stops.emplace_back(cfg.t_end, false);
  std::sort(stops.begin(), stops.end(), [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); });
  stops.erase(std::unique(stops.begin(), stops.end(), [](const auto& a, const auto& b) { return a.first == b.first; }), stops.end());

  Time seg_start = t0;
  for (const auto& [seg_end, is_impulse] : stops) {
    if (seg_end > cfg.t_end) break;
    const double len = seg_end - seg_start;
    if (len > 0.0) {
      const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(len / cfg.base_step - 1e-9)));
      const double h = len / static_cast<double>(steps);
      for (std::size_t i = 1; i <= steps; ++i) {
        const Time target = i == steps ? seg_end : seg_start + static_cast<double>(i) * h;
        detail::rk4_step(sys, *store, target - store->back_time(), cfg.divergence_threshold);
        // land exactly on the grid point, not on the accumulated sum
        if (store->back_time() != target) {
          State x = store->back().x;
          store->pop_back();
          store->append(target, std::move(x));
        }
      }
    }
    if (is_impulse) detail::apply_jump(sys, *store, seg_end, cfg.divergence_threshold);
    seg_start = seg_end;
  }

  Trajectory traj(t0, phi, std::move(store));
  return detail::thin(traj, cfg.record_stride);
}

/// Trapezoid integral of x over [t - tau, t] (left limit closing cells at interior jumps).
inline State distributed_integral(const Trajectory& traj, Time t, double tau) {
  return traj.window(t, Side::at, tau).integral();
}

struct ConvergenceReport {
  std::vector<double> steps;
  std::vector<State> finals;
  /// orders[i] = log(|x_i - x_{i+1}| / |x_{i+1} - x_{i+2}|) / log(h_i / h_{i+1})
  std::vector<double> orders;
  double min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return m;
  }
};

/// Observed convergence order of x(t_end) from runs at geometrically decreasing steps.
inline ConvergenceReport convergence_probe(const SystemDefinition& sys, const ImpulseSchedule& sched,
                                           const HistoryFunction& phi, Time t0, Time t_end,
                                           const std::vector<double>& steps) {
  if (steps.size() < 3) throw ConfigError("convergence probe needs at least three step sizes");
  ConvergenceReport rep;
  rep.steps = steps;
  for (double h : steps) {
    SimConfig cfg;
    cfg.base_step = h;
    cfg.t_end = t_end;
    auto traj = simulate(sys, sched, phi, t0, cfg);
    rep.finals.push_back(traj.value(t_end));
  }
  auto diff = [](const State& a, const State& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  for (std::size_t i = 0; i + 2 < steps.size(); ++i) {
    const double e0 = diff(rep.finals[i], rep.finals[i + 1]);
    const double e1 = diff(rep.finals[i + 1], rep.finals[i + 2]);
    rep.orders.push_back(std::log(e0 / e1) / std::log(steps[i] / steps[i + 1]));
  }
  return rep;
}

}  // namespace impdelay
