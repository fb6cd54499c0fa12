#pragma once

/**
 * @file core.hpp
 * @brief States, piecewise right-continuous histories, trajectories and system definitions.
 *
 * Every function of time handled by the library (initial data, solution
 * records, delay windows) is backed by a Samples store: strictly increasing
 * nodes, linear interpolation between them, and an optional left-limit value
 * at nodes where the function jumps. Values at a jump node are the
 * right-continuous ones; the left limit is kept next to it.
 *
 * A HistoryFunction is a window [anchor - tau, anchor] of such a store,
 * re-indexed to offsets in [-tau, 0]. Windows taken with Side::before read
 * the left limit at offset 0 (the x_{t^-} convention used by jump maps).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "impdelay/errors.hpp"

namespace impdelay {

using Time = double;
using State = std::vector<double>;

/// Which value a window reports at offset 0 when the anchor is a jump time.
enum class Side { at, before };

inline bool all_finite(const State& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

inline double norm2(const State& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dot(const State& a, const State& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// y += alpha * x
inline void axpy(double alpha, const State& x, State& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline State lerp(const State& a, const State& b, double w) {
  State out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + w * (b[i] - a[i]);
  return out;
}

/// Piecewise-linear sample store with right-continuous jumps.
class Samples {
 public:
  struct Node {
    Time t;
    State x;                  // right-continuous value
    std::optional<State> left;  // left limit, present only where the function jumps
  };

  explicit Samples(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& operator[](std::size_t i) const { return nodes_[i]; }
  const Node& back() const { return nodes_.back(); }
  Time front_time() const { return nodes_.front().t; }
  Time back_time() const { return nodes_.back().t; }

  void reserve(std::size_t n) { nodes_.reserve(n); }

  void append(Time t, State x) {
    if (x.size() != dim_) throw DimensionError("sample dimension mismatch");
    if (!nodes_.empty() && !(t > nodes_.back().t)) {
      std::ostringstream os;
      os << "sample times must be strictly increasing (got " << t << " after " << nodes_.back().t << ")";
      throw DomainError(os.str());
    }
    nodes_.push_back(Node{t, std::move(x), std::nullopt});
  }

  /// Records a jump at the last node: the current value becomes the left limit.
  void jump_back(State post) {
    Node& n = nodes_.back();
    if (!n.left) n.left = n.x;
    n.x = std::move(post);
  }

  /// Attaches an explicit left limit to node i.
  void set_left(std::size_t i, State left) { nodes_.at(i).left = std::move(left); }

  void pop_back() { nodes_.pop_back(); }

  /// Index of the last node with time <= t. Requires front_time() <= t.
  std::size_t cell(Time t) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                               [](Time v, const Node& n) { return v < n.t; });
    return static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
  }

  /// Exact index of the node at time t, if there is one.
  std::optional<std::size_t> find(Time t) const {
    if (nodes_.empty() || t < front_time() || t > back_time()) return std::nullopt;
    std::size_t i = cell(t);
    if (nodes_[i].t == t) return i;
    return std::nullopt;
  }

  /// t moved onto a node lying within round-off of it (t_k + lag - lag need not equal t_k).
  Time snap(Time t) const {
    if (nodes_.empty()) return t;
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol, [](const Node& n, Time v) { return n.t < v; });
    if (it != nodes_.end() && it->t <= t + tol) return it->t;
    return t;
  }

  State value(Time t) const {
    check_covered(t);
    std::size_t i = cell(t);
    const Node& a = nodes_[i];
    if (a.t == t || i + 1 == nodes_.size()) return a.x;
    const Node& b = nodes_[i + 1];
    const State& right_end = b.left ? *b.left : b.x;
    return lerp(a.x, right_end, (t - a.t) / (b.t - a.t));
  }

  State left_limit(Time t) const {
    check_covered(t);
    if (t == front_time()) throw DomainError("left limit requested at the first sample (no left neighbourhood)");
    std::size_t i = cell(t);
    const Node& a = nodes_[i];
    if (a.t == t) return a.left ? *a.left : a.x;
    return value(t);
  }

 private:
  void check_covered(Time t) const {
    if (nodes_.empty() || t < front_time() || t > back_time()) {
      std::ostringstream os;
      os << "time " << t << " outside stored span";
      if (!nodes_.empty()) os << " [" << front_time() << ", " << back_time() << "]";
      throw CoverageError(os.str());
    }
  }

  std::size_t dim_;
  std::vector<Node> nodes_;
};

/// An element of PC_tau: a piecewise right-continuous function on [-tau, 0].
///
/// Either owns its samples (constructed from a grid) or shares the store of a
/// trajectory. Non-owning views are created only by the integrator for the
/// duration of a single map evaluation.
class HistoryFunction {
 public:
  struct Jump {
    double offset;
    State left;
  };

  /// Samples on a strictly increasing grid from -tau to 0 with optional jump markers at grid offsets.
  HistoryFunction(std::vector<double> grid, std::vector<State> values, std::vector<Jump> jumps = {}) {
    if (grid.size() < 2) throw DomainError("history grid needs at least two nodes");
    if (grid.size() != values.size()) throw DimensionError("history grid and values differ in length");
    if (grid.back() != 0.0) throw DomainError("history grid must end at offset 0");
    if (!(grid.front() < 0.0)) throw DomainError("history grid must start at -tau < 0");
    auto store = std::make_shared<Samples>(values.front().size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!all_finite(values[i])) throw DomainError("history values must be finite");
      store->append(grid[i], std::move(values[i]));
    }
    for (auto& j : jumps) {
      auto idx = store->find(j.offset);
      if (!idx) throw DomainError("history jump offset is not a grid node");
      if (*idx == 0) throw DomainError("history jump at -tau has no left neighbourhood");
      if (j.left.size() != store->dim()) throw DimensionError("jump left limit dimension mismatch");
      store->set_left(*idx, std::move(j.left));
    }
    tau_ = -grid.front();
    anchor_ = 0.0;
    side_ = Side::at;
    store_ = store.get();
    owner_ = std::move(store);
  }

  /// A window [anchor - tau, anchor] of a shared store.
  HistoryFunction(std::shared_ptr<const Samples> store, Time anchor, double tau, Side side)
      : store_(store.get()), owner_(std::move(store)), anchor_(anchor), tau_(tau), side_(side) {
    check_window();
  }

  /// Non-owning window; the store must outlive the view.
  static HistoryFunction view(const Samples& store, Time anchor, double tau, Side side) {
    HistoryFunction h;
    h.store_ = &store;
    h.anchor_ = anchor;
    h.tau_ = tau;
    h.side_ = side;
    h.check_window();
    return h;
  }

  static HistoryFunction constant(const State& value, double tau) {
    return HistoryFunction({-tau, 0.0}, {value, value});
  }

  double tau() const noexcept { return tau_; }
  std::size_t dim() const noexcept { return store_->dim(); }
  Side side() const noexcept { return side_; }

  /// x_t(s), or for Side::before the left limit x(t + s - 0) at every offset.
  State eval(double s) const {
    s = checked_offset(s);
    const Time t = store_->snap(anchor_ + s);
    if (side_ == Side::before && t > store_->front_time()) return store_->left_limit(t);
    return store_->value(t);
  }

  State left_limit(double s) const {
    s = checked_offset(s);
    if (s == -tau_) throw DomainError("left limit at -tau is undefined");
    return store_->left_limit(anchor_ + s);
  }

  /// Visits the nodes of the window restricted to [from, 0] in increasing order:
  /// f(offset, left_limit_or_null, value). The first node is the clip point itself.
  template <class F>
  void for_each_node(F&& f, double from) const {
    from = checked_offset(from);
    const Time lo = anchor_ + from;
    State first = from == 0.0 ? eval(0.0) : store_->value(lo);
    f(from, static_cast<const State*>(nullptr), first);
    if (from == 0.0) return;
    const auto& nodes = store_->nodes();
    std::size_t i = store_->cell(lo) + 1;
    for (; i < nodes.size() && nodes[i].t < anchor_; ++i) {
      const auto& n = nodes[i];
      f(n.t - anchor_, n.left ? &*n.left : static_cast<const State*>(nullptr), n.x);
    }
    if (side_ == Side::before) {
      State end = store_->left_limit(anchor_);
      f(0.0, static_cast<const State*>(nullptr), end);
    } else {
      const State* left = nullptr;
      if (i < nodes.size() && nodes[i].t == anchor_ && nodes[i].left) left = &*nodes[i].left;
      State end = store_->value(anchor_);
      f(0.0, left, end);
    }
  }

  template <class F>
  void for_each_node(F&& f) const {
    for_each_node(std::forward<F>(f), -tau_);
  }

  /// Composite trapezoid of integrand(offset, x) over [from, 0]; cells are split
  /// at interior jumps with the left limit closing the left sub-cell.
  template <class F>
  double integrate_scalar(F&& integrand, double from) const {
    double acc = 0.0;
    bool started = false;
    double s_prev = 0.0, f_prev = 0.0;
    for_each_node(
        [&](double s, const State* left, const State& x) {
          if (started) {
            double f_end = integrand(s, left ? *left : x);
            acc += 0.5 * (s - s_prev) * (f_prev + f_end);
          }
          started = true;
          s_prev = s;
          f_prev = integrand(s, x);
        },
        from);
    return acc;
  }

  template <class F>
  double integrate_scalar(F&& integrand) const {
    return integrate_scalar(std::forward<F>(integrand), -tau_);
  }

  /// Trapezoid integral of the state over [-window, 0].
  State integral(double window) const {
    State acc(dim(), 0.0);
    bool started = false;
    double s_prev = 0.0;
    State x_prev;
    for_each_node(
        [&](double s, const State* left, const State& x) {
          if (started) {
            const State& end = left ? *left : x;
            const double half = 0.5 * (s - s_prev);
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += half * (x_prev[k] + end[k]);
          }
          started = true;
          s_prev = s;
          x_prev = x;
        },
        -window);
    return acc;
  }

  State integral() const { return integral(tau_); }

  /// Offsets of the nodes visited by for_each_node (jump offsets appear once).
  std::vector<double> grid() const {
    std::vector<double> g;
    for_each_node([&](double s, const State*, const State&) { g.push_back(s); });
    return g;
  }

  /// Interior offsets where the window jumps, together with their left limits.
  std::vector<Jump> jumps() const {
    std::vector<Jump> out;
    for_each_node([&](double s, const State* left, const State&) {
      if (left) out.push_back(Jump{s, *left});
    });
    return out;
  }

  /// sup over the window nodes of ||psi(s)||, both limits included.
  double sup_norm() const {
    double m = 0.0;
    for_each_node([&](double, const State* left, const State& x) {
      m = std::max(m, norm2(x));
      if (left) m = std::max(m, norm2(*left));
    });
    return m;
  }

 private:
  HistoryFunction() = default;

  void check_window() const {
    if (!(tau_ > 0.0)) throw DomainError("history window needs tau > 0");
    if (store_->empty() || anchor_ - tau_ < store_->front_time() - 1e-12 * tau_ || anchor_ > store_->back_time()) {
      std::ostringstream os;
      os << "window [" << anchor_ - tau_ << ", " << anchor_ << "] not covered by stored samples";
      throw CoverageError(os.str());
    }
  }

  // Offsets a hair outside [-tau, 0] from floating-point arithmetic are clamped.
  double checked_offset(double s) const {
    const double slack = 1e-12 * tau_;
    if (!(s >= -tau_ - slack && s <= slack)) {
      std::ostringstream os;
      os << "offset " << s << " outside [-" << tau_ << ", 0]";
      throw DomainError(os.str());
    }
    if (s > 0.0) return 0.0;
    if (s < -tau_) return -tau_;
    // The left end of a trajectory window may sit a rounding error below the first sample.
    if (anchor_ + s < store_->front_time()) return store_->front_time() - anchor_;
    return s;
  }

  const Samples* store_ = nullptr;
  std::shared_ptr<const Samples> owner_;
  Time anchor_ = 0.0;
  double tau_ = 0.0;
  Side side_ = Side::at;
};

/// Maps of the impulsive system: the flow field f(t, x_t) and the jump map g(t, x_{t^-}).
/// The history argument is only valid for the duration of the call.
using SystemMap = std::function<State(Time, const HistoryFunction&)>;

/// The pair (f, g) with dimension and maximum delay.
struct SystemDefinition {
  SystemDefinition(std::size_t dimension_, double tau_, SystemMap field_, SystemMap jump_)
      : dimension(dimension_), tau(tau_), field(std::move(field_)), jump(std::move(jump_)) {
    if (dimension == 0) throw DomainError("system dimension must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("maximum delay tau must be positive");
    if (!field || !jump) throw DomainError("system maps must be set");
    const auto zero = HistoryFunction::constant(State(dimension, 0.0), tau);
    probe_zero(field(0.0, zero), "flow field");
    probe_zero(jump(0.0, zero), "jump map");
  }

  std::size_t dimension;
  double tau;
  SystemMap field;
  SystemMap jump;
  /// Point delays read by the flow field. Jumps reappear in the field at t_k + lag, so the integrator steps to those times.
  std::vector<double> lags;

 private:
  void probe_zero(const State& v, const char* what) const {
    if (v.size() != dimension) throw DimensionError(std::string(what) + " returns a vector of the wrong dimension");
    for (double c : v) {
      if (std::abs(c) > 1e-12) throw DomainError(std::string(what) + " does not vanish on the zero history");
    }
  }
};

/// Dense solution record: the initial history followed by the simulated nodes.
class Trajectory {
 public:
  Trajectory(Time t0, HistoryFunction initial, std::shared_ptr<const Samples> store)
      : t0_(t0), tau_(initial.tau()), initial_(std::move(initial)), store_(std::move(store)) {
    if (store_->empty() || store_->front_time() > t0_ - tau_ + 1e-12 * tau_ || store_->back_time() < t0_) {
      throw CoverageError("trajectory store must cover [t0 - tau, t0]");
    }
  }

  /// A trajectory with no dynamics: the history embedded at t0.
  static Trajectory from_history(const HistoryFunction& phi, Time t0) {
    auto store = std::make_shared<Samples>(phi.dim());
    phi.for_each_node([&](double s, const State* left, const State& x) {
      store->append(t0 + s, x);
      if (left) store->set_left(store->size() - 1, *left);
    });
    return Trajectory(t0, phi, std::move(store));
  }

  Time t0() const noexcept { return t0_; }
  Time t_end() const { return store_->back_time(); }
  double tau() const noexcept { return tau_; }
  std::size_t dim() const { return store_->dim(); }
  const Samples& samples() const noexcept { return *store_; }
  std::shared_ptr<const Samples> shared_samples() const noexcept { return store_; }
  const HistoryFunction& initial_history() const noexcept { return initial_; }

  State value(Time t) const { return store_->value(t); }
  State left_limit(Time t) const { return store_->left_limit(t); }

  /// x_t (Side::at) or x_{t^-} (Side::before) over a window of length tau.
  HistoryFunction window(Time t, Side side) const { return window(t, side, tau_); }

  HistoryFunction window(Time t, Side side, double length) const {
    if (t < t0_) throw CoverageError("window anchor before t0");
    if (t > t_end()) throw CoverageError("window anchor after the end of the trajectory");
    if (t - length < store_->front_time() - 1e-12 * length) throw CoverageError("window extends before t0 - tau");
    return HistoryFunction(store_, t, length, side);
  }

  /// Node indices with time >= t0.
  std::size_t first_solution_index() const {
    auto i = store_->cell(t0_);
    return i;
  }

  std::vector<Time> impulse_times() const {
    std::vector<Time> out;
    for (std::size_t i = first_solution_index(); i < store_->size(); ++i) {
      if ((*store_)[i].left) out.push_back((*store_)[i].t);
    }
    return out;
  }

 private:
  Time t0_;
  double tau_;
  HistoryFunction initial_;
  std::shared_ptr<const Samples> store_;
};

}  // namespace impdelay
