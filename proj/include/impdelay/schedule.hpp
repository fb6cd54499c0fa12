#pragma once

/**
 * @file schedule.hpp
 * @brief Impulse time sequences, the counting function N(t, s) and dwell-time checks.
 *
 * All suprema over pairs t0 <= s < t <= horizon are computed exactly by
 * enumerating the cells where N(t, s) is constant. Inside such a cell the
 * objective -sigma*N - a*(t - s) is affine in the length t - s, so only the
 * shortest and longest lengths of the cell matter:
 *   shortest: s -> t_j^- and t = t_i (zero-length approach to the first counted impulse),
 *   longest:  s = t_{j-1} (excluded by the half-open interval) and t -> t_{i+1}^-, or t = horizon.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "impdelay/core.hpp"

namespace impdelay {

/// Strictly increasing impulse times t_k, periodic or given as an explicit finite list.
///
/// Periodic schedules generate t = origin + j*period + offset for j >= 0 and
/// offsets in (0, period]; explicit lists answer queries up to their horizon.
class ImpulseSchedule {
 public:
  struct Pattern {
    std::vector<double> offsets;
    double period;
    Time origin;
  };
  struct List {
    std::vector<Time> times;
    Time horizon;
  };

  static ImpulseSchedule periodic(std::vector<double> offsets, double period, Time origin = 0.0) {
    if (!(period > 0.0) || !std::isfinite(period)) throw ScheduleError("period must be positive");
    if (offsets.empty()) throw ScheduleError("periodic pattern needs at least one offset");
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (!(offsets[i] > 0.0 && offsets[i] <= period)) throw ScheduleError("pattern offsets must lie in (0, period]");
      if (i > 0 && !(offsets[i] > offsets[i - 1])) throw ScheduleError("pattern offsets must be strictly increasing");
    }
    ImpulseSchedule s;
    s.data_ = Pattern{std::move(offsets), period, origin};
    return s;
  }

  static ImpulseSchedule explicit_list(std::vector<Time> times, Time horizon) {
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!(times[i] > times[i - 1])) throw ScheduleError("impulse times must be strictly increasing");
    }
    if (!times.empty() && horizon < times.back()) throw ScheduleError("horizon precedes the last impulse time");
    if (!std::isfinite(horizon)) throw ScheduleError("explicit schedules need a finite horizon");
    ImpulseSchedule s;
    s.data_ = List{std::move(times), horizon};
    return s;
  }

  /// Uniform schedule t_k = origin + k*period.
  static ImpulseSchedule uniform(double period, Time origin = 0.0) { return periodic({period}, period, origin); }

  bool is_periodic() const noexcept { return std::holds_alternative<Pattern>(data_); }
  const Pattern& pattern() const { return std::get<Pattern>(data_); }
  const List& list() const { return std::get<List>(data_); }

  /// Last time queries may reach; infinity for periodic schedules.
  Time horizon() const {
    return is_periodic() ? std::numeric_limits<double>::infinity() : list().horizon;
  }

  /// Earliest impulse time, if any.
  std::optional<Time> first_time() const {
    if (is_periodic()) return time_of(0, 0);
    if (list().times.empty()) return std::nullopt;
    return list().times.front();
  }

  /// Number of impulse times <= t.
  std::size_t count_upto(Time t) const {
    if (!is_periodic()) {
      check_horizon(t);
      const auto& ts = list().times;
      return static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    }
    const auto& p = pattern();
    if (t <= p.origin) return 0;
    const double m = std::floor((t - p.origin) / p.period);
    const long long base = std::max<long long>(0, static_cast<long long>(m) - 1);
    std::size_t n = static_cast<std::size_t>(base) * p.offsets.size();
    for (long long j = base; j <= static_cast<long long>(m) + 1; ++j) {
      for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        if (time_of(j, i) <= t) ++n;
      }
    }
    return n;
  }

  /// Impulse times in (a, b].
  std::vector<Time> times_in(Time a, Time b) const {
    std::vector<Time> out;
    if (!(b > a)) return out;
    if (!is_periodic()) {
      check_horizon(b);
      for (Time t : list().times) {
        if (t > a && t <= b) out.push_back(t);
      }
      return out;
    }
    const auto& p = pattern();
    long long j = std::max<long long>(0, static_cast<long long>(std::floor((a - p.origin) / p.period)) - 1);
    for (;; ++j) {
      if (time_of(j, 0) > b) break;
      for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        const Time t = time_of(j, i);
        if (t > a && t <= b) out.push_back(t);
      }
    }
    return out;
  }

  /// First impulse time strictly after t, or nullopt past the end of an explicit list.
  std::optional<Time> next_after(Time t) const {
    if (!is_periodic()) {
      const auto& ts = list().times;
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      if (it == ts.end()) return std::nullopt;
      return *it;
    }
    const auto& p = pattern();
    long long j = std::max<long long>(0, static_cast<long long>(std::floor((t - p.origin) / p.period)) - 1);
    for (;; ++j) {
      for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        const Time c = time_of(j, i);
        if (c > t) return c;
      }
    }
  }

  /// Minimal gap between consecutive impulses (infinity with fewer than two impulses).
  double min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    if (is_periodic()) {
      const auto& p = pattern();
      for (std::size_t i = 1; i < p.offsets.size(); ++i) g = std::min(g, p.offsets[i] - p.offsets[i - 1]);
      g = std::min(g, p.period - p.offsets.back() + p.offsets.front());
      return g;
    }
    const auto& ts = list().times;
    for (std::size_t i = 1; i < ts.size(); ++i) g = std::min(g, ts[i] - ts[i - 1]);
    return g;
  }

  /// Rescales every time by alpha (origin and horizon included).
  ImpulseSchedule scaled(double alpha) const {
    if (is_periodic()) {
      auto p = pattern();
      for (double& o : p.offsets) o *= alpha;
      return periodic(p.offsets, p.period * alpha, p.origin * alpha);
    }
    auto l = list();
    for (double& t : l.times) t *= alpha;
    return explicit_list(l.times, l.horizon * alpha);
  }

 private:
  ImpulseSchedule() = default;

  Time time_of(long long j, std::size_t i) const {
    const auto& p = pattern();
    return p.origin + static_cast<double>(j) * p.period + p.offsets[i];
  }

  void check_horizon(Time t) const {
    if (t > list().horizon) {
      std::ostringstream os;
      os << "query time " << t << " beyond schedule horizon " << list().horizon;
      throw HorizonError(os.str());
    }
  }

  std::variant<Pattern, List> data_;
};

/// N(t, s): number of impulse times in (s, t].
inline std::size_t count_impulses(const ImpulseSchedule& sched, Time s, Time t) {
  if (t < s) throw DomainError("count_impulses needs t >= s");
  if (t == s) return 0;
  return sched.count_upto(t) - sched.count_upto(s);
}

/// Average dwell-time parameters: at most one impulse per t_star on average, with chatter bound n_star.
struct AdtParams {
  double t_star;
  double n_star;
};

struct WindowCount {
  std::size_t k;  // 1-based impulse index
  Time t;
  std::size_t count;  // N(t_k, t_k - tau)
};

struct WindowCounts {
  std::vector<WindowCount> entries;
  std::size_t observed_max = 0;
  /// Supremum over all k; exact for periodic schedules, the observed maximum otherwise.
  std::size_t supremum = 0;
  /// True when the supremum only covers impulses up to an explicit list's horizon.
  bool horizon_limited = false;
};

/// N(t_k, t_k - tau) for every impulse time t_k <= horizon.
inline WindowCounts window_counts(const ImpulseSchedule& sched, double tau, Time horizon) {
  if (!(tau > 0.0)) throw DomainError("window length must be positive");
  WindowCounts out;
  std::vector<Time> times;
  if (const auto first = sched.first_time(); first && *first <= horizon) times = sched.times_in(*first - 1.0, horizon);
  std::size_t k = 0;
  for (Time t : times) {
    ++k;
    const std::size_t c = count_impulses(sched, t - tau, t);
    out.entries.push_back(WindowCount{k, t, c});
    out.observed_max = std::max(out.observed_max, c);
  }
  if (sched.is_periodic()) {
    // Once t_k - tau is past the origin the counts repeat with the period.
    const auto& p = sched.pattern();
    const double periods = std::ceil(tau / p.period) + 2.0;
    const auto steady = sched.times_in(p.origin, p.origin + periods * p.period + p.period);
    std::size_t sup = 0;
    for (Time t : steady) sup = std::max(sup, count_impulses(sched, t - tau, t));
    out.supremum = sup;
  } else {
    out.supremum = out.observed_max;
    out.horizon_limited = true;
  }
  return out;
}

/// Extremal pair found by the event-aligned supremum search.
struct SupremumWitness {
  Time s = 0.0;
  Time t = 0.0;
  std::size_t count = 0;
  /// s approaches its value from the left (the impulse at s is counted).
  bool s_from_left = false;
  /// t approaches its value from the left (the impulse at t is not counted).
  bool t_from_left = false;
};

struct SupremumResult {
  double value = -std::numeric_limits<double>::infinity();
  SupremumWitness witness;
};

namespace detail {

/// sup over t0 <= s < t <= horizon of -sigma*N(t, s) - a*(t - s).
inline SupremumResult unified_supremum(const std::vector<Time>& times, Time t0, Time horizon, double sigma, double a) {
  SupremumResult best;
  if (!(horizon > t0)) throw DomainError("supremum search needs horizon > t0");
  const std::size_t m = times.size();
  // boundary(j): tau_0 = t0, tau_1..tau_m = times, tau_{m+1} = horizon
  auto boundary = [&](std::size_t j) -> Time {
    if (j == 0) return t0;
    if (j == m + 1) return horizon;
    return times[j - 1];
  };
  auto consider = [&](double value, const SupremumWitness& w) {
    if (value > best.value) {
      best.value = value;
      best.witness = w;
    }
  };
  // First counted impulse j (1..m+1), last counted i (j-1..m); j = i + 1 means an empty count.
  for (std::size_t j = 1; j <= m + 1; ++j) {
    for (std::size_t i = j - 1; i <= m; ++i) {
      const std::size_t count = i + 1 - j;
      const double base = -sigma * static_cast<double>(count);
      if (a >= 0.0) {
        if (count == 0) {
          // Arbitrarily short empty window inside the gap (tau_{j-1}, tau_j).
          consider(base, SupremumWitness{boundary(j - 1), boundary(j - 1), 0, false, false});
        } else {
          const double len = boundary(i) - boundary(j);
          consider(base - a * len, SupremumWitness{boundary(j), boundary(i), count, true, false});
        }
      } else {
        const double len = boundary(i + 1) - boundary(j - 1);
        consider(base - a * len, SupremumWitness{boundary(j - 1), boundary(i + 1), count, false, i + 1 <= m});
      }
    }
  }
  return best;
}

inline std::vector<Time> event_times(const ImpulseSchedule& sched, Time t0, Time horizon) {
  if (horizon > sched.horizon()) {
    std::ostringstream os;
    os << "horizon " << horizon << " beyond schedule horizon " << sched.horizon();
    throw HorizonError(os.str());
  }
  return sched.times_in(t0, horizon);
}

}  // namespace detail

struct DwellVerdict {
  bool holds = false;
  double worst_slack = 0.0;
  SupremumWitness witness;
};

/// Slack tolerance for verdicts: event times generated by floating-point
/// arithmetic put exactly binding pairs a few ulps off zero.
inline constexpr double kSlackTolerance = 1e-9;

/// ADT condition N(t, s) <= (t - s)/T* + N* for all t0 <= s < t <= horizon.
inline DwellVerdict check_adt(const ImpulseSchedule& sched, const AdtParams& adt, Time t0, Time horizon) {
  if (!(adt.t_star > 0.0)) throw DomainError("T* must be positive");
  const auto times = detail::event_times(sched, t0, horizon);
  auto sup = detail::unified_supremum(times, t0, horizon, -1.0, 1.0 / adt.t_star);
  DwellVerdict v;
  v.worst_slack = sup.value - adt.n_star;
  v.holds = v.worst_slack <= kSlackTolerance;
  v.witness = sup.witness;
  return v;
}

/// Reverse ADT condition N(t, s) >= (t - s)/T* - N* for all t0 <= s < t <= horizon.
inline DwellVerdict check_reverse_adt(const ImpulseSchedule& sched, const AdtParams& adt, Time t0, Time horizon) {
  if (!(adt.t_star > 0.0)) throw DomainError("T* must be positive");
  const auto times = detail::event_times(sched, t0, horizon);
  auto sup = detail::unified_supremum(times, t0, horizon, 1.0, -1.0 / adt.t_star);
  DwellVerdict v;
  v.worst_slack = sup.value - adt.n_star;
  v.holds = v.worst_slack <= kSlackTolerance;
  v.witness = sup.witness;
  return v;
}

struct MuResult {
  /// Least mu making -sigma*N(t, s) - (c - lambda)(t - s) <= mu hold on [t0, horizon].
  double mu = 0.0;
  /// The supremum grows without bound as the horizon grows (periodic schedules only).
  bool unbounded = false;
  /// Per-period drift of the left-hand side (periodic schedules only).
  std::optional<double> drift;
  SupremumWitness witness;
};

inline MuResult minimal_mu(const ImpulseSchedule& sched, double sigma, double c, double lambda, Time t0, Time horizon) {
  const double a = c - lambda;
  MuResult out;
  const auto times = detail::event_times(sched, t0, horizon);
  auto sup = detail::unified_supremum(times, t0, horizon, sigma, a);
  out.mu = std::max(0.0, sup.value);
  out.witness = sup.witness;
  if (sched.is_periodic()) {
    const auto& p = sched.pattern();
    const double drift = -sigma * static_cast<double>(p.offsets.size()) - a * p.period;
    out.drift = drift;
    out.unbounded = drift > kSlackTolerance * (1.0 + std::abs(sigma) * static_cast<double>(p.offsets.size()));
    if (out.unbounded) out.mu = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace impdelay
