#pragma once

/**
 * @file term_system.hpp
 * @brief Impulsive delay systems built from a restricted family of terms.
 *
 * Each side (flow and jump) is a sum of terms  gain * phi(read)  where
 *   read = x(t - delay)                     (point read; delay 0 is x(t) or x(t^-))
 *        | integral of x over [t - window, t] (distributed read)
 *   phi  = identity | componentwise saturation sat(z) = (|z + 1| - |z - 1|)/2.
 * This family covers linear systems with discrete delays, saturated
 * nonlinearities and distributed-delay impulses.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "impdelay/core.hpp"
#include "impdelay/linalg.hpp"

namespace impdelay {

/// sat(z) = (|z + 1| - |z - 1|) / 2
inline double sat(double z) { return std::clamp(z, -1.0, 1.0); }

struct Term {
  enum class Read { point, integral };

  Matrix gain;
  Read read = Read::point;
  /// Delay of a point read, or window length of an integral read.
  double lag = 0.0;
  bool saturate = false;

  static Term point(Matrix gain, double delay, bool saturate = false) {
    return Term{std::move(gain), Read::point, delay, saturate};
  }
  static Term integral(Matrix gain, double window, bool saturate = false) {
    return Term{std::move(gain), Read::integral, window, saturate};
  }

  State evaluate(const HistoryFunction& h) const {
    State z = read == Read::point ? h.eval(-lag) : h.integral(lag);
    if (saturate) {
      for (double& v : z) v = sat(v);
    }
    return gain.apply(z);
  }
};

struct TermSystem {
  std::size_t dimension = 0;
  double tau = 0.0;
  std::vector<Term> flow;
  std::vector<Term> jump;

  void validate() const {
    if (dimension == 0) throw ConfigError("system dimension must be positive");
    if (!(tau > 0.0)) throw ConfigError("system tau must be positive");
    auto check = [&](const std::vector<Term>& terms, const char* side) {
      for (const auto& t : terms) {
        if (t.gain.rows() != dimension || t.gain.cols() != dimension) {
          throw ConfigError(std::string(side) + " term gain must be " + std::to_string(dimension) + "x" +
                            std::to_string(dimension));
        }
        if (!(t.lag >= 0.0) || t.lag > tau * (1.0 + 1e-12)) {
          throw ConfigError(std::string(side) + " term delay/window must lie in [0, tau]");
        }
        if (t.read == Term::Read::integral && !(t.lag > 0.0)) {
          throw ConfigError(std::string(side) + " integral term needs a positive window");
        }
      }
    };
    check(flow, "flow");
    check(jump, "jump");
  }

  static State sum(const std::vector<Term>& terms, std::size_t n, const HistoryFunction& h) {
    State out(n, 0.0);
    for (const auto& t : terms) axpy(1.0, t.evaluate(h), out);
    return out;
  }

  SystemDefinition build() const {
    validate();
    const std::size_t n = dimension;
    auto f = flow;
    auto g = jump;
    SystemDefinition sys(
        n, tau, [f, n](Time, const HistoryFunction& h) { return sum(f, n, h); },
        [g, n](Time, const HistoryFunction& h) { return sum(g, n, h); });
    for (const auto& t : flow) {
      if (t.read == Term::Read::point && t.lag > 0.0) sys.lags.push_back(t.lag);
    }
    return sys;
  }
};

}  // namespace impdelay
