#pragma once

/**
 * @file presets.hpp
 * @brief Ready-made systems, Lyapunov pairs, certificate constants and schedules.
 *
 *  ex1     scalar saturated system, distributed-delay impulses, destabilizing jumps
 *  ex2-*   linear system x' = Ax + Bx(t - r1), dx = Cx + Dx(t - r2), three parameter sets
 *  ex3     delayed network control system with a sensor-delayed impulsive actuator
 *
 * Expected values carry their provenance: "paper" for reported numbers,
 * "derived" for values recomputed here from the same constants.
 */

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "impdelay/certificate.hpp"
#include "impdelay/core.hpp"
#include "impdelay/linalg.hpp"
#include "impdelay/lyapunov.hpp"
#include "impdelay/schedule.hpp"
#include "impdelay/term_system.hpp"

namespace impdelay {

struct ExpectedValue {
  double value;
  double tol;
  std::string provenance;
};

struct ExamplePreset {
  std::string name;
  TermSystem terms;
  SystemDefinition system;
  LyapunovPair pair;
  CertificateParams params;
  ImpulseSchedule schedule;
  HistoryFunction initial;
  Time t0 = 0.0;
  Time horizon = 1.0;
  std::map<std::string, ExpectedValue> expected;
  /// Intermediate constants of the parameter derivation.
  std::map<std::string, double> derivation;
  std::vector<std::string> notes;
};

namespace detail {

inline LyapunovPair quadratic_pair(double weight, double window) {
  LyapunovPair p;
  p.v1 = [](Time, const State& x) { return dot(x, x); };
  if (weight > 0.0 && window > 0.0) {
    p.v2 = [weight, window](Time, const HistoryFunction& h) {
      return weight * h.integrate_scalar([](double, const State& x) { return dot(x, x); }, -window);
    };
  } else {
    p.v2 = [](Time, const HistoryFunction&) { return 0.0; };
  }
  p.alpha1_inv = [](double z) { return std::sqrt(std::max(0.0, z)); };
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Example 1

/// c = min{2 - (eps + 2)|a|, eps / ((eps + 1) tau)}
inline double example1_rate(double a, double tau, double epsilon) {
  return std::min(2.0 - (epsilon + 2.0) * std::abs(a), epsilon / ((epsilon + 1.0) * tau));
}

inline ExamplePreset example1_preset(double a = 0.2, double b = 0.25, double tau = 1.0, double epsilon = 4.0) {
  if (!(a > 0.0) || !(b > 0.0) || !(epsilon > 0.0) || !(tau > 0.0)) {
    throw ConfigError("example 1 needs a, b, epsilon, tau > 0");
  }
  TermSystem terms;
  terms.dimension = 1;
  terms.tau = tau;
  terms.flow = {Term::point(Matrix{{-1.0}}, 0.0, true), Term::point(Matrix{{a}}, tau, true)};
  terms.jump = {Term::integral(Matrix{{b}}, tau, true)};

  LyapunovPair pair;
  pair.v1 = [](Time, const State& x) {
    const double m = std::abs(x[0]);
    return m <= 1.0 ? m * m : std::exp(2.0 * (m - 1.0));
  };
  pair.v2 = [a, epsilon, tau](Time, const HistoryFunction& h) {
    return std::abs(a) * h.integrate_scalar([&](double s, const State& x) {
      const double z = sat(x[0]);
      return z * z * (epsilon + 1.0 + epsilon * s / tau);
    });
  };
  pair.alpha1_inv = [](double z) { return z <= 1.0 ? std::sqrt(std::max(0.0, z)) : 1.0 + 0.5 * std::log(z); };

  CertificateParams params;
  params.c = example1_rate(a, tau, epsilon);
  params.rho1 = 2.0 * std::numbers::e;
  params.rho2 = 0.125;
  // V2 <= |a| sup sat^2 * integral of the weight, and sat^2 <= V1.
  params.kappa = std::abs(a) * tau * (epsilon / 2.0 + 1.0);
  params.tau = tau;

  ExamplePreset p{
      "ex1",
      terms,
      terms.build(),
      std::move(pair),
      params,
      ImpulseSchedule::periodic({1.0, 3.0, 6.0, 10.0}, 10.0, 0.0),
      HistoryFunction::constant({0.5}, tau),
      0.0,
      20.0,
      {},
      {},
      {},
  };
  p.derivation["c"] = params.c;
  p.derivation["kappa"] = params.kappa;
  if (params.c <= 0.0) p.notes.push_back("epsilon makes c <= 0: the continuous flow is no longer certified stabilizing");
  p.expected["c"] = {0.8, 1e-12, "paper"};
  p.expected["sigma"] = {-1.7431, 1e-3, "paper"};
  p.expected["t_star_bound"] = {2.1789, 1e-3, "paper"};
  p.expected["mu_bound"] = {4.0 * 1.7431, 1e-3, "paper"};
  p.expected["decay_ratio_max"] = {1e-2, 0.0, "derived"};
  return p;
}

// ---------------------------------------------------------------------------
// Example 2 and the distinct-delay variant

struct LinearImpulsiveSpec {
  Matrix A, B, C, D;
  double r1 = 0.1;  // delay of the continuous dynamics
  double r2 = 0.1;  // delay inside the impulses
};

/// Intermediate quantities of the quadratic Lyapunov-Krasovskii analysis.
struct Example2Derivation {
  Matrix a_eff, b_eff, c_eff, d_eff;
  double r1 = 0.0;
  double r = 0.0;  // max(r1, r2), the system tau
  double eps = 0.0;  // ||B||, weight of V2
  double lambda_max = 0.0;  // lambda_max(A + A^T)
  double c = 0.0;  // -(lambda_max + 2 ||B||)
  double kappa = 0.0;  // eps * r1
  double norm_i_plus_c = 0.0;
  double norm_d = 0.0;
  double exp_cr = 1.0;
  std::vector<std::string> notes;

  /// rho1 = (1 + xi)||I + C||^2, rho2 = (1 + 1/xi)||D||^2 with the degenerate norms handled exactly.
  std::pair<double, double> rho(double xi) const {
    const double a2 = norm_i_plus_c * norm_i_plus_c;
    const double b2 = norm_d * norm_d;
    if (norm_d == 0.0) return {a2, 0.0};
    if (norm_i_plus_c == 0.0) return {0.0, b2};
    return {(1.0 + xi) * a2, (1.0 + 1.0 / xi) * b2};
  }

  CertificateParams params(double xi) const {
    CertificateParams p;
    p.c = c;
    std::tie(p.rho1, p.rho2) = rho(xi);
    p.kappa = kappa;
    p.tau = r;
    return p;
  }

  /// Optimal xi and minimal value of rho1 + [(1 - rho1) kappa + rho2] e^{cr}.
  std::pair<double, double> est01() const {
    const double e = exp_cr;
    if (!(1.0 - kappa * e > 0.0)) throw InfeasibleError("xi-optimization infeasible: kappa e^{cr} >= 1");
    const double root = std::sqrt(1.0 - kappa * e);
    const double xi = norm_i_plus_c > 0.0 ? std::sqrt(e) * norm_d / (root * norm_i_plus_c) : 0.0;
    const double v = std::pow(root * norm_i_plus_c + std::sqrt(e) * norm_d, 2) + kappa * e;
    return {xi, v};
  }

  /// Optimal xi and minimal value of rho1 e^sigma + [(1 - rho1) kappa + rho2] F with
  /// F = e^{sigma w} (times e^{cr} when with_ctau).
  std::pair<double, double> est02(double sigma, std::size_t w, bool with_ctau = false) const {
    const double f = std::exp(sigma * static_cast<double>(w)) * (with_ctau ? exp_cr : 1.0);
    const double head = std::exp(sigma) - kappa * f;
    if (!(head > 0.0)) throw InfeasibleError("xi-optimization infeasible: e^sigma <= kappa e^{sigma N}");
    const double root = std::sqrt(head);
    const double xi = norm_i_plus_c > 0.0 ? std::sqrt(f) * norm_d / (root * norm_i_plus_c) : 0.0;
    const double v = std::pow(root * norm_i_plus_c + std::sqrt(f) * norm_d, 2) + kappa * f;
    return {xi, v};
  }

  /// Largest sigma > 0 with est02(sigma, w) <= 1 and rho1 < 1 at the optimal xi (0 if none).
  double est02_sigma_max(std::size_t w, bool with_ctau = false) const {
    auto feasible = [&](double s) {
      try {
        auto [xi, v] = est02(s, w, with_ctau);
        return v <= 1.0 && rho(xi).first < 1.0;
      } catch (const InfeasibleError&) {
        return false;
      }
    };
    if (!feasible(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (feasible(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) return hi;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
  }

  /// ln(min_xi [rho1 + rho2 + (1 - rho1) kappa]) / c: the uniform impulse-interval bound of the
  /// earlier delay-uniform criterion, used for comparison.
  double uniform_interval_bound() const {
    const double v = std::pow(std::sqrt(1.0 - kappa) * norm_i_plus_c + norm_d, 2) + kappa;
    return std::log(v) / c;
  }
};

inline Example2Derivation example2_derivation(const LinearImpulsiveSpec& spec) {
  const auto n = spec.A.rows();
  for (const Matrix* m : {&spec.A, &spec.B, &spec.C, &spec.D}) {
    if (!m->square() || m->rows() != n) throw DimensionError("example 2 matrices must be square and of equal size");
  }
  if (spec.r1 < 0.0 || spec.r2 < 0.0) throw ConfigError("delays must be nonnegative");
  if (!(std::max(spec.r1, spec.r2) > 0.0)) throw ConfigError("at least one of r1, r2 must be positive");
  Example2Derivation d;
  d.a_eff = spec.A;
  d.b_eff = spec.B;
  d.c_eff = spec.C;
  d.d_eff = spec.D;
  if (spec.r1 == 0.0) {
    d.a_eff = spec.A + spec.B;
    d.b_eff = Matrix(n, n);
    d.notes.push_back("r1 = 0: B folded into A, V2 dropped");
  }
  if (spec.r2 == 0.0) {
    d.c_eff = spec.C + spec.D;
    d.d_eff = Matrix(n, n);
    d.notes.push_back("r2 = 0: D folded into C");
  }
  d.r1 = spec.r1;
  d.r = std::max(spec.r1, spec.r2);
  d.eps = spectral_norm(d.b_eff);
  d.lambda_max = sym_lambda_max(d.a_eff + d.a_eff.transpose());
  d.c = -(d.lambda_max + 2.0 * d.eps);
  d.kappa = d.eps * spec.r1;
  d.norm_i_plus_c = spectral_norm(Matrix::identity(n) + d.c_eff);
  d.norm_d = spectral_norm(d.d_eff);
  d.exp_cr = std::exp(d.c * d.r);
  d.notes.push_back("kappa = ||B|| r1 (V2 integrates over the continuous-dynamics delay)");
  return d;
}

struct Example2Params {
  Example2Derivation derivation;
  CertificateParams params;
  double xi = 0.0;
  /// "est01" when xi minimizes the D1/D2 combination, "est02" when it minimizes the D4 inequality.
  std::string xi_source;
  std::optional<double> est01_value;
  std::optional<double> est02_sigma;
};

/// Certificate constants from the matrices. For c > 0 xi comes from est01; for c <= 0 from est02
/// at the largest feasible sigma for the given window count.
inline Example2Params example2_params(const LinearImpulsiveSpec& spec, std::size_t window_count = 1) {
  Example2Params out;
  out.derivation = example2_derivation(spec);
  const auto& d = out.derivation;
  if (d.c > 0.0) {
    auto [xi, v] = d.est01();
    out.xi = xi;
    out.est01_value = v;
    out.xi_source = "est01";
  } else {
    const double s = d.est02_sigma_max(window_count);
    if (!(s > 0.0)) throw InfeasibleError("no sigma > 0 satisfies the est02 inequality");
    out.est02_sigma = s;
    out.xi = d.est02(s, window_count).first;
    out.xi_source = "est02";
  }
  out.params = d.params(out.xi);
  return out;
}

enum class Example2Case { C1, C2, C3 };

inline ExamplePreset example2_preset(Example2Case which) {
  const Matrix a1{{-1.1834, -0.8284}, {-0.8284, -1.7751}};
  const Matrix b{{0.2500, 0.1750}, {0.1750, 0.3750}};
  const Matrix c1{{-0.7375, 0.1750}, {0.1250, -0.6000}};
  const Matrix c2{{-0.8950, 0.0700}, {0.0500, -0.8400}};
  const Matrix a3{{0.2, 0.12}, {0.1, 0.25}};
  const Matrix d3{{0.1050, 0.0700}, {0.0500, 0.1600}};
  const double r = 0.1;

  LinearImpulsiveSpec spec;
  std::string name;
  std::optional<ImpulseSchedule> sched;
  std::map<std::string, ExpectedValue> expected;
  std::size_t window_count = 1;
  switch (which) {
    case Example2Case::C1:
      spec = {a1, b, c1, b, r, r};
      name = "ex2-c1";
      sched = ImpulseSchedule::periodic({0.08, 0.26}, 0.26);
      expected["lambda_max"] = {-1.1993, 1e-3, "paper"};
      expected["norm_b"] = {0.4983, 1e-3, "paper"};
      expected["norm_d"] = {0.4983, 1e-3, "paper"};
      expected["norm_i_plus_c"] = {0.4972, 1e-3, "paper"};
      expected["c"] = {0.2027, 1e-3, "paper"};
      expected["sigma"] = {-0.0262, 5e-4, "paper"};
      expected["t_star_bound"] = {0.1293, 1e-3, "paper"};
      expected["n_star"] = {2.0, 0.0, "paper"};
      break;
    case Example2Case::C2:
      spec = {a1, b, c2, b, r, r};
      name = "ex2-c2";
      sched = ImpulseSchedule::periodic({0.03, 0.14}, 0.14);
      expected["c"] = {0.2027, 1e-3, "paper"};
      expected["norm_i_plus_c"] = {0.1989, 1e-3, "paper"};
      expected["est01"] = {0.5369, 1e-3, "paper"};
      expected["window_sup"] = {2.0, 0.0, "paper"};
      break;
    case Example2Case::C3:
      spec = {a3, b, c1, d3, r, r};
      name = "ex2-c3";
      sched = ImpulseSchedule::periodic({0.04, 0.08, 0.12, 0.52}, 0.52);
      window_count = 3;
      expected["lambda_max"] = {0.6756, 1e-3, "paper"};
      expected["c"] = {-1.6722, 1e-3, "paper"};
      expected["norm_d"] = {0.1989, 1e-3, "paper"};
      expected["sigma"] = {0.3786, 0.0, "paper"};  // checked as feasible, not as the maximum
      expected["t_star_bound"] = {0.2264, 1e-3, "paper"};
      expected["n_star"] = {3.0, 0.0, "paper"};
      expected["uniform_interval_bound"] = {0.3945, 1e-3, "paper"};
      expected["window_sup"] = {3.0, 0.0, "paper"};
      break;
  }
  expected["decay_ratio_max"] = {1e-2, 0.0, "derived"};

  auto derived = example2_params(spec, window_count);
  const auto& d = derived.derivation;

  TermSystem terms;
  terms.dimension = 2;
  terms.tau = d.r;
  terms.flow = {Term::point(d.a_eff, 0.0)};
  if (spec.r1 > 0.0) terms.flow.push_back(Term::point(d.b_eff, spec.r1));
  terms.jump = {Term::point(d.c_eff, 0.0)};
  if (spec.r2 > 0.0) terms.jump.push_back(Term::point(d.d_eff, spec.r2));

  ExamplePreset p{
      name,
      terms,
      terms.build(),
      detail::quadratic_pair(d.eps, spec.r1),
      derived.params,
      *sched,
      HistoryFunction::constant({0.5, 0.7}, d.r),
      0.0,
      6.0,
      std::move(expected),
      {},
      d.notes,
  };
  p.derivation["lambda_max"] = d.lambda_max;
  p.derivation["norm_b"] = d.eps;
  p.derivation["norm_d"] = d.norm_d;
  p.derivation["norm_i_plus_c"] = d.norm_i_plus_c;
  p.derivation["c"] = d.c;
  p.derivation["kappa"] = d.kappa;
  p.derivation["xi"] = derived.xi;
  if (derived.est01_value) p.derivation["est01"] = *derived.est01_value;
  if (derived.est02_sigma) p.derivation["est02_sigma_max"] = *derived.est02_sigma;
  if (which == Example2Case::C3) p.derivation["uniform_interval_bound"] = d.uniform_interval_bound();
  p.notes.push_back(std::string("xi from ") + derived.xi_source);
  return p;
}

inline ExamplePreset example2_preset(const LinearImpulsiveSpec& spec, const ImpulseSchedule& sched,
                                     const State& initial, Time horizon, std::size_t window_count = 1) {
  auto derived = example2_params(spec, window_count);
  const auto& d = derived.derivation;
  TermSystem terms;
  terms.dimension = spec.A.rows();
  terms.tau = d.r;
  terms.flow = {Term::point(d.a_eff, 0.0)};
  if (spec.r1 > 0.0) terms.flow.push_back(Term::point(d.b_eff, spec.r1));
  terms.jump = {Term::point(d.c_eff, 0.0)};
  if (spec.r2 > 0.0) terms.jump.push_back(Term::point(d.d_eff, spec.r2));
  return ExamplePreset{
      "ex2-custom", terms, terms.build(), detail::quadratic_pair(d.eps, spec.r1), derived.params, sched,
      HistoryFunction::constant(initial, d.r), 0.0, horizon, {}, {}, d.notes,
  };
}

// ---------------------------------------------------------------------------
// Example 3

struct Example3Derivation {
  double lambda_max = 0.0;  // lambda_max(A + A^T)
  double norm_a = 0.0;
  double norm_b = 0.0;
  double norm_i_plus_b = 0.0;
  double lipschitz = 27.0 / 7.0;
  double r = 0.02;
  double d = 0.01;
  double tau = 0.02;
  double c = 0.0;
  double kappa = 0.0;
  std::size_t zeta = 0;  // sup_k (impulses in (t_k - d, t_k))
  double q = 0.0;  // d ||B|| (||A|| + L) + zeta ||B||^2
  double xi = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
};

inline Matrix example3_A() {
  return Matrix{{-18.0 / 7.0, 9.0, 0.0}, {1.0, -1.0, 1.0}, {0.0, -100.0 / 7.0, 0.0}};
}

inline Example3Derivation example3_derivation(const ImpulseSchedule& sched, Time horizon) {
  Example3Derivation e;
  const Matrix a = example3_A();
  const Matrix b = -0.5418 * Matrix::identity(3);
  e.lambda_max = sym_lambda_max(a + a.transpose());
  e.norm_a = spectral_norm(a);
  e.norm_b = spectral_norm(b);
  e.norm_i_plus_b = spectral_norm(Matrix::identity(3) + b);
  e.tau = std::max(e.r, e.d);
  e.c = -(e.lambda_max + 2.0 * e.lipschitz);
  e.kappa = e.r * e.lipschitz;
  const auto wc = window_counts(sched, e.d, horizon);
  e.zeta = wc.supremum > 0 ? wc.supremum - 1 : 0;
  e.q = e.d * e.norm_b * (e.norm_a + e.lipschitz) + static_cast<double>(e.zeta) * e.norm_b * e.norm_b;
  e.xi = e.q / (std::sqrt(1.0 - e.kappa) * e.norm_i_plus_b);
  e.rho1 = (1.0 + e.xi) * e.norm_i_plus_b * e.norm_i_plus_b;
  e.rho2 = (1.0 + 1.0 / e.xi) * e.q * e.q;
  return e;
}

inline ExamplePreset example3_preset() {
  auto sched = ImpulseSchedule::periodic({0.05, 0.08}, 0.08);
  const Time horizon = 2.0;
  const auto e = example3_derivation(sched, horizon);

  Matrix h(3, 3);
  h(0, 0) = e.lipschitz;
  TermSystem terms;
  terms.dimension = 3;
  terms.tau = e.tau;
  terms.flow = {Term::point(example3_A(), 0.0), Term::point(h, e.r, true)};
  terms.jump = {Term::point(-0.5418 * Matrix::identity(3), e.d)};

  CertificateParams params;
  params.c = e.c;
  params.rho1 = e.rho1;
  params.rho2 = e.rho2;
  params.kappa = e.kappa;
  params.tau = e.tau;

  ExamplePreset p{
      "ex3",
      terms,
      terms.build(),
      detail::quadratic_pair(e.lipschitz, e.r),
      params,
      sched,
      HistoryFunction::constant({0.5, 0.45, -0.2}, e.tau),
      0.0,
      horizon,
      {},
      {},
      {},
  };
  p.derivation["lambda_max"] = e.lambda_max;
  p.derivation["norm_a"] = e.norm_a;
  p.derivation["norm_i_plus_b"] = e.norm_i_plus_b;
  p.derivation["c"] = e.c;
  p.derivation["kappa"] = e.kappa;
  p.derivation["zeta"] = static_cast<double>(e.zeta);
  p.derivation["xi"] = e.xi;
  p.derivation["rho1"] = e.rho1;
  p.derivation["rho2"] = e.rho2;
  if (e.zeta > 0) p.notes.push_back("schedule has gaps below d: rho2 recomputed with zeta > 0 (no reference value)");
  p.expected["sigma"] = {0.9619, 1e-3, "paper"};
  p.expected["sigma_over_c"] = {0.041, 2e-3, "paper"};
  p.expected["average_interval"] = {0.04, 0.0, "paper"};
  p.expected["window_sup"] = {1.0, 0.0, "paper"};
  p.expected["zeta"] = {0.0, 0.0, "paper"};
  p.expected["decay_ratio_max"] = {1e-2, 0.0, "derived"};
  return p;
}

inline std::vector<std::string> preset_names() { return {"ex1", "ex2-c1", "ex2-c2", "ex2-c3", "ex3"}; }

inline ExamplePreset make_preset(const std::string& name) {
  if (name == "ex1") return example1_preset();
  if (name == "ex2-c1") return example2_preset(Example2Case::C1);
  if (name == "ex2-c2") return example2_preset(Example2Case::C2);
  if (name == "ex2-c3") return example2_preset(Example2Case::C3);
  if (name == "ex3") return example3_preset();
  throw ConfigError("unknown preset '" + name + "' (expected ex1, ex2-c1, ex2-c2, ex2-c3 or ex3)");
}

}  // namespace impdelay
