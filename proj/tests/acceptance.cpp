// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "impdelay/impdelay.hpp"
#include "oracles.hpp"

using namespace impdelay;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAILED]");
  }
  void near(const std::string& name, double value, double ref, double tol) {
    std::ostringstream os;
    os.precision(6);
    os << name << " = " << value << " (ref " << ref << " +- " << tol << ")";
    require(std::abs(value - ref) <= tol, os.str());
  }
};

template <class F>
double millis(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// 1. closed-form sigma and T* for the scalar saturated example
Outcome criterion1() {
  Outcome o;
  ExamplePreset p = example1_preset();
  CertificateReport rep;
  const double ms = millis([&] { rep = certify(p.params, p.schedule, p.t0, p.horizon); });
  o.near("sigma", *rep.sigma_result.sigma, -1.7431, 1e-3);
  const double direct = -std::log(2.0 * std::numbers::e + 0.125 * std::exp(0.8));
  o.near("sigma vs -ln(2e + e^0.8/8)", *rep.sigma_result.sigma, direct, 1e-12);
  o.near("T*", rep.dwell.adt->t_star, 2.1789, 1e-3);
  // the closed-form step alone
  double s = 0.0;
  const double closed_ms = millis([&] { s = *sigma_closed_form(p.params).sigma; });
  (void)s;
  o.require(closed_ms < 1.0, "closed-form runtime " + fmt(closed_ms) + " ms < 1 ms");
  o.detail << " (full certify " << fmt(ms) << " ms)";
  return o;
}

// 2. linear case 1 from the raw matrices
Outcome criterion2() {
  Outcome o;
  ExamplePreset p = example1_preset();
  CertificateReport rep;
  const double ms = millis([&] {
    p = example2_preset(Example2Case::C1);
    rep = certify(p.params, p.schedule, p.t0, p.horizon);
  });
  o.near("lambda_max", p.derivation.at("lambda_max"), -1.1993, 1e-3);
  o.near("||B||", p.derivation.at("norm_b"), 0.4983, 1e-3);
  o.near("||I+C||", p.derivation.at("norm_i_plus_c"), 0.4972, 1e-3);
  o.near("c", p.params.c, 0.2027, 1e-3);
  o.near("sigma", *rep.sigma_result.sigma, -0.0262, 5e-4);
  o.near("T*", rep.dwell.adt->t_star, 0.1293, 1e-3);
  o.require(ms < 10.0, "runtime " + fmt(ms) + " ms < 10 ms");
  return o;
}

// 3. linear case 2
Outcome criterion3() {
  Outcome o;
  auto p = example2_preset(Example2Case::C2);
  o.near("est01", p.derivation.at("est01"), 0.5369, 1e-3);
  const auto wc = window_counts(p.schedule, p.params.tau, p.horizon);
  o.require(wc.supremum == 2, "window supremum = " + std::to_string(wc.supremum) + " (ref 2)");
  return o;
}

// 4. linear case 3
Outcome criterion4() {
  Outcome o;
  auto p = example2_preset(Example2Case::C3);
  const double sigma = 0.3786;
  const double lhs_minus_one = sigma_defining_slack(p.params, SigmaCase::D4, sigma, 3);
  o.require(lhs_minus_one <= 0.0, "sigma = 0.3786 feasible at window count 3 (1 - lhs = " + fmt(-lhs_minus_one) + " >= 0)");
  const double t_star = sigma / std::abs(p.params.c - p.params.lambda);
  o.near("T*", t_star, 0.2264, 1e-3);
  const auto rev = check_reverse_adt(p.schedule, AdtParams{t_star, 3.0}, p.t0, p.horizon);
  o.require(rev.holds, "reverse ADT with N* = 3 holds (worst slack " + fmt(rev.worst_slack) + ")");
  o.near("comparison bound", p.derivation.at("uniform_interval_bound"), 0.3945, 1e-3);
  return o;
}

// 5. network control example
Outcome criterion5() {
  Outcome o;
  auto p = example3_preset();
  const auto sig = sigma_feasible_max(p.params, 1);
  o.require(sig.case_tag == SigmaCase::D4, std::string("case ") + to_string(sig.case_tag));
  o.near("sigma", *sig.sigma, 0.9619, 1e-3);
  o.near("|sigma|/|c|", std::abs(*sig.sigma) / std::abs(p.params.c), 0.041, 2e-3);
  const auto& pat = p.schedule.pattern();
  const double avg = pat.period / static_cast<double>(pat.offsets.size());
  o.require(avg == 0.04, "average interval " + fmt(avg) + " == 0.04");
  const auto wc = window_counts(p.schedule, p.params.tau, p.horizon);
  const bool all_one = std::all_of(wc.entries.begin(), wc.entries.end(), [](const WindowCount& e) { return e.count == 1; });
  o.require(all_one && wc.supremum == 1, "all window counts 1");
  o.require(p.derivation.at("zeta") == 0.0, "zeta = 0");
  return o;
}

// 6. decay of every preset and the envelope along it
Outcome criterion6() {
  Outcome o;
  for (const auto& name : preset_names()) {
    auto p = make_preset(name);
    double ratio = 0.0;
    bool env_ok = false;
    double env_excess = 0.0;
    const double ms = millis([&] {
      const auto rep = certify(p.params, p.schedule, p.t0, p.horizon);
      SimConfig cfg;
      cfg.base_step = 1e-3;
      cfg.t_end = p.horizon;
      const auto traj = simulate(p.system, p.schedule, p.initial, p.t0, cfg);
      ratio = norm2(traj.value(p.horizon)) / norm2(p.initial.eval(0.0));
      const auto env = check_envelope(p.pair, traj, p.schedule, *rep.sigma_result.sigma, p.params.c, 0.05);
      env_ok = env.holds;
      env_excess = env.max_violation;
    });
    o.require(ratio < 1e-2, name + " |x(T)|/|x0| = " + fmt(ratio));
    o.require(env_ok, name + " envelope (max rel excess " + fmt(env_excess) + ")");
    o.require(ms < 5000.0, name + " " + fmt(ms) + " ms");
  }
  return o;
}

SystemMap zero_map() {
  return [](Time, const HistoryFunction& h) { return State(h.dim(), 0.0); };
}

// 7. integrator correctness
Outcome criterion7() {
  Outcome o;
  const auto none = ImpulseSchedule::explicit_list({}, 1e6);
  {
    SystemDefinition sys(1, 0.1, [](Time, const HistoryFunction& h) { return State{-h.eval(0.0)[0]}; }, zero_map());
    SimConfig cfg;
    cfg.base_step = 0.01;
    cfg.t_end = 1.0;
    const double x1 = simulate(sys, none, HistoryFunction::constant({1.0}, 0.1), 0.0, cfg).value(1.0)[0];
    o.near("x' = -x: x(1)", x1, std::exp(-1.0), 1e-8);
  }
  {
    SystemDefinition sys(1, 1.0, [](Time, const HistoryFunction& h) { return State{-h.eval(-1.0)[0]}; }, zero_map());
    SimConfig cfg;
    cfg.base_step = 0.01;
    cfg.t_end = 1.0;
    const double x1 = simulate(sys, none, HistoryFunction::constant({1.0}, 1.0), 0.0, cfg).value(1.0)[0];
    o.near("x' = -x(t-1): x(1)", x1, 0.0, 1e-8);
  }
  {
    SystemDefinition osc(2, 0.5,
                         [](Time, const HistoryFunction& h) {
                           const auto x = h.eval(0.0);
                           return State{x[1], -x[0] - 0.1 * x[1]};
                         },
                         zero_map());
    const auto rep = convergence_probe(osc, none, HistoryFunction::constant({1.0, 0.0}, 0.5), 0.0, 2.0, {0.04, 0.02, 0.01, 0.005});
    o.require(rep.min_order() >= 3.5, "smooth order " + fmt(rep.min_order()) + " >= 3.5");
  }
  {
    SystemDefinition sys(1, 0.3,
                         [](Time, const HistoryFunction& h) { return State{-h.eval(0.0)[0] - 0.8 * h.eval(-0.3)[0]}; },
                         [](Time, const HistoryFunction& h) { return State{-0.4 * h.eval(-0.1)[0]}; });
    sys.lags = {0.3};
    const auto rep = convergence_probe(sys, ImpulseSchedule::periodic({0.37}, 0.5), HistoryFunction::constant({1.0}, 0.3), 0.0,
                                       2.0, {0.02, 0.01, 0.005, 0.0025});
    o.require(rep.min_order() >= 1.9, "delayed/impulsive order " + fmt(rep.min_order()) + " >= 1.9");
  }
  {
    const auto p = example1_preset();
    const auto rep = convergence_probe(p.system, p.schedule, p.initial, 0.0, 4.0, {0.04, 0.02, 0.01, 0.005});
    o.require(rep.min_order() >= 1.9, "saturated distributed-impulse order " + fmt(rep.min_order()) + " >= 1.9");
  }
  return o;
}

// 8. exact dwell checks and minimal mu against a dense grid scan
Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int adt_bad = 0, rev_bad = 0, mu_bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = oracle::random_times(rng, trial);
    const auto sched = r.periodic ? ImpulseSchedule::periodic(r.offsets, r.period) : ImpulseSchedule::explicit_list(r.times, 20.0);

    const AdtParams adt{0.3 + 2.0 * u(rng), 3.0 * u(rng)};
    const double delta = 1e-3 * adt.t_star;
    const double tol = 2.0 * delta / adt.t_star;
    const auto fwd = check_adt(sched, adt, 0.0, 20.0);
    const double fwd_ref = oracle::grid_supremum(r.times, 0.0, 20.0, -1.0, 1.0 / adt.t_star, delta) - adt.n_star;
    if (std::abs(fwd.worst_slack - fwd_ref) > tol || (std::abs(fwd_ref) > tol && fwd.holds != (fwd_ref <= 0.0))) ++adt_bad;
    const auto rev = check_reverse_adt(sched, adt, 0.0, 20.0);
    const double rev_ref = oracle::grid_supremum(r.times, 0.0, 20.0, 1.0, -1.0 / adt.t_star, delta) - adt.n_star;
    if (std::abs(rev.worst_slack - rev_ref) > tol || (std::abs(rev_ref) > tol && rev.holds != (rev_ref <= 0.0))) ++rev_bad;

    const double sigma = 4.0 * u(rng) - 2.0;
    const double c = 4.0 * u(rng) - 2.0;
    const double a = c - 1e-6;
    const double t_star = std::abs(sigma) / std::abs(a);
    const double d = std::clamp(1e-3 * t_star, 1e-4, 1e-2);
    const double mtol = 2.0 * std::abs(a) * d + 1e-12;
    const auto mu = minimal_mu(sched, sigma, c, 1e-6, 0.0, 20.0);
    const double ref = std::max(0.0, oracle::grid_supremum(r.times, 0.0, 20.0, sigma, a, d));
    if (mu.unbounded) {
      const auto longer = oracle::expand(r.offsets, r.period, 0.0, 0.0, 60.0);
      if (!(oracle::grid_supremum(longer, 0.0, 60.0, sigma, a, 10.0 * d) > ref + 10.0 * mtol)) ++mu_bad;
    } else if (std::abs(mu.mu - ref) > mtol) {
      ++mu_bad;
    }
  }
  o.require(adt_bad == 0, "check_adt disagreements " + std::to_string(adt_bad) + "/50");
  o.require(rev_bad == 0, "check_reverse_adt disagreements " + std::to_string(rev_bad) + "/50");
  o.require(mu_bad == 0, "minimal_mu disagreements " + std::to_string(mu_bad) + "/50");
  return o;
}

// 9. invariant suites
Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  int sat_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double z = 20.0 * u(rng) - 10.0, w = 20.0 * u(rng) - 10.0;
    if (sat(z) != oracle::sat_cases(z) || sat(-z) != -sat(z) || std::abs(sat(z)) > 1.0 ||
        std::abs(sat(z) - sat(w)) > std::abs(z - w) + 1e-15) {
      ++sat_bad;
    }
  }
  o.require(sat_bad == 0, "sat properties on 1000 inputs (" + std::to_string(sat_bad) + " violations)");

  int add_bad = 0;
  const auto sched = ImpulseSchedule::periodic({0.04, 0.08, 0.12, 0.52}, 0.52);
  for (int i = 0; i < 500; ++i) {
    double v[3] = {20.0 * u(rng), 20.0 * u(rng), 20.0 * u(rng)};
    std::sort(v, v + 3);
    if (count_impulses(sched, v[0], v[2]) != count_impulses(sched, v[0], v[1]) + count_impulses(sched, v[1], v[2])) ++add_bad;
  }
  o.require(add_bad == 0, "count additivity on 500 triples (" + std::to_string(add_bad) + " violations)");

  int drawn[4] = {0, 0, 0, 0};
  int sign_bad = 0, sharp_bad = 0;
  while (drawn[0] < 200 || drawn[1] < 200 || drawn[2] < 200 || drawn[3] < 200) {
    CertificateParams p;
    p.c = 4.0 * u(rng) - 2.0;
    p.rho1 = 2.0 * u(rng);
    p.rho2 = u(rng) * u(rng);
    p.kappa = u(rng) * u(rng);
    p.tau = 0.05 + 2.0 * u(rng);
    const auto tag = classify_case(p);
    if (tag == SigmaCase::infeasible) continue;
    const int idx = static_cast<int>(tag);
    if (drawn[idx] >= 200) continue;
    ++drawn[idx];
    if (tag == SigmaCase::D1 || tag == SigmaCase::D2) {
      if (!(*sigma_closed_form(p).sigma <= 0.0)) ++sign_bad;
      continue;
    }
    const std::size_t w = 1 + static_cast<std::size_t>(4 * u(rng));
    const double s = *sigma_feasible_max(p, w).sigma;
    if (!(s > 0.0)) ++sign_bad;
    if (!std::isfinite(s)) continue;
    if (sigma_defining_slack(p, tag, s, w) > 1e-12) ++sharp_bad;
    const double k = (1.0 - p.rho1) * p.kappa + p.rho2;
    const double e = tag == SigmaCase::D3 ? std::exp(p.c * p.tau) : 1.0;
    const bool at_cap = (p.rho1 > 0 && std::abs(s + std::log(p.rho1)) < 1e-12) ||
                        (k > 0 && std::abs(s + std::log(k * e) / static_cast<double>(w)) < 1e-12);
    if (!at_cap && !(sigma_defining_slack(p, tag, s * (1.0 + 1e-9) + 1e-12, w) > 0.0)) ++sharp_bad;
  }
  o.require(sign_bad == 0, "sigma sign discipline, 200 draws per case (" + std::to_string(sign_bad) + " violations)");
  o.require(sharp_bad == 0, "bisection boundary sharpness (" + std::to_string(sharp_bad) + " violations)");

  int est_bad = 0;
  for (auto which : {Example2Case::C1, Example2Case::C2}) {
    const auto p = example2_preset(which);
    const double a = p.derivation.at("norm_i_plus_c"), b = p.derivation.at("norm_d"), kappa = p.params.kappa;
    const double e = std::exp(p.params.c * 0.1);
    const double xi = b * std::sqrt(e) / (a * std::sqrt(1.0 - kappa * e));
    auto combo = [&](double x) {
      const double r1 = (1.0 + x) * a * a, r2 = (1.0 + 1.0 / x) * b * b;
      return r1 + ((1.0 - r1) * kappa + r2) * e;
    };
    const double closed = std::pow(std::sqrt(1.0 - kappa * e) * a + std::sqrt(e) * b, 2) + kappa * e;
    if (std::abs(combo(xi) - closed) > 1e-12 || std::abs(p.derivation.at("est01") - closed) > 1e-12) ++est_bad;
    if (closed > oracle::grid_min(combo, 0.05 * xi, 3.0 * xi, 21) + 1e-15) ++est_bad;
  }
  {
    const auto p = example2_preset(Example2Case::C3);
    const double a = p.derivation.at("norm_i_plus_c"), b = p.derivation.at("norm_d"), kappa = p.params.kappa;
    const auto d = example2_derivation({Matrix{{0.2, 0.12}, {0.1, 0.25}}, Matrix{{0.25, 0.175}, {0.175, 0.375}},
                                        Matrix{{-0.7375, 0.175}, {0.125, -0.6}}, Matrix{{0.105, 0.07}, {0.05, 0.16}}, 0.1, 0.1});
    for (double sigma : {0.1, 0.25, 0.3786}) {
      const double f = std::exp(3.0 * sigma);
      const double xi = b * std::sqrt(f) / (a * std::sqrt(std::exp(sigma) - kappa * f));
      auto combo = [&](double x) {
        const double r1 = (1.0 + x) * a * a, r2 = (1.0 + 1.0 / x) * b * b;
        return r1 * std::exp(sigma) + ((1.0 - r1) * kappa + r2) * f;
      };
      const double closed = std::pow(std::sqrt(std::exp(sigma) - kappa * f) * a + std::sqrt(f) * b, 2) + kappa * f;
      const auto [lib_xi, lib_v] = d.est02(sigma, 3);
      if (std::abs(combo(xi) - closed) > 1e-12 || std::abs(lib_v - closed) > 1e-12 || std::abs(lib_xi - xi) > 1e-12) ++est_bad;
      if (closed > oracle::grid_min(combo, 0.05 * xi, 3.0 * xi, 21) + 1e-15) ++est_bad;
    }
  }
  o.require(est_bad == 0, "est01/est02 identities and 21-point grid optimality (" + std::to_string(est_bad) + " violations)");
  return o;
}

// 10. negative controls
Outcome criterion10() {
  Outcome o;
  const auto p = example1_preset();
  const auto rep = certify(p.params, ImpulseSchedule::uniform(1.0), 0.0, 20.0);
  o.require(!rep.certified, "ex1 params with period-1 schedule not certified");
  o.require(rep.minimal.unbounded && rep.minimal.drift && *rep.minimal.drift > 0.0,
            "minimal mu drift " + fmt(rep.minimal.drift.value_or(0.0)) + " > 0");
  CertificateParams bad;
  bad.c = -0.5;
  bad.rho1 = 1.2;
  bad.rho2 = 0.1;
  bad.kappa = 0.1;
  const auto inf = certify(bad, ImpulseSchedule::uniform(1.0), 0.0, 20.0);
  o.require(inf.sigma_result.case_tag == SigmaCase::infeasible && !inf.certified, "c <= 0, rho1 >= 1 infeasible");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form sigma, scalar saturated example", criterion1},
      {"linear case 1 pipeline from raw matrices", criterion2},
      {"linear case 2 est01 and window supremum", criterion3},
      {"linear case 3 feasibility, reverse ADT, comparison bound", criterion4},
      {"network control example sigma and schedule", criterion5},
      {"decay and envelope along every preset", criterion6},
      {"integrator correctness and convergence order", criterion7},
      {"dwell checks and minimal mu against grid scan", criterion8},
      {"invariant suites", criterion9},
      {"negative controls", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " | " << o.detail.str()
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
