#pragma once

/**
 * @file certificate.hpp
 * @brief Global asymptotic stability certificate for impulsive delay systems.
 *
 * Inputs are the scalar constants of a Lyapunov-Krasovskii pair (V1, V2):
 *   D+V <= -c V between impulses,
 *   V1 after a jump <= rho1 V1(t^-) + rho2 sup_{[-tau,0]} V1(t^- + s),
 *   V2 <= kappa sup_{[-tau,0]} V1,
 * together with a convergence rate lambda > 0 and an impulse schedule.
 * The engine selects the impulse exponent sigma, checks the unified
 * inequality -sigma N(t,s) - (c - lambda)(t - s) <= mu, and rewrites it as an
 * ADT or reverse-ADT condition where possible.
 */

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "impdelay/schedule.hpp"

namespace impdelay {

struct CertificateParams {
  double c = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double kappa = 0.0;
  double tau = 1.0;
  double lambda = 1e-6;
  /// When absent, mu is taken as the least value satisfying the unified inequality on the horizon.
  std::optional<double> mu;

  void validate() const {
    if (!std::isfinite(c)) throw ConfigError("c must be finite");
    if (!(rho1 >= 0.0) || !(rho2 >= 0.0) || !(kappa >= 0.0)) throw ConfigError("rho1, rho2 and kappa must be nonnegative");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
    if (mu && !(*mu >= 0.0)) throw ConfigError("mu must be nonnegative");
  }
};

/// Which of the four sigma definitions applies.
enum class SigmaCase { D1, D2, D3, D4, infeasible };

inline const char* to_string(SigmaCase c) {
  switch (c) {
    case SigmaCase::D1: return "D1";
    case SigmaCase::D2: return "D2";
    case SigmaCase::D3: return "D3";
    case SigmaCase::D4: return "D4";
    case SigmaCase::infeasible: return "infeasible";
  }
  return "?";
}

struct SigmaResult {
  SigmaCase case_tag = SigmaCase::infeasible;
  std::optional<double> sigma;
  /// sup_k N(t_k, t_k - tau) used by cases D3/D4.
  std::optional<std::size_t> binding_window_count;
};

/// rho1 + [(1 - rho1) kappa + rho2] e^{c tau}
inline double impulse_combination(double c, double rho1, double rho2, double kappa, double tau) {
  return rho1 + ((1.0 - rho1) * kappa + rho2) * std::exp(c * tau);
}

inline SigmaCase classify_case(double c, double rho1, double rho2, double kappa, double tau) {
  if (c > 0.0) {
    if (rho1 >= 1.0) return SigmaCase::D1;
    return impulse_combination(c, rho1, rho2, kappa, tau) >= 1.0 ? SigmaCase::D2 : SigmaCase::D3;
  }
  if (rho1 < 1.0 && rho1 + (1.0 - rho1) * kappa + rho2 < 1.0) return SigmaCase::D4;
  return SigmaCase::infeasible;
}

inline SigmaCase classify_case(const CertificateParams& p) { return classify_case(p.c, p.rho1, p.rho2, p.kappa, p.tau); }

/// sigma for the destabilizing-impulse cases D1 and D2 (sigma <= 0).
inline SigmaResult sigma_closed_form(const CertificateParams& p) {
  const SigmaCase tag = classify_case(p);
  SigmaResult r;
  r.case_tag = tag;
  if (tag == SigmaCase::D1) {
    r.sigma = -std::log(p.rho1 + p.rho2 * std::exp(p.c * p.tau));
  } else if (tag == SigmaCase::D2) {
    r.sigma = -std::log(impulse_combination(p.c, p.rho1, p.rho2, p.kappa, p.tau));
  } else {
    throw WrongCaseError(std::string("closed-form sigma applies to cases D1/D2, not ") + to_string(tag));
  }
  return r;
}

/// Left side of the D3/D4 defining inequality minus 1 (<= 0 means feasible).
inline double sigma_defining_slack(const CertificateParams& p, SigmaCase tag, double sigma, std::size_t window_count) {
  const double k = (1.0 - p.rho1) * p.kappa + p.rho2;
  const double e = tag == SigmaCase::D3 ? std::exp(p.c * p.tau) : 1.0;
  return p.rho1 * std::exp(sigma) + k * e * std::exp(sigma * static_cast<double>(window_count)) - 1.0;
}

/// Largest sigma > 0 satisfying the D3/D4 inequality for the given window count.
///
/// The left side is increasing in sigma, so bisection on (0, hi] finds the
/// unique boundary. The bracket is shrunk until it stops changing.
inline SigmaResult sigma_feasible_max(const CertificateParams& p, std::size_t window_count) {
  const SigmaCase tag = classify_case(p);
  if (tag != SigmaCase::D3 && tag != SigmaCase::D4) {
    throw WrongCaseError(std::string("feasible-sigma search applies to cases D3/D4, not ") + to_string(tag));
  }
  if (window_count == 0) throw DomainError("window count must be positive");
  if (sigma_defining_slack(p, tag, 0.0, window_count) > 0.0) {
    throw InfeasibleError("defining inequality fails as sigma -> 0+, inconsistent with the case precondition");
  }
  const double k = (1.0 - p.rho1) * p.kappa + p.rho2;
  const double e = tag == SigmaCase::D3 ? std::exp(p.c * p.tau) : 1.0;
  double hi = std::numeric_limits<double>::infinity();
  if (p.rho1 > 0.0) hi = std::min(hi, -std::log(p.rho1));
  if (k > 0.0) hi = std::min(hi, -std::log(k * e) / static_cast<double>(window_count));
  SigmaResult r;
  r.case_tag = tag;
  r.binding_window_count = window_count;
  if (!std::isfinite(hi)) {
    // rho1 = 0 and no delayed contribution: every sigma works.
    r.sigma = std::numeric_limits<double>::infinity();
    return r;
  }
  double lo = 0.0;
  if (sigma_defining_slack(p, tag, hi, window_count) <= 0.0) {
    r.sigma = hi;
    return r;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sigma_defining_slack(p, tag, mid, window_count) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.sigma = lo;
  return r;
}

/// How the unified inequality constrains the impulse times.
enum class Direction { adt, reverse_adt, unconstrained, none };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::adt: return "ADT";
    case Direction::reverse_adt: return "reverse-ADT";
    case Direction::unconstrained: return "unconstrained (arbitrary impulse times)";
    case Direction::none: return "none (no finite dwell-time reformulation)";
  }
  return "?";
}

struct DwellReformulation {
  Direction direction = Direction::none;
  /// Present whenever sigma != 0 and c != lambda.
  std::optional<AdtParams> adt;
};

/// T* = |sigma|/|c - lambda| and N* = mu/|sigma| with the matching direction.
inline DwellReformulation adt_parameters(double sigma, double c, double lambda, double mu) {
  DwellReformulation r;
  if (sigma != 0.0 && c != lambda) {
    r.adt = AdtParams{std::abs(sigma) / std::abs(c - lambda), mu / std::abs(sigma)};
  }
  if (sigma >= 0.0 && c >= lambda) {
    r.direction = Direction::unconstrained;
  } else if (sigma < 0.0 && c > lambda) {
    r.direction = Direction::adt;
  } else if (sigma > 0.0 && c < lambda) {
    r.direction = Direction::reverse_adt;
  } else {
    r.direction = Direction::none;
  }
  return r;
}

struct CountBand {
  double lower;
  double upper;
  bool empty() const { return lower > upper; }
};

/// Bounds on N(t_k, t_k - tau) implied by the D3/D4 inequality (upper) and the reverse ADT condition (lower).
inline CountBand window_count_bounds(const CertificateParams& p, double sigma, const AdtParams& adt) {
  const SigmaCase tag = classify_case(p);
  if (tag != SigmaCase::D3 && tag != SigmaCase::D4) {
    throw WrongCaseError(std::string("window-count bounds apply to cases D3/D4, not ") + to_string(tag));
  }
  if (!(sigma > 0.0)) throw DomainError("window-count bounds need sigma > 0");
  const double head = p.rho1 * std::exp(sigma);
  if (head >= 1.0) throw DomainError("rho1 e^sigma >= 1: upper window-count bound undefined");
  const double k = (1.0 - p.rho1) * p.kappa + p.rho2;
  const double e = tag == SigmaCase::D3 ? std::exp(p.c * p.tau) : 1.0;
  CountBand band;
  band.upper = k > 0.0 ? std::log((1.0 - head) / (k * e)) / sigma : std::numeric_limits<double>::infinity();
  band.lower = p.tau / adt.t_star - adt.n_star;
  return band;
}

/// The six sign combinations of (c, sigma).
inline std::string regime_label(double c, double sigma) {
  if (c > 0.0) {
    if (sigma < 0.0) return "c>0, sigma<0";
    if (sigma == 0.0) return "c>0, sigma=0";
    return "c>0, sigma>0";
  }
  if (sigma > 0.0) return c < 0.0 ? "c<0, sigma>0" : "c=0, sigma>0";
  return "c<=0, sigma<=0";
}

struct CertificateReport {
  CertificateParams params;
  SigmaResult sigma_result;
  std::string regime;
  DwellReformulation dwell;
  /// Least mu on the horizon and the mu actually used.
  MuResult minimal;
  double mu_used = 0.0;
  /// Condition (v): holds iff minimal mu <= mu_used; slack = minimal - mu_used.
  bool condition_v = false;
  double condition_v_slack = 0.0;
  /// Cross-check of the dwell-time rewriting on the same horizon.
  std::optional<DwellVerdict> dwell_check;
  std::optional<CountBand> count_band;
  bool horizon_limited = false;
  bool certified = false;
  std::string reason;
  Time t0 = 0.0;
  Time horizon = 0.0;
};

/// Full pipeline: case selection, sigma, condition (v), dwell-time rewriting, verdict.
inline CertificateReport certify(const CertificateParams& params, const ImpulseSchedule& sched, Time t0, Time horizon) {
  params.validate();
  CertificateReport rep;
  rep.params = params;
  rep.t0 = t0;
  rep.horizon = horizon;
  rep.horizon_limited = !sched.is_periodic();

  const SigmaCase tag = classify_case(params);
  rep.sigma_result.case_tag = tag;
  if (tag == SigmaCase::infeasible) {
    rep.regime = "c<=0, sigma<=0";
    rep.reason = "no sigma case applies (c <= 0 with non-contractive impulses)";
    return rep;
  }
  if (tag == SigmaCase::D1 || tag == SigmaCase::D2) {
    rep.sigma_result = sigma_closed_form(params);
  } else {
    const auto wc = window_counts(sched, params.tau, horizon);
    if (wc.supremum == 0) {
      rep.reason = "schedule has no impulses on the horizon; cases D3/D4 need a window count";
      return rep;
    }
    try {
      rep.sigma_result = sigma_feasible_max(params, wc.supremum);
    } catch (const InfeasibleError& e) {
      rep.reason = e.what();
      return rep;
    }
  }
  const double sigma = *rep.sigma_result.sigma;
  rep.regime = regime_label(params.c, sigma);

  rep.minimal = minimal_mu(sched, sigma, params.c, params.lambda, t0, horizon);
  rep.mu_used = params.mu.value_or(rep.minimal.mu);
  rep.condition_v_slack = rep.minimal.mu - rep.mu_used;
  rep.condition_v = !rep.minimal.unbounded && std::isfinite(rep.mu_used) && rep.condition_v_slack <= kSlackTolerance;

  rep.dwell = adt_parameters(sigma, params.c, params.lambda, rep.mu_used);
  if (rep.dwell.adt && std::isfinite(rep.dwell.adt->n_star)) {
    if (rep.dwell.direction == Direction::adt) {
      rep.dwell_check = check_adt(sched, *rep.dwell.adt, t0, horizon);
    } else if (rep.dwell.direction == Direction::reverse_adt) {
      rep.dwell_check = check_reverse_adt(sched, *rep.dwell.adt, t0, horizon);
    }
    if ((tag == SigmaCase::D3 || tag == SigmaCase::D4) && std::isfinite(sigma) && params.rho1 * std::exp(sigma) < 1.0) {
      rep.count_band = window_count_bounds(params, sigma, *rep.dwell.adt);
    }
  }

  if (!rep.condition_v) {
    if (rep.minimal.unbounded) {
      rep.reason = "unified inequality fails: left side drifts upward by " + std::to_string(*rep.minimal.drift) +
                   " per period (minimal mu unbounded)";
    } else {
      rep.reason = "unified inequality fails: minimal mu exceeds the supplied mu";
    }
    return rep;
  }
  rep.certified = true;
  rep.reason = rep.horizon_limited ? "GAS certified on the horizon of an explicit impulse list" : "GAS certified";
  return rep;
}

}  // namespace impdelay
