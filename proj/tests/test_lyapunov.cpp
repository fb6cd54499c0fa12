#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "impdelay/integrator.hpp"
#include "impdelay/io.hpp"
#include "impdelay/lyapunov.hpp"
#include "impdelay/presets.hpp"

using namespace impdelay;

namespace {

LyapunovPair square_pair() {
  LyapunovPair p;
  p.v1 = [](Time, const State& x) { return dot(x, x); };
  p.v2 = [](Time, const HistoryFunction&) { return 0.0; };
  p.alpha1_inv = [](double z) { return std::sqrt(z); };
  return p;
}

// x' = -x with contracting jumps x(t_k) = 0.5 x(t_k^-): W = x^2 decays at rate 2 and drops by 1/4 at each jump.
struct Scalar {
  SystemDefinition sys{1, 0.1, [](Time, const HistoryFunction& h) { return State{-h.eval(0.0)[0]}; },
                       [](Time, const HistoryFunction& h) { return State{-0.5 * h.eval(0.0)[0]}; }};
  ImpulseSchedule sched = ImpulseSchedule::periodic({0.5}, 0.5);
  Trajectory run(double t_end = 3.0) const {
    SimConfig cfg;
    cfg.base_step = 0.005;
    cfg.t_end = t_end;
    return simulate(sys, sched, HistoryFunction::constant({1.0}, 0.1), 0.0, cfg);
  }
};

}  // namespace

TEST(SampleW, LeftLimitBeforePostValueAtImpulses) {
  Scalar s;
  auto traj = s.run(1.0);
  auto samples = sample_W(square_pair(), traj);
  std::size_t impulses = 0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (samples[i].side == Side::before) {
      ++impulses;
      EXPECT_EQ(samples[i].t, samples[i + 1].t);
      EXPECT_NEAR(samples[i + 1].w.w, 0.25 * samples[i].w.w, 1e-15);
      EXPECT_EQ(samples[i + 1].n_since_t0, samples[i].n_since_t0 + 1);
    }
  }
  EXPECT_EQ(impulses, 2u);
}

TEST(Envelope, ExactRatesPassAndOverclaimsFail) {
  Scalar s;
  auto traj = s.run();
  // exact: c = 2, sigma = ln 4
  auto ok = check_envelope(square_pair(), traj, s.sched, std::log(4.0), 2.0);
  EXPECT_TRUE(ok.holds);
  EXPECT_LT(ok.max_violation, 1e-6);
  auto bad = check_envelope(square_pair(), traj, s.sched, std::log(4.0), 2.5);
  EXPECT_FALSE(bad.holds);
  auto bad_sigma = check_envelope(square_pair(), traj, s.sched, std::log(8.0), 2.0);
  EXPECT_FALSE(bad_sigma.holds);
}

TEST(Envelope, FinalBound) {
  Scalar s;
  auto traj = s.run();
  // -ln4 N - (2 - lambda)(t - s) <= 0, so mu = 0 and |x| <= sqrt(W0 e^{-lambda t})
  EXPECT_TRUE(check_final_bound(square_pair(), traj, 0.0, 1.0).holds);
  EXPECT_FALSE(check_final_bound(square_pair(), traj, 0.0, 5.0).holds);
}

TEST(Dini, RateCheckSkipsImpulseIntervals) {
  Scalar s;
  auto traj = s.run();
  auto v = dini_rate_check(square_pair(), traj, s.sched, 2.0);
  EXPECT_TRUE(v.holds);
  EXPECT_LT(std::abs(v.worst_excess), 1e-2);
  EXPECT_FALSE(dini_rate_check(square_pair(), traj, s.sched, 2.5, 1e-3).holds);
}

TEST(SpotChecks, PresetConstantsHoldAlongTrajectories) {
  for (const auto& name : preset_names()) {
    auto p = make_preset(name);
    SimConfig cfg;
    cfg.t_end = std::min(p.horizon, 2.0);
    auto traj = simulate(p.system, p.schedule, p.initial, p.t0, cfg);
    EXPECT_TRUE(check_functional_bound(p.pair, traj, p.params.kappa).holds) << name;
    EXPECT_TRUE(check_jump_bound(p.pair, traj, p.params.rho1, p.params.rho2).holds) << name;
  }
}

TEST(SpotChecks, UnderstatedConstantsAreCaught) {
  auto p = make_preset("ex2-c1");
  SimConfig cfg;
  cfg.t_end = 1.0;
  auto traj = simulate(p.system, p.schedule, p.initial, p.t0, cfg);
  EXPECT_FALSE(check_functional_bound(p.pair, traj, 0.5 * p.params.kappa).holds);
  EXPECT_FALSE(check_jump_bound(p.pair, traj, 0.1 * p.params.rho1, 0.0).holds);
}

TEST(LyapunovCsv, RoundTrip) {
  Scalar s;
  auto traj = s.run(1.0);
  std::stringstream ss;
  write_lyapunov_csv(ss, square_pair(), traj, std::log(4.0), 2.0, 0.0, 1e-6);
  const std::string text = ss.str();
  auto rows = read_lyapunov_csv(ss);
  auto samples = sample_W(square_pair(), traj);
  ASSERT_EQ(rows.size(), samples.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].t, samples[i].t);
    EXPECT_EQ(rows[i].w, samples[i].w.w);
  }
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,W1,W2,W,envelope_bound,norm_bound");
}
