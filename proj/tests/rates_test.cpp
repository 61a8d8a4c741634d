#include "dampwave/rates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dampwave/initial_data.hpp"

namespace dampwave {
namespace {

EnergyTrace synthetic(double t_end, int n, const std::function<double(double)>& E,
                      const std::function<double(double)>& sigma = {}) {
  EnergyTrace tr;
  for (int i = 0; i <= n; ++i) {
    const double t = t_end * i / n;
    tr.times.push_back(t);
    tr.energy.push_back(E(t));
    tr.damping_work.push_back(0.0);
    tr.cum_obs.push_back(0.0);
    if (sigma) tr.sigma.push_back(sigma(t));
  }
  return tr;
}

TEST(Fit, ExpSigmaRecoversPlantedExponent) {
  const auto tr = synthetic(50.0, 200, [](double t) { return 3.0 * std::exp(-0.4 * t); },
                            [](double t) { return 0.2 * t; });
  const auto f = fit(tr, RateModel::exp_sigma);
  EXPECT_NEAR(f.c, 2.0, 1e-6);
  EXPECT_NEAR(f.C, 3.0, 3e-6);
  EXPECT_LT(f.residual, 1e-9);
  EXPECT_DOUBLE_EQ(f.t_min, 10.0);
  EXPECT_DOUBLE_EQ(f.t_max, 50.0);
}

TEST(Fit, StretchedRecoversPlantedExponent) {
  const auto tr = synthetic(100.0, 400, [](double t) { return std::exp(-std::sqrt(t)); });
  const auto f = fit(tr, RateModel::stretched);
  EXPECT_NEAR(f.p, 0.5, 1e-6);
  EXPECT_NEAR(f.c, 1.0, 1e-6);
}

TEST(Fit, PowerAndLogPowerRecoverPlantedExponents) {
  const auto p = fit(synthetic(100.0, 400, [](double t) { return 2.0 * std::pow(1.0 + t, -1.7); }), RateModel::power);
  EXPECT_NEAR(p.c, 1.7, 1e-6 * 1.7);
  EXPECT_NEAR(p.C, 2.0, 1e-6 * 2.0);
  const auto l =
      fit(synthetic(100.0, 400, [](double t) { return std::pow(std::log(2.0 + t), -0.6); }), RateModel::log_power);
  EXPECT_NEAR(l.c, 0.6, 1e-6 * 0.6);
}

TEST(Fit, SkipsSamplesBelowEnergyFloor) {
  // exp(-20 sqrt t) crosses 1e-45 near t = 27, then sits on a fake roundoff
  // plateau; only the clean stretch is fitted.
  const auto tr = synthetic(100.0, 400, [](double t) { return t < 60 ? std::exp(-20.0 * std::sqrt(t)) : 1e-61; });
  const auto f = fit(tr, RateModel::stretched, std::pair{20.0, 100.0});
  EXPECT_NEAR(f.p, 0.5, 1e-6);
  EXPECT_NEAR(f.c, 20.0, 2e-5);
  EXPECT_EQ(f.samples, 28u);  // t = 20, 20.25, ..., 26.75
}

TEST(Fit, PowerBeatsStretchedOnPowerData) {
  const auto tr = synthetic(200.0, 400, [](double t) { return std::pow(1.0 + t, -2.0); });
  EXPECT_LT(fit(tr, RateModel::power).residual, fit(tr, RateModel::stretched).residual);
}

TEST(Fit, Errors) {
  auto tr = synthetic(10.0, 20, [](double t) { return std::exp(-t); });
  EXPECT_THROW(fit(tr, RateModel::exp_sigma), std::invalid_argument);  // no sigma channel
  EXPECT_THROW(fit(tr, RateModel::power, std::pair{9.0, 10.0}), std::invalid_argument);  // 3 samples
  EXPECT_THROW(fit(tr, RateModel::power, std::pair{5.0, 20.0}), std::out_of_range);
  tr.energy[15] = 0.0;
  EXPECT_THROW(fit(tr, RateModel::power), std::invalid_argument);
  EXPECT_THROW(parse_rate_model("cubic"), std::invalid_argument);
}

TEST(Fit, MeasuredConstantDampingExponent) {
  // Modes 20..40 only. Each mode's energy is e^{-2at} up to a relative
  // oscillation of size a / omega <= 0.005, which bounds the overshoot of c.
  // dt is small enough that rk4's own damping, about (k dt)^6 / 72 per step,
  // stays out of the fitted rate.
  TorusGrid g(1, 128);
  std::vector<Complex> u(g.size()), v(g.size());
  for (int m = 20; m <= 40; ++m) {
    const auto mode = cosine_mode(g, {m, 0}, 1.0 / m, FieldKind::position);
    for (std::size_t i = 0; i < g.size(); ++i) {
      u[i] += mode[i];
      v[i] += -0.1 * mode[i];
    }
  }
  SolverConfig cfg;
  cfg.dt = 2e-3;
  cfg.trace_stride = 100;
  auto r = evolve(WaveState(Field(g, FieldKind::position, u), Field(g, FieldKind::velocity, v)),
                  DampingProfile::constant(0.1), 40.0, cfg);
  for (double t : r.trace.times) r.trace.sigma.push_back(0.1 * t);
  const auto f = fit(r.trace, RateModel::exp_sigma);
  EXPECT_GE(f.c, 1.6);
  EXPECT_LE(f.c, 2.0 + 0.005);
  EXPECT_TRUE(sigma_exponent_bound_check(f).pass);
}

TEST(SigmaBound, Verdicts) {
  RateFit f;
  f.c = 1.8;
  EXPECT_TRUE(sigma_exponent_bound_check(f).pass);
  f.c = 2.05;
  EXPECT_TRUE(sigma_exponent_bound_check(f).pass);
  f.c = 2.5;
  const auto v = sigma_exponent_bound_check(f);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.diagnostic.empty());
  f.model = RateModel::power;
  EXPECT_THROW(sigma_exponent_bound_check(f), std::invalid_argument);
}

TEST(Growing, ClosedFormInverses) {
  const double C1 = 1.5;
  for (double alpha : {0.0, 1.0, 2.5}) {
    GrowingEnvelope env(Schedule::power(C1, alpha), 1.0, C1);
    for (double s : {0.1, 3.0, 40.0}) {
      EXPECT_NEAR(env.F_inverse(s), std::pow((alpha + 1) * s / C1 + 1, 1 / (alpha + 1)) - 1, 1e-9);
      EXPECT_NEAR(env.B_inverse(s), std::pow((alpha + 1) * s / C1, 1 / (alpha + 1)), 1e-9);
    }
    EXPECT_EQ(env.form().kind, RateKind::stretched);
    EXPECT_DOUBLE_EQ(env.form().exponent, 1 / (alpha + 1));
  }
  const double r = 1.3;
  GrowingEnvelope geo(Schedule::geometric(C1, r), 1.0, C1 * r);
  for (double s : {0.1, 3.0, 40.0}) {
    EXPECT_NEAR(geo.F_inverse(s), std::log(std::log(r) * s / (C1) + r) / std::log(r) - 1, 1e-9);
    EXPECT_NEAR(geo.B_inverse(s), std::log(std::log(r) * s / C1 + 1) / std::log(r), 1e-9);
  }
  EXPECT_EQ(geo.form().kind, RateKind::power);
  GrowingEnvelope dexp(Schedule::double_exponential(C1), 1.0, C1);
  const double e = std::numbers::e;
  for (double s : {0.1, 3.0, 40.0, 1e4}) {
    EXPECT_NEAR(dexp.F_inverse(s), std::log(std::log(s / C1 + std::exp(e))) - 1, 1e-9);
    EXPECT_NEAR(dexp.B_inverse(s), std::log(std::log(s / C1 + e)), 1e-9);
  }
  EXPECT_EQ(dexp.form().kind, RateKind::log_power);
}

TEST(Growing, InversesRoundTrip) {
  const std::vector<GrowingEnvelope> envs{
      {Schedule::power(1.0, 1.0), 1.0, 1.0},
      {Schedule::geometric(1.0, 1.1), 1.0, 1.1},
      {Schedule::double_exponential(1.0), 1.0, 1.0},
  };
  for (const auto& env : envs) {
    for (double x = 0.0; x <= 50.0; x += 0.5) {
      const double F = env.F(x), B = env.B(x);
      if (!std::isfinite(F) || F > 1e300) break;  // the double exponential overflows past x ~ 5.5
      EXPECT_NEAR(env.F_inverse(F), x, 1e-9) << env.schedule().name() << " x = " << x;
      if (std::isfinite(B)) EXPECT_NEAR(env.B_inverse(B), x, 1e-9) << env.schedule().name() << " x = " << x;
    }
  }
}

TEST(Growing, BracketContainsCountedIntervals) {
  const std::vector<GrowingEnvelope> envs{
      {Schedule::power(1.0, 1.0), 1.0, 1.0},
      {Schedule::power(0.5, 2.0), 2.0, 0.5},
      {Schedule::geometric(1.0, 1.5), 0.5, 1.5},
  };
  for (const auto& env : envs) {
    for (double t = 0.0; t <= 400.0; t += 3.7) {
      const auto p = predict_growing(env, t);
      EXPECT_LE(p.N_lower, static_cast<double>(p.N) + 1e-12) << t;
      EXPECT_LE(static_cast<double>(p.N), p.N_upper + 1e-12) << t;
      EXPECT_LE(p.F_inv, p.B_inv + 3.0);
      EXPECT_LE(p.upper_rate, 1.0);
    }
  }
}

TEST(Growing, CountMatchesDampingSchedule) {
  // f(j) = j, L0 = 1: on-intervals start at 0, 2, 5, 9, 14, ...
  GrowingEnvelope env(Schedule::power(1.0, 1.0), 1.0, 1.0);
  EXPECT_EQ(env.completed_on_intervals(0.5), 0);
  EXPECT_EQ(env.completed_on_intervals(1.0), 1);
  EXPECT_EQ(env.completed_on_intervals(2.9), 1);
  EXPECT_EQ(env.completed_on_intervals(3.0), 2);
  EXPECT_EQ(env.completed_on_intervals(10.0), 4);
}

TEST(Growing, RejectsScheduleBelowC1) {
  EXPECT_THROW(GrowingEnvelope(Schedule::power(1.0, 1.0), 1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(GrowingEnvelope(Schedule::shifted_inverse_power(1.0, 1.0), 1.0, 0.1), std::invalid_argument);
}

TEST(Growing, EnvelopeExponentsForLinearSchedule) {
  GrowingEnvelope env(Schedule::power(1.0, 1.0), 1.0, 1.0);
  const auto [upper, lower] = envelope_exponents(env, 80.0, 400.0);
  EXPECT_NEAR(lower, 0.5, 1e-9);  // B^{-1}(t) = sqrt(2t)
  EXPECT_GT(upper, 0.5);
  EXPECT_LT(upper, 0.6);
}

TEST(Shrinking, RegimesAndGap) {
  auto p = predict_shrinking(0.2, 2.0);
  EXPECT_EQ(p.upper.kind, RateKind::stretched);
  EXPECT_NEAR(p.upper.exponent, 0.4, 1e-15);
  EXPECT_EQ(p.lower.kind, RateKind::stretched);
  EXPECT_NEAR(p.lower.exponent, 0.8, 1e-15);
  EXPECT_TRUE(exponent_within(p, 0.35));
  EXPECT_TRUE(exponent_within(p, 0.85));
  EXPECT_FALSE(exponent_within(p, 0.95));

  p = predict_shrinking(1.0 / 3.0, 2.0);
  EXPECT_EQ(p.upper.kind, RateKind::power);
  EXPECT_NEAR(p.lower.exponent, 2.0 / 3.0, 1e-15);

  p = predict_shrinking(2.0, 2.0);
  EXPECT_EQ(p.upper.kind, RateKind::stall);
  EXPECT_EQ(p.lower.kind, RateKind::none);
  EXPECT_FALSE(p.lower_threshold.has_value());

  p = predict_shrinking(0.5, 4.0, 2.0, 3.0);
  EXPECT_NEAR(*p.lower_threshold, 2.0 * 2.0 * 3.0 / (0.5 * 2.0), 1e-12);
}

TEST(PolyRate, Regimes) {
  EXPECT_EQ(poly_rate_check(0.0).upper.kind, RateKind::exponential);
  const auto half = poly_rate_check(0.5, 1.0, 2.0);
  EXPECT_EQ(half.upper.kind, RateKind::stretched);
  EXPECT_DOUBLE_EQ(half.upper.exponent, 0.5);
  EXPECT_DOUBLE_EQ(*half.lower_threshold, 8.0);
  EXPECT_EQ(poly_rate_check(1.0).upper.kind, RateKind::power);
  EXPECT_DOUBLE_EQ(*poly_rate_check(1.0, 1.5, 1.0).lower_threshold, 3.0);
  EXPECT_EQ(poly_rate_check(1.5).upper.kind, RateKind::none);
}

}  // namespace
}  // namespace dampwave
