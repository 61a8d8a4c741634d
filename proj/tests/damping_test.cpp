#include "dampwave/damping.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dampwave/initial_data.hpp"

namespace dampwave {
namespace {

constexpr double kPi = std::numbers::pi;

// Independent interval bookkeeping: on-intervals of the growing family are
// [k L0 + T_k, (k+1) L0 + T_k) with T_k = f(1) + ... + f(k).
std::vector<std::pair<double, double>> growing_on_intervals(double L0, const std::function<double(int)>& f,
                                                            double t_max) {
  std::vector<std::pair<double, double>> out;
  double T = 0.0;
  for (int k = 0;; ++k) {
    const double start = k * L0 + T;
    if (start > t_max) break;
    out.emplace_back(start, start + L0);
    T += f(k + 1);
  }
  return out;
}

DampingProfile unit_growing() {
  return DampingProfile::growing_off(DampingProfile::constant(1.0), 1.0, Schedule::power(1.0, 1.0));
}

DampingProfile unit_shrinking() {
  return DampingProfile::shrinking_on(DampingProfile::constant(1.0), WindowShape::indicator, 2.0,
                                      Schedule::shifted_inverse_power(1.0, 1.0), 0.5);
}

TEST(Damping, ConstantEvaluatesEverywhere) {
  auto W = DampingProfile::constant(0.3);
  EXPECT_DOUBLE_EQ(W.eval({1.0, 2.0}, 0.0), 0.3);
  EXPECT_DOUBLE_EQ(W.eval({5.0, 0.0}, 123.0), 0.3);
  EXPECT_THROW(W.eval({0.0, 0.0}, -1.0), std::domain_error);
  EXPECT_THROW(DampingProfile::constant(-0.1), std::invalid_argument);
}

TEST(Damping, GrowingOffOnIntervalBookkeeping) {
  auto W = unit_growing();
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 2.5), 1.0);
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 5.5), 1.0);

  const auto oracle = growing_on_intervals(1.0, [](int j) { return static_cast<double>(j); }, 500.0);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double t = 500.0 * unit_interval(rng());
    bool on = false;
    for (const auto& [a, b] : oracle) on = on || (t >= a && t < b);
    EXPECT_EQ(W.eval({0.0, 0.0}, t), on ? 1.0 : 0.0) << "t = " << t;
  }
}

TEST(Damping, ShrinkingOnWindowBookkeeping) {
  auto W = unit_shrinking();
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 2.4), 1.0);
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 2.6), 0.0);
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(W.eval({0.0, 0.0}, 1.5), 0.0);
}

TEST(Damping, ShrinkingRequiresPositiveFloorAndShortWindows) {
  auto bump = DampingProfile::space_bump(1.0, {kPi, 0.0}, 1.0, 2.0, 1);
  EXPECT_THROW(DampingProfile::shrinking_on(bump, WindowShape::indicator, 2.0,
                                            Schedule::shifted_inverse_power(1.0, 1.0), 0.1),
               std::invalid_argument);
  EXPECT_THROW(DampingProfile::shrinking_on(DampingProfile::constant(1.0), WindowShape::indicator, 2.0,
                                            Schedule::shifted_inverse_power(1.0, 1.0), 0.0),
               std::invalid_argument);
  EXPECT_THROW(DampingProfile::shrinking_on(DampingProfile::constant(1.0), WindowShape::indicator, 0.5,
                                            Schedule::shifted_inverse_power(1.0, 1.0), 0.5),
               std::invalid_argument);
}

TEST(Damping, SnapshotExamples) {
  TorusGrid g(2, 16);
  auto s = snapshot(DampingProfile::constant(0.7), g, 1.0);
  EXPECT_EQ(s.kind(), FieldKind::damping_snapshot);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_DOUBLE_EQ(s[i].real(), 0.7);

  const Point c{kPi, kPi};
  auto bump = DampingProfile::space_bump(2.0, c, 1.0, 2.0, 2);
  auto sb = snapshot(bump, g, 0.0);
  for (std::size_t i = 0; i < sb.size(); ++i) {
    if (torus_distance(g.node(i), c, 2, 2 * kPi) >= 1.0) EXPECT_EQ(sb[i].real(), 0.0);
  }

  auto poly = DampingProfile::poly_product(DampingProfile::constant(1.0), 1.0);
  auto sp = snapshot(poly, g, 3.0);
  for (std::size_t i = 0; i < sp.size(); ++i) EXPECT_DOUBLE_EQ(sp[i].real(), 0.25);
  EXPECT_THROW(snapshot(poly, g, -0.5), std::domain_error);
}

TEST(Damping, DiscontinuityTimes) {
  EXPECT_TRUE(discontinuity_times(DampingProfile::constant(1.0), 10.0).empty());
  const std::vector<double> growing{1, 2, 3, 5, 6};
  EXPECT_EQ(discontinuity_times(unit_growing(), 6.0), growing);
  const auto shrinking = discontinuity_times(unit_shrinking(), 4.0);
  ASSERT_EQ(shrinking.size(), 4u);
  EXPECT_DOUBLE_EQ(shrinking[0], 1.0);
  EXPECT_DOUBLE_EQ(shrinking[1], 2.0);
  EXPECT_DOUBLE_EQ(shrinking[2], 2.5);
  EXPECT_DOUBLE_EQ(shrinking[3], 4.0);
}

TEST(Damping, PolyProductSupNormAndFactorBounds) {
  auto inner = DampingProfile::constant(2.0);
  auto W = DampingProfile::poly_product(inner, 0.5, 0.5, 3.0,
                                        [](const Point&, double t) { return 2.0 * std::pow(1 + t, -0.5); });
  EXPECT_DOUBLE_EQ(W.sup_norm(), 6.0);
  EXPECT_THROW(DampingProfile::poly_product(inner, 0.5, 0.5, 1.0,
                                            [](const Point&, double t) { return 2.0 * std::pow(1 + t, -0.5); }),
               std::invalid_argument);
}

TEST(Damping, GrowingOnDurationSumsToMultipleOfL0) {
  const double L0 = 0.75;
  auto W = DampingProfile::growing_off(DampingProfile::constant(1.0), L0, Schedule::power(0.5, 1.3));
  const auto oracle = growing_on_intervals(L0, [](int j) { return 0.5 * std::pow(j, 1.3); }, 200.0);
  for (std::size_t k = 0; k + 1 < oracle.size(); ++k) {
    // On-duration up to (k+1) L0 + T_k from the switch list.
    const double end = oracle[k].second;
    const auto switches = discontinuity_times(W, end);
    double on = 0.0;
    double prev = 0.0;
    bool state = true;
    for (double s : switches) {
      if (state) on += s - prev;
      prev = s;
      state = !state;
    }
    EXPECT_NEAR(on, (k + 1) * L0, 1e-9);
  }
}

TEST(Damping, ShrinkingIsOffBetweenWindows) {
  auto f = Schedule::shifted_inverse_power(1.0, 0.2);
  auto W = DampingProfile::shrinking_on(DampingProfile::constant(1.0), WindowShape::smooth, 2.0, f, 0.5);
  for (int k = 0; k <= 50; ++k) {
    const double a = 2.0 * k + f(k);
    const double b = 2.0 * (k + 1);
    for (int i = 0; i <= 20; ++i) {
      const double t = a + (b - a) * i / 20.0;
      if (t < b) {
        EXPECT_EQ(W.eval({0.3, 0.0}, t), 0.0) << "k=" << k << " t=" << t;
      }
    }
  }
}

TEST(Damping, NonnegativeAndBoundedOnRandomSamples) {
  auto hat = DampingProfile::space_bump(1.5, {1.0, 2.0}, 1.2, 3.0, 2);
  std::vector<DampingProfile> families{
      DampingProfile::constant(0.4),
      hat,
      DampingProfile::cosine(1.0, 1.0, {1.0, 0.0}),
      DampingProfile::poly_product(hat, 0.7),
      DampingProfile::growing_off(hat, 1.0, Schedule::power(1.0, 1.0)),
      DampingProfile::growing_off(DampingProfile::constant(1.0), 0.5, Schedule::geometric(1.0, 1.5)),
      DampingProfile::shrinking_on(DampingProfile::cosine(2.0, 1.0, {0.0, 1.0}), WindowShape::smooth, 2.0,
                                   Schedule::shifted_inverse_power(1.0, 0.3), 0.9),
  };
  std::mt19937_64 rng(2024);
  for (const auto& W : families) {
    const double sup = W.sup_norm();
    for (int i = 0; i < 10000; ++i) {
      const Point x{2 * kPi * unit_interval(rng()), 2 * kPi * unit_interval(rng())};
      const double t = 300.0 * unit_interval(rng());
      const double w = W.eval(x, t);
      ASSERT_GE(w, 0.0) << W.family();
      ASSERT_LE(w, sup * (1 + 1e-15)) << W.family();
      ASSERT_EQ(w, W.eval(x, t));
    }
  }
}

TEST(Damping, SeparableFactorizationMatchesEval) {
  auto hat = DampingProfile::space_bump(1.5, {1.0, 2.0}, 1.2, 3.0, 2);
  std::vector<DampingProfile> families{
      DampingProfile::poly_product(hat, 0.7),
      DampingProfile::growing_off(hat, 1.0, Schedule::power(1.0, 1.0)),
      DampingProfile::shrinking_on(DampingProfile::constant(2.0), WindowShape::smooth, 2.0,
                                   Schedule::shifted_inverse_power(1.0, 0.3), 0.9),
  };
  std::mt19937_64 rng(5);
  for (const auto& W : families) {
    ASSERT_TRUE(W.separable());
    for (int i = 0; i < 1000; ++i) {
      const Point x{2 * kPi * unit_interval(rng()), 2 * kPi * unit_interval(rng())};
      const double t = 50.0 * unit_interval(rng());
      EXPECT_NEAR(W.spatial(x) * W.temporal(t), W.eval(x, t), 1e-14);
    }
  }
}

}  // namespace
}  // namespace dampwave
