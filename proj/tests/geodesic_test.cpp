#include "dampwave/geodesic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dampwave/initial_data.hpp"

namespace dampwave {
namespace {

constexpr double kPi = std::numbers::pi;

DampingProfile unit_growing() {
  return DampingProfile::growing_off(DampingProfile::constant(1.0), 1.0, Schedule::power(1.0, 1.0));
}

DampingProfile one_plus_cos() { return DampingProfile::cosine(1.0, 1.0, {1.0, 0.0}); }

// Dense Simpson oracle for 1 + cos(x0 + s) over [0, T].
double cosine_oracle(double x0, double T) {
  const int n = 20000;
  const double h = T / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * (1.0 + std::cos(x0 + i * h));
  }
  return acc * h / 3.0;
}

TEST(LineIntegral, Examples) {
  const auto g1 = Geodesic::on_circle(0.7, 1);
  EXPECT_NEAR(line_integral(DampingProfile::constant(0.4), g1, 0.0, 3.0), 1.2, 1e-12);
  EXPECT_NEAR(line_integral(one_plus_cos(), Geodesic::on_circle(0.0, 1), 0.0, 2 * kPi), 2 * kPi, 1e-9);
  EXPECT_NEAR(line_integral(unit_growing(), g1, 0.0, 6.0), 3.0, 1e-12);
  EXPECT_THROW(line_integral(DampingProfile::constant(1.0), g1, 2.0, 1.0), std::invalid_argument);
}

TEST(LineIntegral, MatchesDenseOracleOffPeriod) {
  for (double x0 : {0.0, 0.5, 2.0, 4.1}) {
    EXPECT_NEAR(line_integral(one_plus_cos(), Geodesic::on_circle(x0, 1), 0.0, 3.3, 1e-3),
                cosine_oracle(x0, 3.3), 1e-6);
  }
}

TEST(PropagatorG, Examples) {
  const auto g = Geodesic::on_torus({1.0, 2.0}, 0.3);
  EXPECT_EQ(propagator_G(DampingProfile::constant(0.0), g, 0.0, 5.0), 1.0);
  EXPECT_NEAR(propagator_G(DampingProfile::constant(0.5), g, 1.0, 3.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(propagator_G(unit_growing(), Geodesic::on_circle(0.0, -1), 0.0, 6.0), std::exp(-3.0), 1e-12);
  EXPECT_THROW(propagator_G(DampingProfile::constant(0.5), g, 3.0, 1.0), std::invalid_argument);
}

TEST(PropagatorG, InUnitIntervalAndOneAtStart) {
  auto W = DampingProfile::growing_off(DampingProfile::space_bump(2.0, {1.0, 1.0}, 1.5, 2.0, 2), 1.0,
                                       Schedule::power(1.0, 1.0));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto g = Geodesic::on_torus({2 * kPi * unit_interval(rng()), 2 * kPi * unit_interval(rng())},
                                      2 * kPi * unit_interval(rng()));
    const double t0 = 10.0 * unit_interval(rng());
    const double t = t0 + 10.0 * unit_interval(rng());
    const double G = propagator_G(W, g, t0, t);
    EXPECT_GT(G, 0.0);
    EXPECT_LE(G, 1.0);
    EXPECT_EQ(propagator_G(W, g, t0, t0), 1.0);
  }
}

TEST(Sigma, Examples) {
  GeodesicSampling s;
  const auto c = sigma(DampingProfile::constant(0.25), 4.0, s, 2);
  EXPECT_NEAR(c.value, 1.0, 1e-12);

  // Bump centred at x1 = pi with radius 2 misses the strip |x1| < 0.5 (mod 2 pi).
  auto bump = DampingProfile::space_bump(1.0, {kPi, kPi}, 2.0, 2.0, 2);
  for (double t : {1.0, 10.0, 50.0}) {
    const auto r = sigma(bump, t, s, 2);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(line_integral(bump, r.witness, 0.0, t), 0.0);
  }

  const auto cs = sigma(one_plus_cos(), 2 * kPi, s, 1);
  EXPECT_NEAR(cs.value, 2 * kPi, 1e-6);
}

TEST(Sigma, WitnessAndInfimumProperty) {
  GeodesicSampling s;
  s.n_points = 16;
  s.n_directions = 8;
  auto W = DampingProfile::space_bump(1.0, {1.0, 2.0}, 1.8, 2.0, 2);
  const double t = 7.0;
  const auto r = sigma(W, t, s, 2);
  EXPECT_NEAR(r.value, line_integral(W, r.witness, 0.0, t), 1e-12);
  for (const auto& g : sample_geodesics(s, 2)) {
    EXPECT_LE(r.value, line_integral(W, g, 0.0, t) + 1e-12);
  }
}

TEST(Sigma, CurveIsNondecreasing) {
  GeodesicSampling s;
  s.n_points = 12;
  s.n_directions = 8;
  auto W = DampingProfile::growing_off(DampingProfile::space_bump(1.0, {1.0, 2.0}, 1.8, 2.0, 2), 1.0,
                                       Schedule::power(1.0, 1.0));
  std::vector<double> times;
  for (int i = 1; i <= 40; ++i) times.push_back(0.5 * i);
  const auto curve = sigma_curve(W, times, s, 2);
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_GE(curve[i], curve[i - 1]);
}

TEST(Sigma, RefinementNeverIncreases) {
  auto W = DampingProfile::space_bump(1.0, {1.0, 2.0}, 2.2, 1.0, 2);
  GeodesicSampling coarse;
  coarse.n_points = 8;
  coarse.n_directions = 4;
  coarse.refine = false;
  GeodesicSampling fine = coarse;
  fine.n_points = 16;
  fine.n_directions = 8;
  GeodesicSampling polished = fine;
  polished.refine = true;
  for (double t : {2.0, 5.0, 9.0}) {
    const double a = sigma(W, t, coarse, 2).value;
    const double b = sigma(W, t, fine, 2).value;
    const double c = sigma(W, t, polished, 2).value;
    EXPECT_LE(b, a + 1e-12);
    EXPECT_LE(c, b + 1e-12);
  }
}

TEST(WindowAverage, Examples) {
  GeodesicSampling s;
  s.n_points = 8;
  s.n_directions = 4;
  for (double T : {0.5, 3.0, 10.0}) EXPECT_NEAR(L_of_T(DampingProfile::constant(0.3), T, s, 2).value, 0.3, 1e-12);
  EXPECT_NEAR(L_infinity(DampingProfile::constant(0.3), s, 8.0, 2).value, 0.3, 1e-12);

  auto vanishing = DampingProfile::space_bump(1.0, {kPi, kPi}, 2.0, 2.0, 2);
  EXPECT_EQ(L_of_T(vanishing, 4.0, s, 2).value, 0.0);
  EXPECT_THROW(L_of_T(vanishing, 0.0, s, 2), std::invalid_argument);
}

TEST(WindowAverage, PolyProductTendsToZeroAsStartGridExtends) {
  auto W = DampingProfile::poly_product(DampingProfile::constant(1.0), 1.0);
  const double T = 2.0;
  double previous = 1.0;
  for (double t0_max : {10.0, 100.0, 1000.0}) {
    GeodesicSampling s;
    s.n_points = 4;
    s.t0_max = t0_max;
    s.refine = false;
    const double value = L_of_T(W, T, s, 1).value;
    EXPECT_NEAR(value, std::log((1 + t0_max + T) / (1 + t0_max)) / T, 1e-6);
    EXPECT_LT(value, previous);
    previous = value;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(WindowAverage, SuperadditivityOnLatticeTimes) {
  // Shifting a lattice geodesic by a lattice multiple keeps it in the sample,
  // so s L(s) + t L(t) <= (s + t) L(s + t) holds up to quadrature error.
  GeodesicSampling s;
  s.n_points = 32;
  s.quadrature_step = 1e-3;
  s.refine = false;
  auto W = DampingProfile::space_bump(1.0, {2.0, 0.0}, 1.0, 3.0, 1);
  const double h = 2 * kPi / s.n_points;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const double a = h * (1 + static_cast<int>(rng() % 64));
    const double b = h * (1 + static_cast<int>(rng() % 64));
    const double la = L_of_T(W, a, s, 1).value;
    const double lb = L_of_T(W, b, s, 1).value;
    const double lab = L_of_T(W, a + b, s, 1).value;
    EXPECT_GE((a + b) * lab, a * la + b * lb - 1e-6) << "s=" << a << " t=" << b;
  }
}

TEST(Tgcc, Examples) {
  GeodesicSampling s;
  s.n_points = 8;
  s.n_directions = 4;
  const auto c = check_tgcc(DampingProfile::constant(0.6), 1.0, s, 2);
  EXPECT_TRUE(c.satisfied);
  EXPECT_NEAR(c.min_average, 0.6, 1e-12);
  EXPECT_EQ(c.curve.size(), 4u);

  const auto b = check_tgcc(DampingProfile::space_bump(1.0, {kPi, kPi}, 2.0, 2.0, 2), 1.0, s, 2);
  EXPECT_FALSE(b.satisfied);
  EXPECT_EQ(b.min_average, 0.0);
  EXPECT_EQ(line_integral(DampingProfile::space_bump(1.0, {kPi, kPi}, 2.0, 2.0, 2), b.witness, b.witness_t0,
                          b.witness_t0 + b.witness_T),
            0.0);
}

TEST(Tgcc, GrowingOffFailsOnceLongGapsAreSampled) {
  // Oracle: on-intervals start at k + k(k+1)/2; the gap after the k-th one
  // has length k + 1, so t0 = 78 opens the zero window [78, 88].
  GeodesicSampling s;
  s.n_points = 4;
  s.t0_max = 100.0;
  s.n_start_times = 101;
  s.refine = false;
  const auto r = check_tgcc(unit_growing(), 10.0, s, 1, 1);
  EXPECT_FALSE(r.satisfied);
  EXPECT_EQ(r.min_average, 0.0);
  EXPECT_NEAR(line_integral(unit_growing(), r.witness, r.witness_t0, r.witness_t0 + 10.0), 0.0, 1e-12);

  // The window [6, 16] alone already averages 2/10.
  EXPECT_NEAR(line_integral(unit_growing(), Geodesic::on_circle(0.0, 1), 6.0, 16.0) / 10.0, 0.2, 1e-12);
}

}  // namespace
}  // namespace dampwave
