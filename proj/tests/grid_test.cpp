#include "dampwave/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dampwave/initial_data.hpp"

namespace dampwave {
namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(TorusGrid, RejectsInvalidParameters) {
  EXPECT_THROW(TorusGrid(3, 16), std::invalid_argument);
  EXPECT_THROW(TorusGrid(1, 3), std::invalid_argument);
  EXPECT_THROW(TorusGrid(1, 16, 0.0), std::invalid_argument);
  TorusGrid g(2, 8);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_DOUBLE_EQ(g.spacing(), 2 * kPi / 8);
  EXPECT_DOUBLE_EQ(g.node(9)[0], g.spacing());
  EXPECT_DOUBLE_EQ(g.node(9)[1], g.spacing());
}

TEST(Field, ValidatesSizeAndDampingSign) {
  TorusGrid g(1, 8);
  EXPECT_THROW(Field(g, FieldKind::position, std::vector<Complex>(7)), std::invalid_argument);
  std::vector<Complex> neg(8, Complex(-0.1, 0.0));
  EXPECT_THROW(Field(g, FieldKind::damping_snapshot, neg), std::invalid_argument);
}

TEST(Laplacian, CosineIsEigenfunction) {
  TorusGrid g(1, 32);
  auto f = Field::sample(g, FieldKind::position, [](const Point& x) { return std::cos(x[0]); });
  auto expected = Field::sample(g, FieldKind::position, [](const Point& x) { return -std::cos(x[0]); });
  EXPECT_LT(max_abs_diff(laplacian(f), expected), 1e-13);
}

TEST(Laplacian, ConstantsAreHarmonic) {
  TorusGrid g(2, 16);
  auto f = Field::sample(g, FieldKind::position, [](const Point&) { return 1.0; });
  auto lap = laplacian(f);
  for (std::size_t i = 0; i < lap.size(); ++i) EXPECT_LT(std::abs(lap[i]), 1e-14);
}

TEST(Laplacian, TwoDimensionalMode) {
  TorusGrid g(2, 32);
  auto f = Field::sample(g, FieldKind::position,
                         [](const Point& x) { return std::cos(2 * x[0] + 3 * x[1]); });
  auto expected = Field::sample(g, FieldKind::position,
                                [](const Point& x) { return -13.0 * std::cos(2 * x[0] + 3 * x[1]); });
  EXPECT_LT(max_abs_diff(laplacian(f), expected), 1e-11);
}

TEST(Laplacian, RejectsNonPositionFields) {
  TorusGrid g(1, 8);
  EXPECT_THROW(laplacian(Field::zeros(g, FieldKind::velocity)), std::invalid_argument);
}

TEST(Energy, ClosedFormExamples) {
  TorusGrid g(1, 64);
  auto cosx = Field::sample(g, FieldKind::position, [](const Point& x) { return std::cos(x[0]); });
  auto zero_v = Field::zeros(g, FieldKind::velocity);
  EXPECT_NEAR(energy(cosx, zero_v), kPi / 2, 1e-13);

  auto one_v = Field::sample(g, FieldKind::velocity, [](const Point&) { return 1.0; });
  EXPECT_NEAR(energy(Field::zeros(g, FieldKind::position), one_v), kPi, 1e-13);

  auto sinx_v = Field::sample(g, FieldKind::velocity, [](const Point& x) { return std::sin(x[0]); });
  EXPECT_NEAR(energy(cosx, sinx_v), kPi, 1e-13);
}

TEST(Energy, ConstantPositionHasZeroEnergy) {
  TorusGrid g(2, 16);
  auto c = Field::sample(g, FieldKind::position, [](const Point&) { return 3.5; });
  EXPECT_NEAR(energy(c, Field::zeros(g, FieldKind::velocity)), 0.0, 1e-12);
}

TEST(Energy, RejectsMismatchedGridsAndKinds) {
  TorusGrid a(1, 16), b(1, 32);
  EXPECT_THROW(energy(Field::zeros(a, FieldKind::position), Field::zeros(b, FieldKind::velocity)),
               std::invalid_argument);
  EXPECT_THROW(energy(Field::zeros(a, FieldKind::velocity), Field::zeros(a, FieldKind::velocity)),
               std::invalid_argument);
}

TEST(L2Norm, ClosedFormExamples) {
  TorusGrid g(1, 64);
  auto s = Field::sample(g, FieldKind::position, [](const Point& x) { return std::sin(x[0]); });
  EXPECT_NEAR(std::pow(l2_norm(s), 2), kPi, 1e-13);
  EXPECT_EQ(l2_norm(Field::zeros(g, FieldKind::position)), 0.0);
  auto e8 = Field::sample(g, FieldKind::position,
                          [](const Point& x) { return std::exp(Complex(0.0, 8.0 * x[0])); });
  EXPECT_NEAR(std::pow(l2_norm(e8), 2), 2 * kPi, 1e-12);
}

// Random band-limited fields: Parseval, symmetry, positivity.
class GridProperties : public ::testing::TestWithParam<int> {};

TEST_P(GridProperties, ParsevalSymmetryPositivity) {
  const int dim = GetParam();
  TorusGrid g(dim, dim == 1 ? 64 : 32);
  const auto spectral = Spectral::for_grid(g);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto f = random_band_limited(g, 6, seed, FieldKind::position, true);
    auto h = random_band_limited(g, 6, seed + 100, FieldKind::position, true);

    std::vector<Complex> coeffs(f.size());
    spectral->forward(f.values(), coeffs);
    double coeff_sum = 0.0;
    for (const auto& c : coeffs) coeff_sum += std::norm(c);
    const double coeff_space = coeff_sum * g.cell_volume() / static_cast<double>(f.size());
    const double phys = std::pow(l2_norm(f), 2);
    EXPECT_NEAR(phys, coeff_space, 1e-12 * phys);

    const Complex lhs = inner(laplacian(f), h);
    const Complex rhs = inner(f, laplacian(h));
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * std::max(1.0, std::abs(lhs)));

    EXPECT_GE(energy(f, h.with_kind(FieldKind::velocity)), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, GridProperties, ::testing::Values(1, 2));

TEST(FieldCsv, WritesIndexAndComponents) {
  TorusGrid g(2, 4);
  auto f = Field::sample(g, FieldKind::position, [](const Point& x) { return Complex(x[0], 1.0); });
  std::ostringstream out;
  write_csv(f, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i,j,value_re,value_im");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0,1");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 16);
}

TEST(RandomData, MinBandRemovesLowModes) {
  for (int dim : {1, 2}) {
    TorusGrid g(dim, 32);
    auto [u, v] = random_wave_data(g, 10, 3, 6);
    auto spectral = Spectral::for_grid(g);
    std::vector<Complex> uh(g.size()), vh(g.size());
    spectral->forward(u.values(), uh);
    spectral->forward(v.values(), vh);
    const auto k2 = spectral->wavenumber_squared();
    double low = 0.0, high = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      (k2[i] < 36.0 - 1e-9 ? low : high) += std::norm(uh[i]) + std::norm(vh[i]);
    }
    EXPECT_LT(low, 1e-24 * high) << dim;
    EXPECT_GT(high, 0.0);
  }
  EXPECT_THROW(random_wave_data(TorusGrid(1, 32), 4, 1, 5), std::invalid_argument);
}

}  // namespace
}  // namespace dampwave
