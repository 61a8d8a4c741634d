#include "dampwave/initial_data.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace dampwave {

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

Field random_band_limited(const TorusGrid& grid, int band, std::uint64_t seed, FieldKind kind,
                          bool include_mean, int min_band) {
  if (band < 1) throw std::invalid_argument("random_band_limited: band must be >= 1");
  if (min_band < 0 || min_band > band) throw std::invalid_argument("random_band_limited: need 0 <= min_band <= band");
  if (2 * band >= grid.points_per_axis()) {
    throw std::invalid_argument("random_band_limited: band exceeds the grid's Nyquist limit");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return 2.0 * unit_interval(rng()) - 1.0; };

  struct Term {
    int m0, m1;
    double a, b;
  };
  std::vector<Term> terms;
  const int lo1 = grid.dim() == 2 ? -band : 0;
  const int hi1 = grid.dim() == 2 ? band : 0;
  for (int m0 = 0; m0 <= band; ++m0) {
    for (int m1 = lo1; m1 <= hi1; ++m1) {
      // One representative of each +-m pair.
      if (m0 == 0 && m1 < 0) continue;
      if (m0 == 0 && m1 == 0 && !include_mean) continue;
      if (std::hypot(m0, m1) < min_band) continue;
      const double scale = 1.0 / (1.0 + std::hypot(m0, m1));
      const double a = uniform() * scale;
      const double b = (m0 == 0 && m1 == 0) ? 0.0 : uniform() * scale;
      terms.push_back({m0, m1, a, b});
    }
  }
  return Field::sample(grid, kind, [&](const Point& x) {
    double acc = 0.0;
    const double k = 2.0 * std::numbers::pi / grid.period();
    for (const auto& t : terms) {
      const double phase = k * (t.m0 * x[0] + t.m1 * x[1]);
      acc += t.a * std::cos(phase) + t.b * std::sin(phase);
    }
    return Complex(acc, 0.0);
  });
}

std::pair<Field, Field> random_wave_data(const TorusGrid& grid, int band, std::uint64_t seed, int min_band) {
  std::seed_seq seq{seed, std::uint64_t{0x9e3779b97f4a7c15ULL}};
  std::uint64_t seeds[2];
  std::uint32_t raw[4];
  seq.generate(raw, raw + 4);
  seeds[0] = (std::uint64_t{raw[0]} << 32) | raw[1];
  seeds[1] = (std::uint64_t{raw[2]} << 32) | raw[3];
  return {random_band_limited(grid, band, seeds[0], FieldKind::position, false, min_band),
          random_band_limited(grid, band, seeds[1], FieldKind::velocity, false, min_band)};
}

Field cosine_mode(const TorusGrid& grid, std::array<int, 2> m, double amplitude, FieldKind kind) {
  const double k = 2.0 * std::numbers::pi / grid.period();
  return Field::sample(grid, kind, [&](const Point& x) {
    return Complex(amplitude * std::cos(k * (m[0] * x[0] + m[1] * x[1])), 0.0);
  });
}

}  // namespace dampwave
