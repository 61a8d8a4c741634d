#pragma once

#include <cstdint>
#include <utility>

#include "dampwave/grid.hpp"

namespace dampwave {

/// Portable uniform double in [0, 1) from a 64-bit word (top 53 bits).
double unit_interval(std::uint64_t bits);

/// Real trigonometric polynomial with integer frequencies |m_i| <= band and
/// |m| >= min_band, coefficients drawn uniformly from [-1, 1] / (1 + |m|).
/// Deterministic in `seed` across platforms (mt19937_64 bits, no std
/// distributions).
Field random_band_limited(const TorusGrid& grid, int band, std::uint64_t seed, FieldKind kind,
                          bool include_mean = false, int min_band = 0);

/// (u, v) pair drawn with seeds derived from `seed`.
std::pair<Field, Field> random_wave_data(const TorusGrid& grid, int band, std::uint64_t seed, int min_band = 0);

/// cos(<m, x>) scaled by `amplitude`.
Field cosine_mode(const TorusGrid& grid, std::array<int, 2> m, double amplitude, FieldKind kind);

}  // namespace dampwave
