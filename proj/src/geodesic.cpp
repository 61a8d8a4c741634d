#include "dampwave/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace dampwave {

using nlohmann::json;

Geodesic Geodesic::on_circle(double x0, int sign, double s_ref, double period) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("Geodesic::on_circle: sign must be +-1");
  return Geodesic{{wrap_positive(x0, period), 0.0}, {static_cast<double>(sign), 0.0}, s_ref, 1, period};
}

Geodesic Geodesic::on_torus(Point x0, double angle, double s_ref, double period) {
  Point dir{std::cos(angle), std::sin(angle)};
  // Snap axis directions so closed geodesics stay exactly closed.
  for (auto& c : dir) {
    if (std::abs(c) < 1e-15) c = 0.0;
  }
  return Geodesic{{wrap_positive(x0[0], period), wrap_positive(x0[1], period)}, dir, s_ref, 2, period};
}

Point Geodesic::at(double s) const {
  const double ds = s - s_ref;
  Point p{wrap_positive(x0[0] + ds * direction[0], period), 0.0};
  if (dim == 2) p[1] = wrap_positive(x0[1] + ds * direction[1], period);
  return p;
}

Geodesic Geodesic::anchored_at(double s) const {
  Geodesic g = *this;
  g.x0 = at(s);
  g.s_ref = s;
  return g;
}

double Geodesic::angle() const { return std::atan2(direction[1], direction[0]); }

json to_json(const Geodesic& g) {
  json j = {{"dim", g.dim}, {"s_ref", g.s_ref}, {"period", g.period}};
  if (g.dim == 1) {
    j["x0"] = g.x0[0];
    j["direction"] = g.direction[0];
  } else {
    j["x0"] = {g.x0[0], g.x0[1]};
    j["direction"] = {g.direction[0], g.direction[1]};
    j["angle"] = g.angle();
  }
  return j;
}

void GeodesicSampling::validate() const {
  if (n_points < 1 || n_directions < 1 || n_start_times < 1) {
    throw std::invalid_argument("GeodesicSampling: all counts must be >= 1");
  }
  if (!(quadrature_step > 0.0)) throw std::invalid_argument("GeodesicSampling: quadrature_step must be > 0");
  if (!(t0_max >= 0.0)) throw std::invalid_argument("GeodesicSampling: t0_max must be >= 0");
}

json to_json(const GeodesicSampling& s) {
  return {{"n_points", s.n_points},           {"n_directions", s.n_directions},
          {"n_start_times", s.n_start_times}, {"t0_max", s.t0_max},
          {"quadrature_step", s.quadrature_step}, {"refine", s.refine}};
}

namespace {

std::vector<double> sampled_angles(int n_directions) {
  std::vector<double> angles;
  for (int j = 0; j < n_directions; ++j) angles.push_back(2.0 * std::numbers::pi * j / n_directions);
  for (int j = 0; j < 8; ++j) angles.push_back(std::numbers::pi * j / 4.0);
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               angles.end());
  return angles;
}

/// Midpoint quadrature along geodesics for one profile, with the switch
/// times precomputed once.
class LineQuadrature {
 public:
  LineQuadrature(const DampingProfile& W, double t_max, double max_step)
      : W_(W), breaks_(discontinuity_times(W, t_max)) {
    if (!(max_step > 0.0)) throw std::invalid_argument("line_integral: step must be > 0");
    step_ = std::min(max_step, W.shortest_on_interval(t_max) / 8.0);
  }

  double integrate(const Geodesic& g, double a, double b) const {
    if (b < a) throw std::invalid_argument("line_integral: t1 < t0");
    double total = 0.0;
    double lo = a;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), a);
    while (lo < b) {
      double hi = b;
      if (it != breaks_.end() && *it < b) hi = *it++;
      total += segment(g, lo, hi);
      lo = hi;
    }
    return total;
  }

 private:
  double segment(const Geodesic& g, double a, double b) const {
    const double len = b - a;
    if (len <= 0.0) return 0.0;
    const auto n = static_cast<long>(std::ceil(len / step_ - 1e-9));
    const double h = len / static_cast<double>(std::max(n, 1L));
    double acc = 0.0;
    for (long i = 0; i < std::max(n, 1L); ++i) {
      const double s = a + (static_cast<double>(i) + 0.5) * h;
      acc += W_.eval(g.at(s), s);
    }
    return acc * h;
  }

  const DampingProfile& W_;
  std::vector<double> breaks_;
  double step_ = 0.01;
};

struct GoldenResult {
  double x;
  double f;
};

GoldenResult golden_minimize(const std::function<double(double)>& f, double a, double b,
                             int iterations = 40) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

/// Coordinates refined by the golden-section pass.
struct SearchPoint {
  Geodesic g;
  double t0 = 0.0;
};

Geodesic with_coordinate(const Geodesic& g, int coord, double value) {
  Geodesic out = g;
  if (coord < g.dim) {
    out.x0[coord] = wrap_positive(value, g.period);
  } else {
    out = Geodesic::on_torus(g.x0, value, g.s_ref, g.period);
  }
  return out;
}

double coordinate(const Geodesic& g, int coord) { return coord < g.dim ? g.x0[coord] : g.angle(); }

/// One golden-section sweep over each coordinate of (x0, angle[, t0]).
SearchPoint refine_point(const std::function<double(const SearchPoint&)>& objective, SearchPoint best,
                         double& best_value, double dx, double dangle, double dt0, double t0_max) {
  const int geo_coords = best.g.dim == 1 ? 1 : 3;
  for (int c = 0; c < geo_coords; ++c) {
    const double centre = coordinate(best.g, c);
    const double half = c < best.g.dim ? dx : dangle;
    auto res = golden_minimize(
        [&](double v) {
          SearchPoint p = best;
          p.g = with_coordinate(best.g, c, v);
          return objective(p);
        },
        centre - half, centre + half);
    if (res.f < best_value) {
      best_value = res.f;
      best.g = with_coordinate(best.g, c, res.x);
    }
  }
  if (dt0 > 0.0) {
    const double lo = std::max(0.0, best.t0 - dt0);
    const double hi = std::min(t0_max, best.t0 + dt0);
    if (hi > lo) {
      auto res = golden_minimize(
          [&](double v) {
            SearchPoint p = best;
            p.t0 = v;
            return objective(p);
          },
          lo, hi);
      if (res.f < best_value) {
        best_value = res.f;
        best.t0 = res.x;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<Geodesic> sample_geodesics(const GeodesicSampling& sampling, int dim, double period) {
  sampling.validate();
  std::vector<Geodesic> out;
  const int n = sampling.n_points;
  const double h = period / n;
  if (dim == 1) {
    for (int sign : {1, -1}) {
      for (int i = 0; i < n; ++i) out.push_back(Geodesic::on_circle(i * h, sign, 0.0, period));
    }
    return out;
  }
  if (dim != 2) throw std::invalid_argument("sample_geodesics: dim must be 1 or 2");
  for (double angle : sampled_angles(sampling.n_directions)) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out.push_back(Geodesic::on_torus({i * h, j * h}, angle, 0.0, period));
    }
  }
  return out;
}

double line_integral(const DampingProfile& W, const Geodesic& gamma, double t0, double t1,
                     double max_step) {
  if (!(t0 >= 0.0)) throw std::invalid_argument("line_integral: t0 must be >= 0");
  if (t1 < t0) throw std::invalid_argument("line_integral: t1 < t0");
  return LineQuadrature(W, t1, max_step).integrate(gamma, t0, t1);
}

double propagator_G(const DampingProfile& W, const Geodesic& gamma, double t0, double t,
                    double max_step) {
  if (t < t0) throw std::invalid_argument("propagator_G: t < t0");
  return std::exp(-line_integral(W, gamma, t0, t, max_step));
}

json to_json(const SigmaReport& r) {
  return {{"t", r.t}, {"sigma", r.value}, {"witness", to_json(r.witness)},
          {"geodesics_scanned", r.geodesics_scanned}, {"refined", r.refined}};
}

SigmaReport sigma(const DampingProfile& W, double t, const GeodesicSampling& sampling, int dim) {
  if (!(t >= 0.0)) throw std::invalid_argument("sigma: t must be >= 0");
  const auto geodesics = sample_geodesics(sampling, dim);
  LineQuadrature quad(W, t, sampling.quadrature_step);

  SigmaReport report;
  report.t = t;
  report.geodesics_scanned = geodesics.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < geodesics.size(); ++i) {
    const double v = quad.integrate(geodesics[i], 0.0, t);
    if (v < best) {
      best = v;
      best_index = i;
    }
  }
  SearchPoint point{geodesics[best_index], 0.0};
  if (sampling.refine && t > 0.0 && best > 0.0) {
    const double dx = geodesics.front().period / sampling.n_points;
    const double dangle = 2.0 * std::numbers::pi / std::max(8, sampling.n_directions);
    point = refine_point([&](const SearchPoint& p) { return quad.integrate(p.g, 0.0, t); }, point, best,
                         dx, dangle, 0.0, 0.0);
    report.refined = true;
  }
  report.value = best;
  report.witness = point.g;
  return report;
}

std::vector<double> sigma_curve(const DampingProfile& W, const std::vector<double>& times,
                                const GeodesicSampling& sampling, int dim) {
  if (times.empty()) return {};
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0) {
    throw std::invalid_argument("sigma_curve: times must be nonnegative and increasing");
  }
  const auto geodesics = sample_geodesics(sampling, dim);
  LineQuadrature quad(W, times.back(), sampling.quadrature_step);
  std::vector<double> out(times.size(), std::numeric_limits<double>::infinity());
  for (const auto& g : geodesics) {
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      acc += quad.integrate(g, prev, times[i]);
      prev = times[i];
      out[i] = std::min(out[i], acc);
    }
  }
  return out;
}

json to_json(const WindowAverageReport& r) {
  return {{"T", r.T}, {"L", r.value}, {"witness", to_json(r.witness)}, {"witness_t0", r.witness_t0}};
}

WindowAverageReport L_of_T(const DampingProfile& W, double T, const GeodesicSampling& sampling, int dim) {
  if (!(T > 0.0)) throw std::invalid_argument("L_of_T: T must be > 0");
  const auto geodesics = sample_geodesics(sampling, dim);
  // Start times only matter for time-dependent damping.
  std::vector<double> starts{0.0};
  if (!W.autonomous() && sampling.t0_max > 0.0) {
    starts.clear();
    const int m = std::max(sampling.n_start_times, 2);
    for (int i = 0; i < m; ++i) starts.push_back(sampling.t0_max * i / (m - 1));
  }
  LineQuadrature quad(W, starts.back() + T, sampling.quadrature_step);
  auto average = [&](const SearchPoint& p) { return quad.integrate(p.g, p.t0, p.t0 + T) / T; };

  double best = std::numeric_limits<double>::infinity();
  SearchPoint point{geodesics.front(), 0.0};
  for (double t0 : starts) {
    for (const auto& g : geodesics) {
      SearchPoint p{g, t0};
      const double v = average(p);
      if (v < best) {
        best = v;
        point = p;
      }
    }
  }
  if (sampling.refine && best > 0.0) {
    const double dx = point.g.period / sampling.n_points;
    const double dangle = 2.0 * std::numbers::pi / std::max(8, sampling.n_directions);
    const double dt0 = starts.size() > 1 ? starts[1] - starts[0] : 0.0;
    point = refine_point(average, point, best, dx, dangle, dt0, starts.back());
  }
  return {T, best, point.g, point.t0};
}

LInfinityReport L_infinity(const DampingProfile& W, const GeodesicSampling& sampling, double T_max,
                           int dim, int rungs) {
  if (!(T_max > 0.0)) throw std::invalid_argument("L_infinity: T_max must be > 0");
  if (rungs < 1) throw std::invalid_argument("L_infinity: rungs must be >= 1");
  LInfinityReport report;
  report.value = -std::numeric_limits<double>::infinity();
  for (int m = rungs - 1; m >= 0; --m) {
    auto r = L_of_T(W, T_max / std::ldexp(1.0, m), sampling, dim);
    report.value = std::max(report.value, r.value);
    report.ladder.push_back(r);
  }
  return report;
}

json to_json(const TgccReport& r) {
  json curve = json::array();
  for (const auto& c : r.curve) curve.push_back(to_json(c));
  return {{"T0", r.T0},
          {"min_average", r.min_average},
          {"satisfied", r.satisfied},
          {"tolerance", r.tolerance},
          {"witness", to_json(r.witness)},
          {"witness_t0", r.witness_t0},
          {"witness_T", r.witness_T},
          {"L_curve", curve},
          {"sampling", to_json(r.sampling)}};
}

TgccReport check_tgcc(const DampingProfile& W, double T0, const GeodesicSampling& sampling, int dim,
                      int rungs, double tolerance) {
  if (!(T0 > 0.0)) throw std::invalid_argument("check_tgcc: T0 must be > 0");
  TgccReport report;
  report.T0 = T0;
  report.tolerance = tolerance;
  report.sampling = sampling;
  report.min_average = std::numeric_limits<double>::infinity();
  for (int m = 0; m < std::max(rungs, 1); ++m) {
    auto r = L_of_T(W, T0 * std::ldexp(1.0, m), sampling, dim);
    if (r.value < report.min_average) {
      report.min_average = r.value;
      report.witness = r.witness;
      report.witness_t0 = r.witness_t0;
      report.witness_T = r.T;
    }
    report.curve.push_back(r);
  }
  report.satisfied = report.min_average > tolerance;
  return report;
}

}  // namespace dampwave
