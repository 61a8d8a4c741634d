#include "dampwave/damping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace dampwave {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Schedule

Schedule::Schedule(std::string name, json params, std::function<double(double)> fn)
    : name_(std::move(name)), params_(std::move(params)), fn_(std::move(fn)) {}

Schedule Schedule::power(double c, double alpha) {
  if (!(c > 0.0) || alpha < 0.0) throw std::invalid_argument("Schedule::power: need c > 0, alpha >= 0");
  return Schedule("power", {{"kind", "power"}, {"c", c}, {"alpha", alpha}},
                  [c, alpha](double j) { return c * std::pow(j, alpha); });
}

Schedule Schedule::geometric(double c, double r) {
  if (!(c > 0.0) || !(r > 1.0)) throw std::invalid_argument("Schedule::geometric: need c > 0, r > 1");
  return Schedule("geometric", {{"kind", "geometric"}, {"c", c}, {"r", r}},
                  [c, r](double j) { return c * std::pow(r, j); });
}

Schedule Schedule::double_exponential(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("Schedule::double_exponential: need c > 0");
  return Schedule("double_exponential", {{"kind", "double_exponential"}, {"c", c}},
                  [c](double j) { return c * std::exp(j + std::exp(j)); });
}

Schedule Schedule::shifted_inverse_power(double c, double beta) {
  if (!(c > 0.0) || beta < 0.0) {
    throw std::invalid_argument("Schedule::shifted_inverse_power: need c > 0, beta >= 0");
  }
  return Schedule("shifted_inverse_power", {{"kind", "shifted_inverse_power"}, {"c", c}, {"beta", beta}},
                  [c, beta](double j) { return c * std::pow(1.0 + j, -beta); });
}

Schedule Schedule::custom(std::string name, std::function<double(double)> fn) {
  json params = {{"kind", "custom"}, {"name", name}};
  return Schedule(std::move(name), std::move(params), std::move(fn));
}

// ---------------------------------------------------------------------------
// Families

namespace {

class ConstantModel final : public detail::DampingModel {
 public:
  explicit ConstantModel(double a) : a_(a) {}
  double eval(const Point&, double) const override { return a_; }
  double sup_norm() const override { return a_; }
  std::string family() const override { return "constant"; }
  json describe() const override { return {{"family", "constant"}, {"a", a_}}; }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }
  double spatial(const Point&) const override { return a_; }

 private:
  double a_;
};

class SpaceBumpModel final : public detail::DampingModel {
 public:
  SpaceBumpModel(double w0, Point center, double radius, double smoothness, int dim, double period)
      : w0_(w0), center_(center), radius_(radius), p_(smoothness), dim_(dim), period_(period) {}

  double eval(const Point& x, double) const override { return spatial(x); }
  double spatial(const Point& x) const override {
    const double r = torus_distance(x, center_, dim_, period_);
    if (r >= radius_) return 0.0;
    if (p_ == 0.0) return w0_;
    const double s = r / radius_;
    return w0_ * std::pow(1.0 - s * s, p_);
  }
  double sup_norm() const override { return w0_; }
  std::string family() const override { return "space_bump"; }
  json describe() const override {
    return {{"family", "space_bump"}, {"w0", w0_},         {"center", {center_[0], center_[1]}},
            {"radius", radius_},      {"smoothness", p_},  {"dim", dim_},
            {"period", period_}};
  }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }

 private:
  double w0_;
  Point center_;
  double radius_;
  double p_;
  int dim_;
  double period_;
};

class CosineModel final : public detail::DampingModel {
 public:
  CosineModel(double mean, double amplitude, Point wavevector)
      : mean_(mean), amp_(amplitude), k_(wavevector) {}
  double eval(const Point& x, double) const override { return spatial(x); }
  double spatial(const Point& x) const override {
    // Clamp the last ulp so mean == |amplitude| never produces -0.0 noise.
    return std::max(0.0, mean_ + amp_ * std::cos(k_[0] * x[0] + k_[1] * x[1]));
  }
  double sup_norm() const override { return mean_ + std::abs(amp_); }
  std::string family() const override { return "cosine"; }
  json describe() const override {
    return {{"family", "cosine"}, {"mean", mean_}, {"amplitude", amp_}, {"wavevector", {k_[0], k_[1]}}};
  }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }

 private:
  double mean_;
  double amp_;
  Point k_;
};

class PolyProductModel final : public detail::DampingModel {
 public:
  PolyProductModel(DampingProfile inner, double beta, double c_min, double c_max,
                   std::function<double(const Point&, double)> factor)
      : inner_(std::move(inner)), beta_(beta), c_min_(c_min), c_max_(c_max), factor_(std::move(factor)) {}

  double decay(double t) const { return std::pow(1.0 + t, -beta_); }
  double eval(const Point& x, double t) const override {
    const double f = factor_ ? factor_(x, t) : decay(t);
    return inner_.eval(x, t) * f;
  }
  double sup_norm() const override { return inner_.sup_norm() * c_max_ * decay(0.0); }
  std::string family() const override { return "poly_product"; }
  json describe() const override {
    return {{"family", "poly_product"}, {"beta", beta_},       {"c_min", c_min_},
            {"c_max", c_max_},          {"custom_factor", static_cast<bool>(factor_)},
            {"inner", inner_.describe()}};
  }
  void switch_times(double t_max, std::vector<double>& out) const override {
    inner_.model().switch_times(t_max, out);
  }
  double shortest_on_interval(double t_max) const override {
    return inner_.shortest_on_interval(t_max);
  }
  bool separable() const override { return !factor_ && inner_.separable(); }
  double spatial(const Point& x) const override { return inner_.spatial(x); }
  double temporal(double t) const override { return inner_.temporal(t) * decay(t); }

 private:
  DampingProfile inner_;
  double beta_;
  double c_min_;
  double c_max_;
  std::function<double(const Point&, double)> factor_;
};

class GrowingOffModel final : public detail::DampingModel {
 public:
  static constexpr double kHorizon = 1.0e6;
  static constexpr std::size_t kMaxIntervals = 2'000'000;

  GrowingOffModel(DampingProfile inner, double on_length, Schedule off)
      : inner_(std::move(inner)), on_length_(on_length), off_(std::move(off)) {
    // starts_[k] = k * L0 + T_k with T_k = f(1) + ... + f(k).
    double start = 0.0;
    for (std::size_t k = 0; k < kMaxIntervals; ++k) {
      starts_.push_back(start);
      if (start > kHorizon) break;
      const double gap = off_(static_cast<double>(k + 1));
      if (!(gap > 0.0) || !std::isfinite(gap)) {
        if (std::isinf(gap)) {  // damping never returns
          terminal_ = true;
          break;
        }
        throw std::invalid_argument("growing_off: off-interval lengths must be positive");
      }
      start += on_length_ + gap;
    }
  }

  // Index k of the cycle [start_k, start_{k+1}) containing t.
  std::ptrdiff_t cycle(double t) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    if (it == starts_.begin()) return 0;
    return std::distance(starts_.begin(), it) - 1;
  }

  double local_on_time(double t, bool& on) const {
    const auto k = cycle(t);
    if (!terminal_ && static_cast<std::size_t>(k) + 1 == starts_.size() && t > kHorizon) {
      throw std::out_of_range("growing_off: time beyond the precomputed horizon");
    }
    const double local = t - starts_[static_cast<std::size_t>(k)];
    on = local < on_length_;
    return local;
  }

  double eval(const Point& x, double t) const override {
    bool on = false;
    const double local = local_on_time(t, on);
    return on ? inner_.eval(x, local) : 0.0;
  }
  double sup_norm() const override { return inner_.sup_norm(); }
  std::string family() const override { return "growing_off"; }
  json describe() const override {
    return {{"family", "growing_off"}, {"on_length", on_length_}, {"off_lengths", off_.describe()},
            {"inner", inner_.describe()}};
  }
  void switch_times(double t_max, std::vector<double>& out) const override {
    for (std::size_t k = 0; k < starts_.size(); ++k) {
      const double s = starts_[k];
      if (s > t_max) break;
      if (s > 0.0) out.push_back(s);
      const double e = s + on_length_;
      if (e <= t_max) out.push_back(e);
      // Switches of the inner profile inside this on-interval.
      std::vector<double> inner;
      inner_.model().switch_times(std::min(on_length_, t_max - s), inner);
      for (double ti : inner) {
        if (ti < on_length_) out.push_back(s + ti);
      }
    }
  }
  double shortest_on_interval(double /*t_max*/) const override {
    return std::min(on_length_, inner_.shortest_on_interval(on_length_));
  }
  bool separable() const override { return inner_.separable(); }
  double spatial(const Point& x) const override { return inner_.spatial(x); }
  double temporal(double t) const override {
    bool on = false;
    const double local = local_on_time(t, on);
    return on ? inner_.temporal(local) : 0.0;
  }

 private:
  DampingProfile inner_;
  double on_length_;
  Schedule off_;
  std::vector<double> starts_;
  bool terminal_ = false;
};

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

class ShrinkingOnModel final : public detail::DampingModel {
 public:
  static constexpr int kValidatedWindows = 10'000;

  ShrinkingOnModel(DampingProfile g, WindowShape chi, double period, Schedule on, double floor)
      : g_(std::move(g)), chi_(chi), period_(period), on_(std::move(on)), floor_(floor) {
    for (int k = 0; k < kValidatedWindows; ++k) {
      const double len = on_(k);
      if (!(len > 0.0) || len > period_) {
        throw std::invalid_argument("shrinking_on: on-window lengths f(k) must lie in (0, S0]");
      }
    }
  }

  double chi(double s) const {
    if (chi_ == WindowShape::indicator) return 1.0;
    if (s < 0.25) return smooth_step(4.0 * s);
    if (s > 0.75) return smooth_step(4.0 * (1.0 - s));
    return 1.0;
  }

  double window_factor(double t) const {
    const double k = std::floor(t / period_);
    const double local = t - k * period_;
    const double len = on_(k);
    if (len > period_) throw std::invalid_argument("shrinking_on: f(k) exceeds S0");
    return local < len ? chi(local / len) : 0.0;
  }

  double eval(const Point& x, double t) const override {
    const double w = window_factor(t);
    return w == 0.0 ? 0.0 : g_.eval(x, 0.0) * w;
  }
  double sup_norm() const override { return g_.sup_norm(); }
  std::string family() const override { return "shrinking_on"; }
  json describe() const override {
    return {{"family", "shrinking_on"},
            {"chi", chi_ == WindowShape::indicator ? "indicator" : "smooth"},
            {"period", period_},
            {"on_lengths", on_.describe()},
            {"floor", floor_},
            {"g", g_.describe()}};
  }
  void switch_times(double t_max, std::vector<double>& out) const override {
    for (int k = 0;; ++k) {
      const double s = k * period_;
      if (s > t_max) break;
      if (s > 0.0) out.push_back(s);
      const double e = s + on_(k);
      if (e <= t_max) out.push_back(e);
    }
  }
  double shortest_on_interval(double t_max) const override {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k * period_ <= t_max; ++k) m = std::min(m, on_(k));
    return m;
  }
  bool separable() const override { return true; }
  double spatial(const Point& x) const override { return g_.eval(x, 0.0); }
  double temporal(double t) const override { return window_factor(t); }

 private:
  DampingProfile g_;
  WindowShape chi_;
  double period_;
  Schedule on_;
  double floor_;
};

}  // namespace

DampingProfile::DampingProfile(std::shared_ptr<const detail::DampingModel> model)
    : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("DampingProfile: null model");
}

DampingProfile DampingProfile::constant(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("constant: a must be >= 0");
  return DampingProfile(std::make_shared<ConstantModel>(a));
}

DampingProfile DampingProfile::space_bump(double w0, Point center, double radius, double smoothness,
                                          int dim, double period) {
  if (!(w0 >= 0.0)) throw std::invalid_argument("space_bump: w0 must be >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("space_bump: radius must be > 0");
  if (!(smoothness >= 0.0)) throw std::invalid_argument("space_bump: smoothness must be >= 0");
  if (dim != 1 && dim != 2) throw std::invalid_argument("space_bump: dim must be 1 or 2");
  if (!(period > 0.0)) throw std::invalid_argument("space_bump: period must be > 0");
  return DampingProfile(std::make_shared<SpaceBumpModel>(w0, center, radius, smoothness, dim, period));
}

DampingProfile DampingProfile::cosine(double mean, double amplitude, Point wavevector) {
  if (!(mean >= std::abs(amplitude))) {
    throw std::invalid_argument("cosine: mean must be >= |amplitude| to keep W nonnegative");
  }
  return DampingProfile(std::make_shared<CosineModel>(mean, amplitude, wavevector));
}

DampingProfile DampingProfile::poly_product(const DampingProfile& inner, double beta, double c_min,
                                            double c_max,
                                            std::function<double(const Point&, double)> factor) {
  if (!(beta >= 0.0)) throw std::invalid_argument("poly_product: beta must be >= 0");
  if (!(c_min > 0.0) || !(c_max >= c_min)) {
    throw std::invalid_argument("poly_product: need 0 < c_min <= c_max");
  }
  if (!factor && (c_min > 1.0 || c_max < 1.0)) {
    throw std::invalid_argument("poly_product: default factor (1+t)^-beta needs c_min <= 1 <= c_max");
  }
  if (factor) {
    // Spot-check the two-sided bound on a deterministic lattice of (x, t).
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        for (double t : {0.0, 0.5, 1.0, 3.0, 10.0, 100.0, 1000.0}) {
          const Point x{i * 2.0 * std::numbers::pi / 16, j * 2.0 * std::numbers::pi / 16};
          const double b = std::pow(1.0 + t, -beta);
          const double f = factor(x, t);
          if (f < c_min * b * (1 - 1e-12) || f > c_max * b * (1 + 1e-12)) {
            throw std::invalid_argument("poly_product: factor violates c_min*b(t) <= f <= c_max*b(t)");
          }
        }
      }
    }
  }
  return DampingProfile(std::make_shared<PolyProductModel>(inner, beta, c_min, c_max, std::move(factor)));
}

DampingProfile DampingProfile::growing_off(const DampingProfile& inner, double on_length,
                                           Schedule off_lengths) {
  if (!(on_length > 0.0)) throw std::invalid_argument("growing_off: on_length L0 must be > 0");
  return DampingProfile(std::make_shared<GrowingOffModel>(inner, on_length, std::move(off_lengths)));
}

DampingProfile DampingProfile::shrinking_on(const DampingProfile& spatial, WindowShape chi, double period,
                                            Schedule on_lengths, double floor) {
  if (!(period > 0.0)) throw std::invalid_argument("shrinking_on: S0 must be > 0");
  if (!(floor > 0.0)) throw std::invalid_argument("shrinking_on: floor c_w must be > 0");
  if (!spatial.autonomous()) throw std::invalid_argument("shrinking_on: g must be time independent");
  constexpr int n = 64;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point x{i * 2.0 * std::numbers::pi / n, j * 2.0 * std::numbers::pi / n};
      if (spatial.eval(x, 0.0) < floor) {
        throw std::invalid_argument("shrinking_on: g drops below the floor c_w");
      }
    }
  }
  return DampingProfile(
      std::make_shared<ShrinkingOnModel>(spatial, chi, period, std::move(on_lengths), floor));
}

double DampingProfile::eval(const Point& x, double t) const {
  if (!(t >= 0.0)) throw std::domain_error("DampingProfile::eval: t must be >= 0");
  return model_->eval(x, t);
}

Field snapshot(const DampingProfile& profile, const TorusGrid& grid, double t) {
  if (!(t >= 0.0)) throw std::domain_error("snapshot: t must be >= 0");
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = profile.eval(grid.node(i), t);
  return Field(grid, FieldKind::damping_snapshot, std::move(values));
}

std::vector<double> discontinuity_times(const DampingProfile& profile, double t_max) {
  if (!(t_max >= 0.0)) throw std::domain_error("discontinuity_times: t_max must be >= 0");
  std::vector<double> out;
  profile.model().switch_times(t_max, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [t_max](double s) { return s <= 0.0 || s > t_max; });
  return out;
}

}  // namespace dampwave
