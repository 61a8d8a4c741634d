#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dampwave/grid.hpp"
#include "json.hpp"

namespace dampwave {

/// A positive sequence j -> f(j), extended to real arguments so it can be
/// integrated and inverted (the on/off families and the rate predictors
/// both consume it).
class Schedule {
 public:
  /// c * j^alpha
  static Schedule power(double c, double alpha);
  /// c * r^j
  static Schedule geometric(double c, double r);
  /// c * exp(j + e^j)
  static Schedule double_exponential(double c);
  /// c * (1 + j)^(-beta)
  static Schedule shifted_inverse_power(double c, double beta);
  static Schedule custom(std::string name, std::function<double(double)> fn);

  double operator()(double j) const { return fn_(j); }
  const std::string& name() const { return name_; }
  nlohmann::json describe() const { return params_; }

 private:
  Schedule(std::string name, nlohmann::json params, std::function<double(double)> fn);
  std::string name_;
  nlohmann::json params_;
  std::function<double(double)> fn_;
};

/// Time profile for the shrinking on-windows: chi on [0, 1].
enum class WindowShape { indicator, smooth };

namespace detail {

class DampingModel {
 public:
  virtual ~DampingModel() = default;
  virtual double eval(const Point& x, double t) const = 0;
  virtual double sup_norm() const = 0;
  virtual std::string family() const = 0;
  virtual nlohmann::json describe() const = 0;
  /// Appends every on/off switch time in (0, t_max].
  virtual void switch_times(double /*t_max*/, std::vector<double>& /*out*/) const {}
  virtual double shortest_on_interval(double /*t_max*/) const {
    return std::numeric_limits<double>::infinity();
  }
  virtual bool autonomous() const { return false; }
  /// True when W(x,t) = spatial(x) * temporal(t).
  virtual bool separable() const { return false; }
  virtual double spatial(const Point& x) const { return eval(x, 0.0); }
  virtual double temporal(double /*t*/) const { return 1.0; }
};

}  // namespace detail

/// The damping coefficient W(x, t) >= 0. Cheap to copy; the underlying
/// model is immutable and shared.
class DampingProfile {
 public:
  explicit DampingProfile(std::shared_ptr<const detail::DampingModel> model);

  // --- families ---------------------------------------------------------
  static DampingProfile constant(double a);
  /// w0 * (1 - (r/radius)^2)^smoothness inside the periodic ball of the given
  /// radius around `center`, zero outside. smoothness = 0 gives an indicator.
  static DampingProfile space_bump(double w0, Point center, double radius, double smoothness,
                                   int dim, double period = 2.0 * std::numbers::pi);
  /// mean + amplitude * cos(<wavevector, x>), requires mean >= |amplitude|.
  static DampingProfile cosine(double mean, double amplitude, Point wavevector);

  /// inner(x, t) * f(x, t) where f defaults to (1 + t)^(-beta). A custom f
  /// must satisfy c_min * (1 + t)^(-beta) <= f <= c_max * (1 + t)^(-beta);
  /// this is checked on samples.
  static DampingProfile poly_product(const DampingProfile& inner, double beta, double c_min = 1.0,
                                     double c_max = 1.0,
                                     std::function<double(const Point&, double)> factor = {});
  static DampingProfile growing_off(const DampingProfile& inner, double on_length,
                                    Schedule off_lengths);
  static DampingProfile shrinking_on(const DampingProfile& spatial, WindowShape chi, double period,
                                     Schedule on_lengths, double floor);

  // --- evaluation -------------------------------------------------------
  /// W(x, t); throws for t < 0.
  double eval(const Point& x, double t) const;
  double sup_norm() const { return model_->sup_norm(); }
  std::string family() const { return model_->family(); }
  nlohmann::json describe() const { return model_->describe(); }
  bool autonomous() const { return model_->autonomous(); }
  bool separable() const { return model_->separable(); }
  double spatial(const Point& x) const { return model_->spatial(x); }
  double temporal(double t) const { return model_->temporal(t); }
  double shortest_on_interval(double t_max) const { return model_->shortest_on_interval(t_max); }

  const detail::DampingModel& model() const { return *model_; }

 private:
  std::shared_ptr<const detail::DampingModel> model_;
};

/// Samples W(., t) on the grid nodes.
Field snapshot(const DampingProfile& profile, const TorusGrid& grid, double t);

/// Sorted, duplicate-free on/off switch times in (0, t_max].
std::vector<double> discontinuity_times(const DampingProfile& profile, double t_max);

}  // namespace dampwave
