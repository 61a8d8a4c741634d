#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/solver.hpp"

namespace dampwave {

// exp_sigma: E = C exp(-c Sigma(t))     stretched: E = E0 exp(-c t^p)
// power:     E = C (1 + t)^(-c)         log_power: E = C ln(2 + t)^(-c)
enum class RateModel { exp_sigma, stretched, power, log_power };

RateModel parse_rate_model(const std::string& name);
const char* to_string(RateModel m);

struct RateFit {
  RateModel model = RateModel::exp_sigma;
  double C = 1.0;
  double c = 0.0;
  double p = 1.0;  // only fitted for stretched
  double residual = 0.0;  // RMS of log E - log model over the window
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
};

void write_csv(const std::vector<RateFit>& fits, std::ostream& out);

// Window defaults to [0.2 t_max, t_max] of the trace. exp_sigma reads the
// trace's sigma channel. Samples below energy_floor * E(0) are skipped: past
// roughly 1e-60 the trace is roundoff, not decay.
RateFit fit(const EnergyTrace& trace, RateModel model,
            std::optional<std::pair<double, double>> window = std::nullopt, double energy_floor = 1e-45);

struct Verdict {
  bool pass = false;
  std::string diagnostic;
};

// Fitted exp_sigma exponent must not exceed 2 + tolerance.
Verdict sigma_exponent_bound_check(const RateFit& fit, double tolerance = 0.1);

enum class RateKind { exponential, stretched, power, log_power, stall, none };
const char* to_string(RateKind k);

struct RateForm {
  RateKind kind = RateKind::none;
  double exponent = 0.0;  // meaningful for stretched; 1 for exponential
};

// F(x) = int_1^{x+1} f and B(x) = int_0^x f for an off-length schedule.
class GrowingEnvelope {
 public:
  GrowingEnvelope(Schedule f, double L0, double C1);

  double F(double x) const;
  double B(double x) const;
  double F_inverse(double s) const;
  double B_inverse(double s) const;

  // Completed on-intervals by time t: the largest N with N L0 + f(1) + ... + f(N-1) <= t.
  long completed_on_intervals(double t) const;
  // Closed-form rate family of the known schedules.
  RateForm form() const;

  const Schedule& schedule() const { return f_; }
  double L0() const { return L0_; }
  double C1() const { return C1_; }

 private:
  Schedule f_;
  double L0_;
  double C1_;
};

struct GrowingPrediction {
  double t = 0.0;
  double F_inv = 0.0;  // F^{-1}(C1 t / (L0 + C1))
  double B_inv = 0.0;  // B^{-1}(t)
  double upper_rate = 0.0;      // exp(-c F_inv)
  double lower_envelope = 0.0;  // exp(-c B_inv)
  double N_lower = 0.0;         // F_inv - 1
  double N_upper = 0.0;         // B_inv + 2
  long N = 0;
};

GrowingPrediction predict_growing(const GrowingEnvelope& env, double t, double c = 1.0);

// Log-log slopes of F_inv and B_inv against t over [t_min, t_max]; a measured
// stretched exponent is compared against this pair.
std::pair<double, double> envelope_exponents(const GrowingEnvelope& env, double t_min, double t_max);

struct RatePrediction {
  RateForm upper;  // proven decay form
  RateForm lower;  // fastest form not excluded
  std::optional<double> lower_threshold;  // rate constant above which the lower form fails
};

// Shrinking on-windows of length ~ (1 + k)^(-beta) every S0.
RatePrediction predict_shrinking(double beta, double S0, double C_M = 1.0, double C_W = 1.0);

// W = W~ f with f ~ (1 + t)^(-beta).
RatePrediction poly_rate_check(double beta, double C_M = 1.0, double W_sup = 1.0);

// Does a measured stretched exponent sit in [lower form, upper form] widened by tol?
bool exponent_within(const RatePrediction& pred, double measured, double tol = 0.1);

}  // namespace dampwave
