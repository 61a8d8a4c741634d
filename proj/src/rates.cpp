#include "dampwave/rates.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dampwave/csv.hpp"

namespace dampwave {

namespace {

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: degenerate abscissae");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

double integrate(const Schedule& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  // Unit pieces keep the fast-growing schedules resolved.
  double acc = 0.0;
  for (double lo = a; lo < b;) {
    const double hi = std::min(b, std::floor(lo) + 1.0);
    acc += gauss_kronrod<double, 31>::integrate([&](double z) { return f(z); }, lo, hi, 10, 1e-13);
    lo = hi;
  }
  return acc;
}

// Inverse of an increasing g with g(0) = 0, to absolute 1e-12 in x.
template <class G>
double bisect_inverse(const G& g, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("inverse: argument must be >= 0");
  if (s == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (g(hi) < s) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::out_of_range("inverse: argument beyond the schedule's range");
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double form_exponent(const RateForm& f) {
  switch (f.kind) {
    case RateKind::exponential: return 1.0;
    case RateKind::stretched: return f.exponent;
    default: return 0.0;
  }
}

}  // namespace

RateModel parse_rate_model(const std::string& name) {
  if (name == "exp_sigma") return RateModel::exp_sigma;
  if (name == "stretched") return RateModel::stretched;
  if (name == "power") return RateModel::power;
  if (name == "log_power") return RateModel::log_power;
  throw std::invalid_argument("unknown rate model '" + name + "'");
}

const char* to_string(RateModel m) {
  switch (m) {
    case RateModel::exp_sigma: return "exp_sigma";
    case RateModel::stretched: return "stretched";
    case RateModel::power: return "power";
    case RateModel::log_power: return "log_power";
  }
  return "?";
}

const char* to_string(RateKind k) {
  switch (k) {
    case RateKind::exponential: return "exponential";
    case RateKind::stretched: return "stretched";
    case RateKind::power: return "power";
    case RateKind::log_power: return "log_power";
    case RateKind::stall: return "stall";
    case RateKind::none: return "none";
  }
  return "?";
}

void write_csv(const std::vector<RateFit>& fits, std::ostream& out) {
  out << "model,C,c,p,residual,t_min,t_max,samples\n";
  for (const auto& f : fits) {
    out << to_string(f.model) << ',' << format_double(f.C) << ',' << format_double(f.c) << ','
        << format_double(f.p) << ',' << format_double(f.residual) << ',' << format_double(f.t_min) << ','
        << format_double(f.t_max) << ',' << f.samples << '\n';
  }
}

RateFit fit(const EnergyTrace& trace, RateModel model, std::optional<std::pair<double, double>> window,
            double energy_floor) {
  trace.validate();
  const double t_end = trace.times.back();
  const auto [t_min, t_max] = window.value_or(std::pair{0.2 * t_end, t_end});
  if (!(t_min < t_max)) throw std::invalid_argument("fit: window needs t_min < t_max");
  if (t_min < trace.times.front() - 1e-12 || t_max > t_end + 1e-9 * std::max(1.0, t_end)) {
    throw std::out_of_range("fit: window outside the trace");
  }
  if (model == RateModel::exp_sigma && trace.sigma.size() != trace.size()) {
    throw std::invalid_argument("fit: exp_sigma needs the trace's sigma channel");
  }
  const double e0 = trace.energy.front();

  std::vector<double> x, y, ts, logE;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.times[i];
    if (t < t_min || t > t_max) continue;
    const double e = trace.energy[i];
    if (!(e > 0.0)) throw std::invalid_argument("fit: nonpositive energy at t = " + format_double(t));
    if (e < energy_floor * e0) continue;
    ts.push_back(t);
    logE.push_back(std::log(e));
    switch (model) {
      case RateModel::exp_sigma:
        x.push_back(trace.sigma[i]);
        y.push_back(std::log(e));
        break;
      case RateModel::stretched:
        if (!(t > 0.0) || !(e < e0)) throw std::invalid_argument("fit: stretched needs t > 0 and E < E(0)");
        x.push_back(std::log(t));
        y.push_back(std::log(-std::log(e / e0)));
        break;
      case RateModel::power:
        x.push_back(std::log1p(t));
        y.push_back(std::log(e));
        break;
      case RateModel::log_power:
        x.push_back(std::log(std::log(2.0 + t)));
        y.push_back(std::log(e));
        break;
    }
  }
  if (x.size() < 8) throw std::invalid_argument("fit: fewer than 8 samples in the window");

  const Line line = least_squares(x, y);
  RateFit r;
  r.model = model;
  r.t_min = t_min;
  r.t_max = t_max;
  r.samples = x.size();
  if (model == RateModel::stretched) {
    r.C = e0;
    r.c = std::exp(line.intercept);
    r.p = line.slope;
  } else {
    r.C = std::exp(line.intercept);
    r.c = -line.slope;
  }

  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model_log = model == RateModel::stretched ? std::log(e0) - r.c * std::pow(ts[i], r.p)
                                                           : line.intercept + line.slope * x[i];
    ss += (logE[i] - model_log) * (logE[i] - model_log);
  }
  r.residual = std::sqrt(ss / static_cast<double>(x.size()));
  return r;
}

Verdict sigma_exponent_bound_check(const RateFit& fit, double tolerance) {
  if (fit.model != RateModel::exp_sigma) throw std::invalid_argument("sigma exponent check needs an exp_sigma fit");
  Verdict v;
  v.pass = fit.c <= 2.0 + tolerance;
  v.diagnostic = "fitted c = " + format_double(fit.c) + (v.pass ? " <= " : " > ") + format_double(2.0 + tolerance) +
                 (v.pass ? "" : ": exceeds the Sigma-rate ceiling; check dt, resolution, or the fit window");
  return v;
}

GrowingEnvelope::GrowingEnvelope(Schedule f, double L0, double C1) : f_(std::move(f)), L0_(L0), C1_(C1) {
  if (!(L0 > 0.0)) throw std::invalid_argument("growing envelope: L0 must be > 0");
  if (!(C1 > 0.0)) throw std::invalid_argument("growing envelope: C1 must be > 0");
  for (int i = 0; i <= 64; ++i) {
    const double z = 1.0 + 0.25 * i;
    const double fz = f_(z);
    if (!std::isfinite(fz)) break;
    if (fz < C1 * (1.0 - 1e-12)) {
      throw std::invalid_argument("growing envelope: f(" + format_double(z) + ") = " + format_double(fz) +
                                  " is below C1");
    }
    if (i > 0 && fz < f_(z - 0.25)) throw std::invalid_argument("growing envelope: f must be increasing");
  }
}

double GrowingEnvelope::F(double x) const { return integrate(f_, 1.0, x + 1.0); }
double GrowingEnvelope::B(double x) const { return integrate(f_, 0.0, x); }
double GrowingEnvelope::F_inverse(double s) const {
  return bisect_inverse([this](double x) { return F(x); }, s);
}
double GrowingEnvelope::B_inverse(double s) const {
  return bisect_inverse([this](double x) { return B(x); }, s);
}

long GrowingEnvelope::completed_on_intervals(double t) const {
  long n = 0;
  double used = L0_;  // n + 1 on-intervals and f(1..n) off-intervals
  while (used <= t) {
    ++n;
    used += f_(static_cast<double>(n)) + L0_;
  }
  return n;
}

RateForm GrowingEnvelope::form() const {
  const auto& name = f_.name();
  if (name == "power") return {RateKind::stretched, 1.0 / (f_.describe()["alpha"].get<double>() + 1.0)};
  if (name == "geometric") return {RateKind::power, 0.0};
  if (name == "double_exponential") return {RateKind::log_power, 0.0};
  return {RateKind::none, 0.0};
}

GrowingPrediction predict_growing(const GrowingEnvelope& env, double t, double c) {
  if (!(t >= 0.0)) throw std::invalid_argument("predict_growing: t must be >= 0");
  GrowingPrediction p;
  p.t = t;
  p.F_inv = env.F_inverse(env.C1() * t / (env.L0() + env.C1()));
  p.B_inv = env.B_inverse(t);
  p.upper_rate = std::exp(-c * p.F_inv);
  p.lower_envelope = std::exp(-c * p.B_inv);
  p.N_lower = p.F_inv - 1.0;
  p.N_upper = p.B_inv + 2.0;
  p.N = env.completed_on_intervals(t);
  return p;
}

std::pair<double, double> envelope_exponents(const GrowingEnvelope& env, double t_min, double t_max) {
  if (!(0.0 < t_min && t_min < t_max)) throw std::invalid_argument("envelope_exponents: need 0 < t_min < t_max");
  std::vector<double> x, yf, yb;
  for (int i = 0; i < 64; ++i) {
    const double t = t_min * std::pow(t_max / t_min, i / 63.0);
    const auto p = predict_growing(env, t);
    x.push_back(std::log(t));
    yf.push_back(std::log(p.F_inv));
    yb.push_back(std::log(p.B_inv));
  }
  return {least_squares(x, yf).slope, least_squares(x, yb).slope};
}

RatePrediction predict_shrinking(double beta, double S0, double C_M, double C_W) {
  if (!(beta >= 0.0)) throw std::invalid_argument("predict_shrinking: beta must be >= 0");
  if (!(S0 > 0.0)) throw std::invalid_argument("predict_shrinking: S0 must be > 0");
  constexpr double eps = 1e-12;
  RatePrediction p;
  if (beta == 0.0) {
    p.upper = {RateKind::exponential, 1.0};
  } else if (beta < 1.0 / 3.0 - eps) {
    p.upper = {RateKind::stretched, 1.0 - 3.0 * beta};
  } else if (beta <= 1.0 / 3.0 + eps) {
    p.upper = {RateKind::power, 0.0};
  } else {
    p.upper = {RateKind::stall, 0.0};
  }
  if (beta < 1.0 - eps) {
    p.lower = {beta == 0.0 ? RateKind::exponential : RateKind::stretched, 1.0 - beta};
    p.lower_threshold = 2.0 * C_M * C_W / ((1.0 - beta) * std::pow(S0, 1.0 - beta));
  } else if (beta <= 1.0 + eps) {
    p.lower = {RateKind::power, 0.0};
    p.lower_threshold = 2.0 * C_M * C_W;
  } else {
    p.lower = {RateKind::none, 0.0};
  }
  return p;
}

RatePrediction poly_rate_check(double beta, double C_M, double W_sup) {
  if (!(beta >= 0.0)) throw std::invalid_argument("poly_rate_check: beta must be >= 0");
  constexpr double eps = 1e-12;
  RatePrediction p;
  if (beta < 1.0 - eps) {
    p.upper = {beta == 0.0 ? RateKind::exponential : RateKind::stretched, 1.0 - beta};
    p.lower = p.upper;
    p.lower_threshold = 2.0 * C_M * W_sup / (1.0 - beta);
  } else if (beta <= 1.0 + eps) {
    p.upper = {RateKind::power, 0.0};
    p.lower = p.upper;
    p.lower_threshold = 2.0 * C_M * W_sup;
  } else {
    p.upper = {RateKind::none, 0.0};
    p.lower = p.upper;
  }
  return p;
}

bool exponent_within(const RatePrediction& pred, double measured, double tol) {
  const double a = form_exponent(pred.upper), b = form_exponent(pred.lower);
  return measured >= std::min(a, b) - tol && measured <= std::max(a, b) + tol;
}

}  // namespace dampwave
