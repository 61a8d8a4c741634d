#include "config.hpp"

#include <cmath>
#include <set>

namespace dampwave::cli {

namespace {

// A mapping whose keys must all be consumed before finish().
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(where() + "expected a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    return has(key) ? node_[key] : YAML::Node();
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(field(key) + ": required");
    try {
      return node_[key].as<T>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  Section sub(const std::string& key) { return Section(raw(key), field(key)); }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigError(field(key) + ": unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

// Runs a module constructor, turning its argument errors into config errors.
template <class F>
auto validated(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Point parse_point(Section& s, const std::string& key, Point fallback) {
  if (!s.has(key)) {
    s.raw(key);
    return fallback;
  }
  const auto v = s.require<std::vector<double>>(key);
  if (v.empty() || v.size() > 2) throw ConfigError(s.field(key) + ": expected 1 or 2 numbers");
  return {v[0], v.size() > 1 ? v[1] : 0.0};
}

// A list, or {start, stop, count, log}.
std::vector<double> parse_values(const YAML::Node& node, const std::string& path) {
  if (node.IsSequence()) {
    try {
      return node.as<std::vector<double>>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(path + ": expected a list of numbers");
    }
  }
  Section s(node, path);
  const double a = s.require<double>("start");
  const double b = s.require<double>("stop");
  const int n = s.require<int>("count");
  const bool log = s.get<bool>("log", false);
  s.finish();
  if (n < 1) throw ConfigError(path + ".count: must be >= 1");
  if (log && (a <= 0 || b <= 0)) throw ConfigError(path + ": log spacing needs positive bounds");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : double(i) / (n - 1);
    out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
  }
  return out;
}

std::vector<double> values_or(Section& s, const std::string& key, std::vector<double> fallback) {
  if (!s.has(key)) {
    s.raw(key);
    return fallback;
  }
  return parse_values(s.raw(key), s.field(key));
}

GridConfig parse_grid(Section s) {
  GridConfig g;
  g.dim = s.get<int>("dim", g.dim);
  g.points = s.get<int>("points", g.points);
  g.period = s.get<double>("period", g.period);
  s.finish();
  validated(s.field("dim"), [&] { return TorusGrid(g.dim, g.points, g.period); });
  return g;
}

SolverSection parse_solver(Section s) {
  SolverSection out;
  auto& c = out.solver;
  c.dt = s.get<double>("dt", c.dt);
  const auto scheme = s.get<std::string>("scheme", to_string(c.scheme));
  c.scheme = validated(s.field("scheme"), [&] { return parse_scheme(scheme); });
  c.align_to_discontinuities = s.get<bool>("align_to_discontinuities", c.align_to_discontinuities);
  c.trace_stride = s.get<int>("trace_stride", 10);
  out.t_end = s.get<double>("t_end", out.t_end);
  s.finish();
  validated(s.field("dt"), [&] {
    c.validate();
    return 0;
  });
  if (!(out.t_end > 0)) throw ConfigError(s.field("t_end") + ": must be positive");
  return out;
}

InitialConfig parse_initial(Section s) {
  InitialConfig c;
  const auto kind = s.get<std::string>("kind", "random");
  if (kind == "random") c.kind = InitialKind::random;
  else if (kind == "mode") c.kind = InitialKind::mode;
  else if (kind == "beam") c.kind = InitialKind::beam;
  else throw ConfigError(s.field("kind") + ": expected random, mode or beam");
  c.band = s.get<int>("band", c.band);
  c.min_band = s.get<int>("min_band", c.min_band);
  const auto m = s.get<std::vector<int>>("mode", {c.mode[0], c.mode[1]});
  if (m.empty() || m.size() > 2) throw ConfigError(s.field("mode") + ": expected 1 or 2 integers");
  c.mode = {m[0], m.size() > 1 ? m[1] : 0};
  c.amplitude = s.get<double>("amplitude", c.amplitude);
  s.finish();
  if (c.band < 1) throw ConfigError(s.field("band") + ": must be >= 1");
  if (c.min_band < 0 || c.min_band > c.band) throw ConfigError(s.field("min_band") + ": must lie in [0, band]");
  return c;
}

GeodesicSampling parse_sampling(Section s) {
  GeodesicSampling g;
  g.n_points = s.get<int>("n_points", g.n_points);
  g.n_directions = s.get<int>("n_directions", g.n_directions);
  g.n_start_times = s.get<int>("n_start_times", g.n_start_times);
  g.t0_max = s.get<double>("t0_max", g.t0_max);
  g.quadrature_step = s.get<double>("quadrature_step", g.quadrature_step);
  g.refine = s.get<bool>("refine", g.refine);
  s.finish();
  validated(s.field("n_points"), [&] {
    g.validate();
    return 0;
  });
  return g;
}

BeamConfig parse_beam(Section s, const GridConfig& grid) {
  BeamConfig b;
  const auto mode = s.get<std::string>("mode", "residual");
  if (mode == "residual") b.mode = BeamMode::residual;
  else if (mode == "energy") b.mode = BeamMode::energy;
  else if (mode == "exact") b.mode = BeamMode::exact;
  else throw ConfigError(s.field("mode") + ": expected residual, energy or exact");
  const Point x0 = parse_point(s, "x0", {1.0, 2.0});
  if (grid.dim == 1) {
    const int sign = s.get<int>("sign", 1);
    if (s.has("angle")) throw ConfigError(s.field("angle") + ": only meaningful on T2");
    s.raw("angle");
    b.gamma = validated(s.field("sign"), [&] { return Geodesic::on_circle(x0[0], sign, 0.0, grid.period); });
  } else {
    const double angle = s.get<double>("angle", 0.0);
    if (s.has("sign")) throw ConfigError(s.field("sign") + ": only meaningful on T1");
    s.raw("sign");
    b.gamma = Geodesic::on_torus(x0, angle, 0.0, grid.period);
  }
  b.k = s.get<double>("k", b.k);
  b.t0 = s.get<double>("t0", b.t0);
  b.times = values_or(s, "times", b.times);
  s.finish();
  if (grid.points < 4 * b.k) throw ConfigError(s.field("k") + ": grid.points must be at least 4k");
  validated(s.field("k"), [&] {
    BeamSpec::along(b.gamma, b.k, b.t0).validate();
    return 0;
  });
  for (double t : b.times) {
    if (t < b.t0) throw ConfigError(s.field("times") + ": times must not precede t0");
  }
  return b;
}

ObserveConfig parse_observe(Section s, const GridConfig& grid) {
  ObserveConfig o;
  const auto mode = s.get<std::string>("mode", "ratio");
  if (mode == "ratio") o.mode = ObserveMode::ratio;
  else if (mode == "sandwich") o.mode = ObserveMode::sandwich;
  else if (mode == "short_time") o.mode = ObserveMode::short_time;
  else throw ConfigError(s.field("mode") + ": expected ratio, sandwich or short_time");
  if (s.has("t0")) {
    const auto node = s.raw("t0");
    o.t0 = node.IsScalar() ? std::vector<double>{s.require<double>("t0")} : parse_values(node, s.field("t0"));
  } else {
    s.raw("t0");
  }
  o.T = s.get<double>("T", o.T);
  if (s.has("weight")) o.weight = parse_damping(s.raw("weight"), s.field("weight"), grid);
  else s.raw("weight");
  o.A = s.get<double>("A", o.A);
  o.B = s.get<double>("B", o.B);
  o.lambda = s.get<double>("lambda", o.lambda);
  o.deltas = parse_values(s.has("deltas") ? s.raw("deltas") : YAML::Load("{start: 0.01, stop: 0.1, count: 20, log: true}"),
                          s.field("deltas"));
  s.raw("deltas");
  s.finish();
  if (!(o.T > 0)) throw ConfigError(s.field("T") + ": must be positive");
  for (double t : o.t0) {
    if (t < 0) throw ConfigError(s.field("t0") + ": must be nonnegative");
  }
  for (double x : o.deltas) {
    if (!(x > 0)) throw ConfigError(s.field("deltas") + ": must be positive");
  }
  return o;
}

FitConfig parse_fit(Section s) {
  FitConfig f;
  if (s.has("models")) {
    f.models.clear();
    for (const auto& m : s.require<std::vector<std::string>>("models")) {
      f.models.push_back(validated(s.field("models"), [&] { return parse_rate_model(m); }));
    }
    if (f.models.empty()) throw ConfigError(s.field("models") + ": must not be empty");
  } else {
    s.raw("models");
  }
  if (s.has("window")) {
    const auto w = s.require<std::vector<double>>("window");
    if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError(s.field("window") + ": expected [t_min, t_max]");
    f.window = std::pair{w[0], w[1]};
  } else {
    s.raw("window");
  }
  f.energy_floor = s.get<double>("energy_floor", f.energy_floor);
  s.finish();
  if (!(f.energy_floor >= 0)) throw ConfigError(s.field("energy_floor") + ": must be nonnegative");
  return f;
}

SweepConfig parse_sweep(Section s) {
  SweepConfig w;
  w.command = s.require<std::string>("command");
  static const std::set<std::string> allowed{"simulate", "sigma", "tgcc", "beam", "observe", "fit"};
  if (!allowed.count(w.command)) throw ConfigError(s.field("command") + ": cannot sweep '" + w.command + "'");
  w.parameter = s.require<std::string>("parameter");
  if (w.parameter.empty() || w.parameter.rfind("sweep", 0) == 0) {
    throw ConfigError(s.field("parameter") + ": must name a field outside sweep");
  }
  const auto values = s.raw("values");
  if (!values || !values.IsSequence() || values.size() == 0) {
    throw ConfigError(s.field("values") + ": expected a nonempty list");
  }
  for (const auto& v : values) w.values.push_back(v);
  s.finish();
  return w;
}

}  // namespace

Schedule parse_schedule(const YAML::Node& node, const std::string& path) {
  Section s(node, path);
  const auto kind = s.require<std::string>("kind");
  const double c = s.get<double>("c", 1.0);
  Schedule out = validated(path, [&]() -> Schedule {
    if (kind == "power") return Schedule::power(c, s.require<double>("alpha"));
    if (kind == "geometric") return Schedule::geometric(c, s.require<double>("r"));
    if (kind == "double_exponential") return Schedule::double_exponential(c);
    if (kind == "shifted_inverse_power") return Schedule::shifted_inverse_power(c, s.require<double>("beta"));
    throw ConfigError(s.field("kind") + ": unknown schedule '" + kind + "'");
  });
  s.finish();
  return out;
}

DampingProfile parse_damping(const YAML::Node& node, const std::string& path, const GridConfig& grid) {
  Section s(node, path);
  const auto family = s.require<std::string>("family");
  auto make = [&]() -> DampingProfile {
    if (family == "constant") return DampingProfile::constant(s.require<double>("a"));
    if (family == "space_bump") {
      const double w0 = s.require<double>("w0");
      const Point center = parse_point(s, "center", {0.0, 0.0});
      return DampingProfile::space_bump(w0, center, s.require<double>("radius"), s.get<double>("smoothness", 2.0),
                                        grid.dim, grid.period);
    }
    if (family == "cosine") {
      const double mean = s.require<double>("mean");
      const double amp = s.require<double>("amplitude");
      return DampingProfile::cosine(mean, amp, parse_point(s, "wavevector", {1.0, 0.0}));
    }
    if (family == "poly_product") {
      const auto inner = parse_damping(s.raw("inner"), s.field("inner"), grid);
      const double beta = s.require<double>("beta");
      return DampingProfile::poly_product(inner, beta, s.get<double>("c_min", 1.0), s.get<double>("c_max", 1.0));
    }
    if (family == "growing_off") {
      const auto inner = parse_damping(s.raw("inner"), s.field("inner"), grid);
      const double L0 = s.require<double>("on_length");
      return DampingProfile::growing_off(inner, L0, parse_schedule(s.raw("off_lengths"), s.field("off_lengths")));
    }
    if (family == "shrinking_on") {
      const auto g = parse_damping(s.raw("spatial"), s.field("spatial"), grid);
      const auto shape = s.get<std::string>("shape", "indicator");
      if (shape != "indicator" && shape != "smooth") {
        throw ConfigError(s.field("shape") + ": expected indicator or smooth");
      }
      const double period = s.require<double>("period");
      const auto f = parse_schedule(s.raw("on_lengths"), s.field("on_lengths"));
      return DampingProfile::shrinking_on(g, shape == "smooth" ? WindowShape::smooth : WindowShape::indicator,
                                          period, f, s.require<double>("floor"));
    }
    throw ConfigError(s.field("family") + ": unknown family '" + family + "'");
  };
  auto out = validated(path, make);
  s.finish();
  return out;
}

Config parse_config(const YAML::Node& root) {
  if (!root || root.IsNull()) throw ConfigError("config: empty document");
  Section s(root, "");
  Config c;
  c.source = root;
  if (s.has("seed")) c.seed = s.require<std::uint64_t>("seed");
  else s.raw("seed");
  c.grid = parse_grid(s.sub("grid"));
  if (s.has("damping")) {
    const auto d = s.raw("damping");
    if (!(d.IsMap() && d["family"] && d["family"].as<std::string>() == "none" && d.size() == 1)) {
      c.damping = parse_damping(d, "damping", c.grid);
    }
  } else {
    s.raw("damping");
  }
  c.solver = parse_solver(s.sub("solver"));
  c.initial = parse_initial(s.sub("initial"));
  c.sampling = parse_sampling(s.sub("sampling"));
  {
    Section sg = s.sub("sigma");
    std::vector<double> fallback;
    for (int i = 0; i <= 50; ++i) fallback.push_back(c.solver.t_end * i / 50.0);
    c.sigma.times = values_or(sg, "times", fallback);
    sg.finish();
    for (std::size_t i = 0; i < c.sigma.times.size(); ++i) {
      if (c.sigma.times[i] < 0 || (i && c.sigma.times[i] <= c.sigma.times[i - 1])) {
        throw ConfigError("sigma.times: must be nonnegative and increasing");
      }
    }
  }
  {
    Section tg = s.sub("tgcc");
    c.tgcc.T0 = tg.get<double>("T0", c.tgcc.T0);
    c.tgcc.rungs = tg.get<int>("rungs", c.tgcc.rungs);
    c.tgcc.tolerance = tg.get<double>("tolerance", c.tgcc.tolerance);
    tg.finish();
    if (!(c.tgcc.T0 > 0)) throw ConfigError("tgcc.T0: must be positive");
    if (c.tgcc.rungs < 1) throw ConfigError("tgcc.rungs: must be >= 1");
  }
  if (c.initial.kind == InitialKind::beam || s.has("beam")) {
    c.beam = parse_beam(s.sub("beam"), c.grid);
  } else {
    s.raw("beam");
  }
  c.observe = parse_observe(s.sub("observe"), c.grid);
  c.fit = parse_fit(s.sub("fit"));
  if (s.has("sweep")) c.sweep = parse_sweep(s.sub("sweep"));
  else s.raw("sweep");
  s.finish();
  return c;
}

Config load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError(path + ": cannot open");
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(root);
}

YAML::Node with_value(const YAML::Node& root, const std::string& dotted, const YAML::Node& value) {
  YAML::Node out = YAML::Clone(root);
  std::vector<std::string> keys;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    keys.push_back(dotted.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  // yaml-cpp nodes are handles, so walking with copies edits `out` in place.
  std::vector<YAML::Node> chain{out};
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    YAML::Node next = chain.back()[keys[i]];
    if (next.IsDefined() && !next.IsNull() && !next.IsMap()) {
      throw ConfigError("sweep.parameter: '" + keys[i] + "' is not a section");
    }
    chain.push_back(next);
  }
  chain.back()[keys.back()] = YAML::Clone(value);
  return out;
}

nlohmann::json to_json(const YAML::Node& node) {
  using nlohmann::json;
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      json j = json::object();
      for (const auto& kv : node) j[kv.first.as<std::string>()] = to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      json j = json::array();
      for (const auto& v : node) j.push_back(to_json(v));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const auto& s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      long long i;
      double d;
      bool b;
      if (YAML::convert<long long>::decode(node, i)) return i;
      if (YAML::convert<double>::decode(node, d)) return d;
      if (YAML::convert<bool>::decode(node, b)) return b;
      return s;
    }
    default:
      return nullptr;
  }
}

}  // namespace dampwave::cli
