#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "dampwave/csv.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/experiments.hpp"
#include "dampwave/initial_data.hpp"
#include "dampwave/observe.hpp"

#ifndef DAMPWAVE_VERSION
#define DAMPWAVE_VERSION "unknown"
#endif

namespace dampwave::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Collects the files one run writes.
class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << contents;
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

template <class F>
std::string to_text(F&& emit) {
  std::ostringstream os;
  emit(os);
  return os.str();
}

std::string fmt(double x) { return format_double(x); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TorusGrid make_grid(const Config& c) { return TorusGrid(c.grid.dim, c.grid.points, c.grid.period); }

BeamSpec make_beam(const Config& c) { return BeamSpec::along(c.beam.gamma, c.beam.k, c.beam.t0); }

WaveState make_initial(const Config& c, std::uint64_t seed) {
  const auto g = make_grid(c);
  switch (c.initial.kind) {
    case InitialKind::random: {
      auto [u, v] = random_wave_data(g, c.initial.band, seed, c.initial.min_band);
      return WaveState(u, v);
    }
    case InitialKind::mode:
      return WaveState(cosine_mode(g, c.initial.mode, c.initial.amplitude, FieldKind::position),
                       Field::zeros(g, FieldKind::velocity));
    case InitialKind::beam: {
      const auto s = beam_field(make_beam(c), g, c.beam.t0);
      return WaveState(s.u, s.v, c.beam.t0);
    }
  }
  throw ConfigError("initial.kind: unsupported");
}

const DampingProfile& need_damping(const Config& c, const std::string& command) {
  if (!c.damping) throw ConfigError("damping: required by " + command);
  return *c.damping;
}

// Each command fills `summary` and returns its headline number in
// summary["metric"], which sweeps collect.

void simulate(const Config& c, std::uint64_t seed, Output& out, json& summary) {
  const auto r = evolve(make_initial(c, seed), c.damping, c.solver.t_end, c.solver.solver);
  out.write("trace.csv", to_text([&](auto& os) { r.trace.write_csv(os); }));
  out.write("final_u.csv", to_text([&](auto& os) { write_csv(r.state.u, os); }));
  const double E0 = r.trace.energy.front(), E1 = r.trace.energy.back();
  bool nonincreasing = true;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    nonincreasing = nonincreasing && r.trace.energy[i] <= r.trace.energy[i - 1] * (1 + 1e-12);
  }
  summary = {{"E0", E0},
             {"E_end", E1},
             {"energy_identity_defect", energy_identity_check(r.trace)},
             {"nonincreasing", nonincreasing},
             {"metric", E1 / E0}};
}

void sigma_cmd(const Config& c, std::uint64_t, Output& out, json& summary) {
  const auto& W = need_damping(c, "sigma");
  const auto curve = sigma_curve(W, c.sigma.times, c.sampling, c.grid.dim);
  out.write("sigma.csv", to_text([&](auto& os) {
              write_csv_header(os, {"t", "sigma"});
              for (std::size_t i = 0; i < curve.size(); ++i) write_csv_row(os, {c.sigma.times[i], curve[i]});
            }));
  const auto r = sigma(W, c.sigma.times.back(), c.sampling, c.grid.dim);
  summary = {{"report", to_json(r)}, {"metric", r.value}};
}

void tgcc_cmd(const Config& c, std::uint64_t, Output& out, json& summary) {
  const auto& W = need_damping(c, "tgcc");
  const auto r = check_tgcc(W, c.tgcc.T0, c.sampling, c.grid.dim, c.tgcc.rungs, c.tgcc.tolerance);
  out.write("tgcc_curve.csv", to_text([&](auto& os) {
              write_csv_header(os, {"T", "L", "witness_t0"});
              for (const auto& w : r.curve) write_csv_row(os, {w.T, w.value, w.witness_t0});
            }));
  summary = {{"report", to_json(r)}, {"metric", r.min_average}};
}

void beam_cmd(const Config& c, std::uint64_t, Output& out, json& summary) {
  const auto g = make_grid(c);
  const auto spec = make_beam(c);
  switch (c.beam.mode) {
    case BeamMode::residual: {
      double worst = 0.0;
      out.write("beam_residual.csv", to_text([&](auto& os) {
                  write_csv_header(os, {"t", "residual"});
                  for (double t : c.beam.times) {
                    const double r = residual_norm(spec, g, c.damping, t);
                    worst = std::max(worst, r);
                    write_csv_row(os, {t, r});
                  }
                }));
      summary = {{"k", c.beam.k}, {"max_residual", worst}, {"metric", worst}};
      return;
    }
    case BeamMode::energy: {
      double worst = 0.0;
      out.write("beam_energy.csv", to_text([&](auto& os) {
                  write_csv_header(os, {"t", "energy", "G_squared", "defect"});
                  for (double t : c.beam.times) {
                    const auto s = quasi_solution(spec, g, c.damping, t);
                    const double G = c.damping ? propagator_G(*c.damping, c.beam.gamma, c.beam.t0, t) : 1.0;
                    const double E = energy(s.u, s.v);
                    worst = std::max(worst, std::abs(E - G * G));
                    write_csv_row(os, {t, E, G * G, std::abs(E - G * G)});
                  }
                }));
      summary = {{"k", c.beam.k}, {"sup_defect", worst}, {"metric", worst}};
      return;
    }
    case BeamMode::exact: {
      const auto r = beam_vs_exact(spec, g, c.damping, c.beam.times.back(), c.solver.solver);
      out.write("beam_vs_exact.csv", to_text([&](auto& os) { r.write_csv(os); }));
      summary = {{"k", c.beam.k},
                 {"sup_defect", r.sup_defect},
                 {"initial_energy", r.initial_energy},
                 {"lower_bound_holds", r.lower_bound_holds},
                 {"metric", r.sup_defect}};
      return;
    }
  }
}

DampingProfile observation_weight(const Config& c) {
  if (c.observe.weight) return *c.observe.weight;
  if (c.damping) return *c.damping;
  throw ConfigError("observe.weight: required when there is no damping");
}

void observe_cmd(const Config& c, std::uint64_t seed, Output& out, json& summary) {
  const auto& o = c.observe;
  if (o.mode == ObserveMode::short_time) {
    const auto s = short_time_sweep(o.A, o.B, o.lambda, o.deltas);
    out.write("short_time.csv", to_text([&](auto& os) { s.write_csv(os); }));
    summary = {{"slope", s.slope}, {"metric", s.slope}};
    return;
  }
  const auto W = observation_weight(c);
  const auto initial = make_initial(c, seed);
  if (o.mode == ObserveMode::ratio) {
    // C_obs is only measured: the largest ratio over the sampled start times.
    double worst = 0.0;
    out.write("observability.csv", to_text([&](auto& os) {
                write_csv_header(os, {"t0", "energy", "observed", "ratio"});
                for (double t0 : o.t0) {
                  const auto r = observability_ratio(initial, {t0, o.T, W}, c.solver.solver);
                  worst = std::max(worst, r.ratio);
                  write_csv_row(os, {t0, r.energy, r.observed, r.ratio});
                }
              }));
    summary = {{"C_obs", worst}, {"observable", std::isfinite(worst)}, {"metric", worst}};
    return;
  }
  bool pass = true;
  double C_T = 1.0;
  out.write("sandwich.csv", to_text([&](auto& os) {
              write_csv_header(os, {"t0", "lhs", "mid", "rhs", "C_T", "lower_slack", "upper_slack"});
              for (double t0 : o.t0) {
                const auto r = sandwich_check(initial, {t0, o.T, W}, c.solver.solver);
                pass = pass && r.pass;
                C_T = r.C_T;
                write_csv_row(os, {t0, r.lhs, r.mid, r.rhs, r.C_T, r.lower_slack, r.upper_slack});
              }
            }));
  summary = {{"pass", pass}, {"C_T", C_T}, {"metric", C_T}};
}

void fit_cmd(const Config& c, std::uint64_t seed, Output& out, json& summary) {
  auto r = evolve(make_initial(c, seed), c.damping, c.solver.t_end, c.solver.solver);
  const bool wants_sigma =
      std::find(c.fit.models.begin(), c.fit.models.end(), RateModel::exp_sigma) != c.fit.models.end();
  if (wants_sigma) r.trace.sigma = sigma_curve(need_damping(c, "the exp_sigma fit"), r.trace.times, c.sampling,
                                               c.grid.dim);
  out.write("trace.csv", to_text([&](auto& os) { r.trace.write_csv(os); }));

  std::vector<RateFit> fits;
  json fj = json::array();
  double metric = std::numeric_limits<double>::quiet_NaN();
  for (auto m : c.fit.models) {
    fits.push_back(fit(r.trace, m, c.fit.window, c.fit.energy_floor));
    const auto& f = fits.back();
    fj.push_back({{"model", to_string(m)}, {"C", f.C}, {"c", f.c}, {"p", f.p}, {"residual", f.residual}});
    if (m == RateModel::stretched) metric = f.p;
  }
  if (std::isnan(metric)) metric = fits.front().c;
  out.write("fits.csv", to_text([&](auto& os) { write_csv(fits, os); }));
  summary = {{"fits", fj}, {"metric", metric}};
  if (wants_sigma) {
    const auto& f = *std::find_if(fits.begin(), fits.end(), [](const RateFit& x) { return x.model == RateModel::exp_sigma; });
    const auto v = sigma_exponent_bound_check(f);
    summary["sigma_bound"] = {{"pass", v.pass}, {"diagnostic", v.diagnostic}};
  }
}

using Command = std::function<void(const Config&, std::uint64_t, Output&, json&)>;

const Command* find_command(const std::string& name) {
  static const std::vector<std::pair<std::string, Command>> table{
      {"simulate", simulate}, {"sigma", sigma_cmd}, {"tgcc", tgcc_cmd},
      {"beam", beam_cmd},     {"observe", observe_cmd}, {"fit", fit_cmd},
  };
  for (const auto& [n, f] : table) {
    if (n == name) return &f;
  }
  return nullptr;
}

std::string plot_script(const std::vector<std::string>& files) {
  std::ostringstream os;
  os << "# Generated plotting stub: one figure per CSV, first column on the x axis.\n"
        "import pathlib\n\n"
        "import matplotlib.pyplot as plt\n"
        "import pandas as pd\n\n"
        "HERE = pathlib.Path(__file__).parent\n"
        "FILES = [\n";
  for (const auto& f : files) {
    if (f.size() > 4 && f.compare(f.size() - 4, 4, ".csv") == 0) os << "    \"" << f << "\",\n";
  }
  os << "]\n\n"
        "for name in FILES:\n"
        "    df = pd.read_csv(HERE / name)\n"
        "    fig, ax = plt.subplots()\n"
        "    x = df.columns[0]\n"
        "    for col in df.columns[1:]:\n"
        "        if pd.api.types.is_numeric_dtype(df[col]):\n"
        "            ax.plot(df[x], df[col], label=col)\n"
        "    ax.set_xlabel(x)\n"
        "    ax.legend()\n"
        "    ax.set_title(name)\n"
        "    fig.savefig(HERE / (name[:-4] + \".png\"), dpi=120)\n";
  return os.str();
}

void finish(Output& out, const std::string& command, const Config* config, const RunOptions& opts,
            const json& summary, int code, double seconds) {
  out.write("summary.json", summary.dump(2) + "\n");
  auto files = out.files();
  files.push_back("plot.py");
  files.push_back("manifest.json");
  out.write("plot.py", plot_script(out.files()));
  json m = {{"command", command},
            {"seed", opts.seed},
            {"threads", opts.threads},
            {"code_version", DAMPWAVE_VERSION},
            {"wall_time_seconds", seconds},
            {"exit_code", code},
            {"files", files},
            {"config", config ? to_json(config->source) : json(nullptr)}};
  out.write("manifest.json", m.dump(2) + "\n");
}

int classify(std::ostream& log, const std::string& where, const std::function<void()>& body) {
  try {
    body();
    return ExitCode::ok;
  } catch (const ConfigError& e) {
    log << where << "config error: " << e.what() << "\n";
    return ExitCode::config_error;
  } catch (const std::invalid_argument& e) {
    log << where << "config error: " << e.what() << "\n";
    return ExitCode::config_error;
  } catch (const std::out_of_range& e) {
    log << where << "config error: " << e.what() << "\n";
    return ExitCode::config_error;
  } catch (const NumericalFailure& e) {
    log << where << "numerical failure: " << e.what() << "\n";
    return ExitCode::numerical_failure;
  } catch (const std::exception& e) {
    log << where << "numerical failure: " << e.what() << "\n";
    return ExitCode::numerical_failure;
  }
}

std::string point_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%03zu", i);
  return buf;
}

int sweep(const Config& c, const RunOptions& opts, std::ostream& log, json& summary, Output& out) {
  const auto& sw = *c.sweep;
  const std::size_t n = sw.values.size();
  struct Point {
    int code = 0;
    double metric = std::numeric_limits<double>::quiet_NaN();
    std::string message;
  };
  std::vector<Point> points(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      std::ostringstream plog;
      RunOptions p = opts;
      p.out = opts.out / point_name(i);
      p.threads = 1;
      json psum;
      points[i].code = classify(plog, point_name(i) + ": ", [&] {
        YAML::Node doc = with_value(c.source, sw.parameter, sw.values[i]);
        doc.remove("sweep");
        const auto pc = parse_config(doc);
        const auto start = std::chrono::steady_clock::now();
        Output po(p.out);
        (*find_command(sw.command))(pc, p.seed, po, psum);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        finish(po, sw.command, &pc, p, psum, 0, secs);
      });
      if (psum.contains("metric") && psum["metric"].is_number()) points[i].metric = psum["metric"];
      points[i].message = plog.str();
      std::lock_guard lock(log_mutex);
      log << point_name(i) << ": " << (points[i].code == 0 ? "ok" : "failed") << "\n" << points[i].message;
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = std::max(1, std::min<int>(opts.threads, static_cast<int>(n)));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<double> xs, ys;
  bool numeric = true;
  int worst = 0;
  std::ostringstream csv;
  csv << "point,value,status,metric\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = sw.values[i];
    std::string value = v.IsScalar() ? v.Scalar() : json(to_json(v)).dump();
    csv << point_name(i) << ',' << value << ',' << points[i].code << ','
        << (std::isnan(points[i].metric) ? std::string() : fmt(points[i].metric)) << '\n';
    double x;
    if (points[i].code == 0 && v.IsScalar() && YAML::convert<double>::decode(v, x) && x > 0 &&
        points[i].metric > 0) {
      xs.push_back(x);
      ys.push_back(points[i].metric);
    } else {
      numeric = false;
    }
    worst = std::max(worst, points[i].code);
  }
  out.write("sweep_summary.csv", csv.str());
  summary = {{"command", sw.command}, {"parameter", sw.parameter}, {"points", n}};
  if (numeric && xs.size() >= 2) {
    summary["loglog_slope"] = loglog_slope(xs, ys);
    log << "log-log slope of metric against " << sw.parameter << ": " << fmt(summary["loglog_slope"]) << "\n";
  }
  return worst;
}

}  // namespace

int list_experiments_command(std::ostream& out) {
  for (const auto& e : list_experiments()) out << e.name << "  " << e.description << "\n";
  return ExitCode::ok;
}

int run_command(const std::string& command, const Config* config, const RunOptions& opts, std::ostream& log,
                const std::string& experiment) {
  const auto start = std::chrono::steady_clock::now();
  json summary;
  int code = 0;
  std::unique_ptr<Output> out;
  const int status = classify(log, "", [&] {
    if (command == "reproduce") {
      const auto r = run_experiment(experiment, opts.seed);
      out = std::make_unique<Output>(opts.out);
      for (const auto& [name, contents] : r.files) out->write(name, contents);
      for (const auto& chk : r.checks) {
        log << (chk.pass ? "  ok    " : "  FAIL  ") << chk.name << "  " << chk.detail << "\n";
      }
      log << experiment << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
      summary = r.summary;
      code = r.passed() ? ExitCode::ok : ExitCode::acceptance_failure;
      return;
    }
    if (!config) throw ConfigError("--config: required for " + command);
    if (command == "sweep") {
      if (!config->sweep) throw ConfigError("sweep: section required");
      out = std::make_unique<Output>(opts.out);
      code = sweep(*config, opts, log, summary, *out);
      return;
    }
    const Command* f = find_command(command);
    if (!f) throw ConfigError("unknown command '" + command + "'");
    json s;
    Output o(opts.out);
    (*f)(*config, opts.seed, o, s);
    out = std::make_unique<Output>(std::move(o));
    summary = s;
    if (command == "tgcc") {
      const auto& rep = s["report"];
      log << (rep["satisfied"].get<bool>() ? "TGCC satisfied" : "TGCC not satisfied") << ", min average "
          << fmt(rep["min_average"].get<double>()) << ", witness " << rep["witness"].dump() << " t0 "
          << fmt(rep["witness_t0"].get<double>()) << " T " << fmt(rep["witness_T"].get<double>()) << "\n";
    } else {
      log << command << ": " << summary.dump() << "\n";
    }
  });
  if (status != 0) code = status;
  if (out) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const int wrote = classify(log, "", [&] { finish(*out, command, config, opts, summary, code, secs); });
    if (wrote != 0 && code == 0) code = wrote;
  }
  return code;
}

}  // namespace dampwave::cli
