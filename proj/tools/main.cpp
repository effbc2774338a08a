#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emraman/interaction.hpp"
#include "emraman/resonance.hpp"
#include "emraman/spectral.hpp"
#include "emraman/symflow.hpp"
#include "emraman/zakharov.hpp"

using json = nlohmann::ordered_json;
using namespace emr;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void csv_header(std::ostream& os, const std::string& sub, const KeyValues& kv) {
  os << "# tool_version=" << kVersion << "\n# subcommand=" << sub << "\n";
  for (const auto& [key, val] : kv) os << "# " << key << "=" << val << "\n";
}

// Shared run configuration resolved from flags.
struct Config {
  PlasmaParams p;
  std::string pair_str = "1,4";
  double amplitude = 1.0;
  double xi_min = 0.0, xi_max = 0.0;
  bool window_set = false;
  double eta = 0.0;
  int samples = 200;
  double k_min = 1.8, k_max = 5.0;
  std::string xi_str = "auto";
  std::string envelope = "const:1";
  int grid_n = 256;
  double grid_l = 40.0;
  int dim_y = 1;
  double dt = 1e-4;
  double t_final = -1.0;
  double flow_epsilon = 1e-4;
  bool no_coupling = false;
  std::string output;
  std::string format;
  unsigned seed = 0;
};

PairLabel parse_pair(const std::string& s) {
  PairLabel pl;
  if (std::sscanf(s.c_str(), "%d,%d", &pl.j, &pl.jp) != 2 || !pl.valid())
    throw std::invalid_argument("pair must be j,j' with 1 <= j < j' <= 5");
  return pl;
}

struct Envelope {
  std::string kind = "const";
  double amp = 1.0;
  double width = 2.0;
};

Envelope parse_envelope(const std::string& s) {
  Envelope e;
  auto colon = s.find(':');
  e.kind = s.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (e.kind == "const") {
    if (!rest.empty() && std::sscanf(rest.c_str(), "%lf", &e.amp) != 1)
      throw std::invalid_argument("envelope const takes const:amplitude");
  } else if (e.kind == "gauss") {
    if (std::sscanf(rest.c_str(), "%lf,%lf", &e.amp, &e.width) != 2)
      throw std::invalid_argument("envelope gauss takes gauss:amplitude,width");
    if (!(e.width > 0.0)) throw std::invalid_argument("envelope width must be positive");
  } else {
    throw std::invalid_argument("envelope kind must be const or gauss");
  }
  return e;
}

// Output stream bound to --output (file) or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file: " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }
  ~Sink() { if (file_.is_open()) file_.close(); }

 private:
  std::ofstream file_;
};

KeyValues param_kv(const Config& c) {
  return {{"k", fmt(c.p.k)},
          {"theta_e", fmt(c.p.theta_e)},
          {"alpha_ie", fmt(c.p.alpha_ie)},
          {"epsilon", fmt(c.p.epsilon)},
          {"seed", std::to_string(c.seed)}};
}

int run_dispersion(const Config& c) {
  c.p.validate();
  double lo = c.window_set ? c.xi_min : -5.0;
  double hi = c.window_set ? c.xi_max : 5.0;
  Sink sink(c.output);
  auto kv = param_kv(c);
  kv.push_back({"xi_min", fmt(lo)});
  kv.push_back({"xi_max", fmt(hi)});
  kv.push_back({"eta", fmt(c.eta)});
  kv.push_back({"samples", std::to_string(c.samples)});
  csv_header(sink.os(), "dispersion", kv);
  sink.os() << "xi,lambda1,lambda2,lambda3,lambda4,lambda5\n";
  bool with_eps = c.p.epsilon > 0.0;
  for (int i = 0; i < c.samples; ++i) {
    double xi = lo + (hi - lo) * i / (c.samples - 1);
    auto lam = eigenvalues(c.p, Frequency(xi, c.eta), with_eps);
    sink.os() << fmt(xi);
    for (double l : lam) sink.os() << ',' << fmt(l);
    sink.os() << '\n';
  }
  std::cerr << "dispersion: " << c.samples << " samples\n";
  return 0;
}

const std::vector<PairLabel>& all_pairs() {
  static const std::vector<PairLabel> pairs = {
      {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}};
  return pairs;
}

int run_resonances(const Config& c, bool pair_given) {
  c.p.validate();
  double lo, hi;
  if (c.window_set) {
    lo = c.xi_min;
    hi = c.xi_max;
  } else {
    default_scan_window(c.p, lo, hi);
  }
  std::vector<PairLabel> pairs =
      pair_given ? std::vector<PairLabel>{parse_pair(c.pair_str)} : all_pairs();
  Sink sink(c.output);
  auto kv = param_kv(c);
  kv.push_back({"xi_min", fmt(lo)});
  kv.push_back({"xi_max", fmt(hi)});
  csv_header(sink.os(), "resonances", kv);
  sink.os() << "j,jp,xi,phase_residual\n";
  int count = 0;
  for (auto pl : pairs) {
    if (!pair_is_resonant(c.p, pl)) continue;
    for (const auto& rec : find_axis_resonances(c.p, pl, lo, hi)) {
      sink.os() << pl.j << ',' << pl.jp << ',' << fmt(rec.zeta.xi) << ','
                << fmt(rec.phase_residual) << '\n';
      ++count;
    }
  }
  std::cerr << "resonances: " << count << " axis roots\n";
  return 0;
}

int run_spacetime(const Config& c) {
  c.p.validate();
  auto th = thresholds(c.p);
  Sink sink(c.output);
  auto kv = param_kv(c);
  kv.push_back({"k_c", fmt(th.k_c)});
  kv.push_back({"k_min", fmt(th.k_min)});
  kv.push_back({"cond_k_thetae", th.cond_k_thetae ? "true" : "false"});
  csv_header(sink.os(), "spacetime", kv);
  sink.os() << "j,jp,xi,phase_residual,nu1,nu2\n";
  int count = 0;
  for (auto pl : all_pairs()) {
    if (!pair_is_resonant(c.p, pl)) continue;
    for (const auto& rec : space_time_resonances(c.p, pl)) {
      sink.os() << pl.j << ',' << pl.jp << ',' << fmt(rec.zeta.xi) << ','
                << fmt(rec.phase_residual) << ',' << fmt(rec.nu(0)) << ','
                << fmt(rec.nu(1)) << '\n';
      ++count;
    }
  }
  std::cerr << "spacetime: " << count << " space-time resonances\n";
  return 0;
}

int run_trace_scan(const Config& c) {
  Sink sink(c.output);
  auto kv = param_kv(c);
  kv.push_back({"k_min", fmt(c.k_min)});
  kv.push_back({"k_max", fmt(c.k_max)});
  kv.push_back({"samples", std::to_string(c.samples)});
  csv_header(sink.os(), "trace-scan", kv);
  sink.os() << "k,tr14_minus,tr14_plus,tr12_plus,tr12_minus\n";
  for (int i = 0; i < c.samples; ++i) {
    double k = c.k_min + (c.k_max - c.k_min) * i / (c.samples - 1);
    PlasmaParams p = c.p;
    p.k = k;
    p.validate();
    double w = p.omega();
    double s2m = w * w - 2.0 * w, s2p = w * w + 2.0 * w;
    double nan = std::nan("");
    double t14m = nan, t14p = nan;
    if (s2m > 0.0) {
      double s = std::sqrt(s2m);
      t14m = trace_closed_form(p, {1, 4}, -k - s)->real();
      t14p = trace_closed_form(p, {1, 4}, -k + s)->real();
    }
    double sp = std::sqrt(s2p);
    double t12p = trace_closed_form(p, {1, 2}, -k + sp)->real();
    double t12m = trace_closed_form(p, {1, 2}, -k - sp)->real();
    sink.os() << fmt(k) << ',' << fmt(t14m) << ',' << fmt(t14p) << ','
              << fmt(t12p) << ',' << fmt(t12m) << '\n';
  }
  std::cerr << "trace-scan: " << c.samples << " samples\n";
  return 0;
}

int run_rate_scan(const Config& c) {
  PlasmaParams probe = c.p;
  probe.k = c.k_min;
  probe.validate();
  double w = probe.omega();
  if (w * w - 2.0 * w <= 0.0)
    throw RegimeError("rate-scan requires |k| above the resonance threshold sqrt(3)");
  double kc = thresholds(probe).k_c;
  if (std::isfinite(kc) && c.k_min <= kc)
    throw RegimeError("rate-scan requires |k| above the existence threshold k_c");
  Sink sink(c.output);
  auto kv = param_kv(c);
  kv.push_back({"k_min", fmt(c.k_min)});
  kv.push_back({"k_max", fmt(c.k_max)});
  kv.push_back({"samples", std::to_string(c.samples)});
  kv.push_back({"amplitude", fmt(c.amplitude)});
  csv_header(sink.os(), "rate-scan", kv);
  sink.os() << "k,gamma_backward,gamma_forward\n";
  for (int i = 0; i < c.samples; ++i) {
    double k = c.k_min + (c.k_max - c.k_min) * i / (c.samples - 1);
    PlasmaParams p = c.p;
    p.k = k;
    auto rates = raman_rate_asymptotics(p, c.amplitude);
    sink.os() << fmt(k) << ',' << fmt(rates.backward) << ','
              << fmt(rates.forward) << '\n';
  }
  std::cerr << "rate-scan: " << c.samples << " samples\n";
  return 0;
}

int run_report(const Config& c) {
  c.p.validate();
  auto rep = growth_rates(c.p, c.amplitude);
  auto entries = classify_raman(c.p);
  Sink sink(c.output);
  auto kv = param_kv(c);
  kv.push_back({"amplitude", fmt(c.amplitude)});
  kv.push_back({"gamma", fmt(rep.gamma)});
  kv.push_back({"argmax_pair", std::to_string(rep.argmax_pair.j) + "," +
                                   std::to_string(rep.argmax_pair.jp)});
  kv.push_back({"argmax_xi", fmt(rep.argmax_xi)});
  kv.push_back({"stable", rep.stable ? "true" : "false"});
  kv.push_back({"acoustic_bound", fmt(rep.acoustic_bound)});
  csv_header(sink.os(), "report", kv);
  sink.os() << "j,jp,xi,trace_re,trace_im,class\n";
  auto cls_name = [](RamanClass cls) {
    switch (cls) {
      case RamanClass::stable: return "stable";
      case RamanClass::unstable_backward: return "unstable_backward";
      case RamanClass::unstable_forward: return "unstable_forward";
      case RamanClass::transparent: return "transparent";
    }
    return "stable";
  };
  for (const auto& e : entries)
    sink.os() << e.pair.j << ',' << e.pair.jp << ',' << fmt(e.xi) << ','
              << fmt(e.trace.real()) << ',' << fmt(e.trace.imag()) << ','
              << cls_name(e.cls) << '\n';
  std::cerr << "report: gamma=" << fmt(rep.gamma) << " over " << entries.size()
            << " resonances\n";
  return 0;
}

int run_flow(const Config& c) {
  c.p.validate();
  PairLabel pair = parse_pair(c.pair_str);
  double xi;
  if (c.xi_str == "auto") {
    auto roots = space_time_resonances(c.p, pair);
    if (roots.empty())
      throw RegimeError("no space-time resonance for this pair; supply --xi");
    xi = roots.front().zeta.xi;
  } else {
    xi = std::stod(c.xi_str);
  }
  Frequency zeta(xi, c.eta, 0.0);
  cd trace = resonance_trace(c.p, pair, zeta);
  Envelope env = parse_envelope(c.envelope);

  FlowGrid grid;
  grid.n_points = c.grid_n;
  grid.length = c.grid_l;
  grid.dt = c.dt;
  grid.epsilon = c.flow_epsilon;
  // default horizon: long enough in rescaled time for the predicted growth
  // to dominate the fit window
  double gamma_scale = std::sqrt(std::max(trace.real(), 0.0));
  double t_final = c.t_final > 0.0
                       ? c.t_final
                       : (gamma_scale > 0.0 ? 10.0 / gamma_scale : 5.0) *
                             std::sqrt(grid.epsilon);

  std::function<cd(const Vec2&)> g;
  if (env.kind == "const") {
    g = [env](const Vec2&) { return cd(env.amp, 0.0); };
  } else {
    g = [env](const Vec2& y) {
      return cd(env.amp * std::exp(-y.squaredNorm() / (env.width * env.width)),
                0.0);
    };
  }
  auto spec = make_pair_block(c.p, pair, zeta, trace, g, grid);
  auto traj = emr::run_flow(spec, grid, t_final);
  auto fit = estimate_growth(traj, 0.2 * t_final, t_final);
  double predicted = std::sqrt(std::max(trace.real(), 0.0)) * env.amp;

  Sink sink(c.output);
  if (c.format == "csv") {
    auto kv = param_kv(c);
    kv.push_back({"pair", c.pair_str});
    kv.push_back({"xi", fmt(xi)});
    kv.push_back({"eta", fmt(c.eta)});
    kv.push_back({"flow_epsilon", fmt(grid.epsilon)});
    kv.push_back({"envelope", c.envelope});
    kv.push_back({"t_final", fmt(t_final)});
    csv_header(sink.os(), "flow", kv);
    write_trajectory_csv(traj, sink.os());
  } else {
    json out;
    out["subcommand"] = "flow";
    out["tool_version"] = kVersion;
    out["k"] = c.p.k;
    out["theta_e"] = c.p.theta_e;
    out["alpha_ie"] = c.p.alpha_ie;
    out["pair"] = c.pair_str;
    out["xi"] = xi;
    out["eta"] = c.eta;
    out["epsilon"] = grid.epsilon;
    out["grid_n"] = grid.n_points;
    out["grid_l"] = grid.length;
    out["dt"] = grid.dt;
    out["t_final"] = t_final;
    out["envelope"] = c.envelope;
    out["trace_re"] = trace.real();
    out["trace_im"] = trace.imag();
    out["predicted_rate"] = predicted;
    out["fitted_rate"] = fit.rate;
    out["r_squared"] = fit.r_squared;
    out["reliable"] = fit.reliable;
    sink.os() << out.dump(2) << '\n';
  }
  std::cerr << "flow: fitted=" << fmt(fit.rate) << " predicted="
            << fmt(predicted) << '\n';
  return 0;
}

int run_zakharov(const Config& c) {
  c.p.validate();
  Envelope env = parse_envelope(c.envelope);
  ZakharovGrid grid;
  grid.dim_y = c.dim_y;
  grid.n = c.grid_n;
  grid.length = c.grid_l;
  auto a = [env](const Eigen::Vector3d& x) {
    if (env.kind == "const") return cd(env.amp, 0.0);
    return cd(env.amp * std::exp(-x.squaredNorm() / (env.width * env.width)),
              0.0);
  };
  auto state = init_from_wkb(a, c.p, grid);
  double T = c.t_final > 0.0 ? c.t_final : 1.0;
  auto rep = run_and_report(std::move(state), T, c.dt, !c.no_coupling);

  Sink sink(c.output);
  if (c.format == "csv") {
    auto kv = param_kv(c);
    kv.push_back({"grid_n", std::to_string(grid.n)});
    kv.push_back({"grid_l", fmt(grid.length)});
    kv.push_back({"dim_y", std::to_string(grid.dim_y)});
    kv.push_back({"dt", fmt(c.dt)});
    kv.push_back({"t_final", fmt(T)});
    kv.push_back({"envelope", c.envelope});
    kv.push_back({"mass_drift", fmt(rep.mass_drift)});
    kv.push_back({"amplitude_max", fmt(rep.amplitude_max)});
    csv_header(sink.os(), "zakharov", kv);
    write_state_csv(rep.final, sink.os());
  } else {
    json out;
    out["subcommand"] = "zakharov";
    out["tool_version"] = kVersion;
    out["k"] = c.p.k;
    out["theta_e"] = c.p.theta_e;
    out["alpha_ie"] = c.p.alpha_ie;
    out["grid_n"] = grid.n;
    out["grid_l"] = grid.length;
    out["dim_y"] = grid.dim_y;
    out["dt"] = c.dt;
    out["t_final"] = T;
    out["envelope"] = c.envelope;
    out["coupling"] = !c.no_coupling;
    out["mass_drift"] = rep.mass_drift;
    out["amplitude_max"] = rep.amplitude_max;
    sink.os() << out.dump(2) << '\n';
  }
  std::cerr << "zakharov: mass_drift=" << fmt(rep.mass_drift)
            << " amplitude_max=" << fmt(rep.amplitude_max) << '\n';
  return 0;
}

int run_figure(const Config& c, const std::string& id) {
  if (id == "variety") {
    Config cv = c;
    if (cv.samples == 200) cv.samples = 201;
    return run_dispersion(cv);
  }
  if (id == "trace-vs-k") {
    Config cv = c;
    cv.k_min = 0.5;
    cv.k_max = 5.0;
    return run_trace_scan(cv);
  }
  if (id == "rate-vs-k") return run_rate_scan(c);
  if (id == "stable-resonances" || id == "unstable-resonances") {
    c.p.validate();
    std::vector<PairLabel> pairs = id == "stable-resonances"
                                       ? std::vector<PairLabel>{{1, 2}, {4, 5}}
                                       : std::vector<PairLabel>{{1, 4}, {2, 5}};
    double lo, hi;
    default_scan_window(c.p, lo, hi);
    GridSpec gs{lo, hi, 0.0, 2.0 * std::abs(c.p.k), 400, 400};
    Sink sink(c.output);
    auto kv = param_kv(c);
    kv.push_back({"figure", id});
    csv_header(sink.os(), "figure", kv);
    sink.os() << "j,jp,xi,r\n";
    for (auto pl : pairs)
      for (const auto& pt : resonance_curve(c.p, pl, gs))
        sink.os() << pl.j << ',' << pl.jp << ',' << fmt(pt.xi) << ','
                  << fmt(pt.r) << '\n';
    std::cerr << "figure " << id << ": curves written\n";
    return 0;
  }
  throw std::invalid_argument(
      "unknown figure id (expected variety, stable-resonances, "
      "unstable-resonances, trace-vs-k, rate-vs-k)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-fluid Euler-Maxwell spectral theory, Raman resonances and "
               "growth rates"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Config c;
  std::string figure_id;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--k", c.p.k, "wavenumber of the pump");
    sub->add_option("--theta-e", c.p.theta_e, "electron thermal velocity");
    sub->add_option("--alpha-ie", c.p.alpha_ie, "ion-electron mass ratio parameter");
    sub->add_option("--epsilon", c.p.epsilon, "scaling parameter");
    sub->add_option("--seed", c.seed, "seed echoed into artifacts");
    sub->add_option("--output", c.output, "artifact path (default stdout)");
    sub->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* disp = app.add_subcommand("dispersion", "sample the eigenvalue branches");
  add_common(disp);
  disp->add_option("--samples", c.samples);
  auto* dxmin = disp->add_option("--xi-min", c.xi_min);
  disp->add_option("--xi-max", c.xi_max)->needs(dxmin);
  disp->add_option("--eta", c.eta, "transverse frequency magnitude");

  auto* res = app.add_subcommand("resonances", "axis resonance roots");
  add_common(res);
  auto* respair = res->add_option("--pair", c.pair_str, "pair j,j'");
  auto* rxmin = res->add_option("--xi-min", c.xi_min);
  res->add_option("--xi-max", c.xi_max)->needs(rxmin);

  auto* st = app.add_subcommand("spacetime", "space-time resonances and thresholds");
  add_common(st);

  auto* ts = app.add_subcommand("trace-scan", "trace closed forms vs k");
  add_common(ts);
  ts->add_option("--k-min", c.k_min);
  ts->add_option("--k-max", c.k_max);
  ts->add_option("--samples", c.samples);

  auto* rs = app.add_subcommand("rate-scan", "Raman rates vs k");
  add_common(rs);
  rs->add_option("--k-min", c.k_min);
  rs->add_option("--k-max", c.k_max);
  rs->add_option("--samples", c.samples);
  rs->add_option("--amplitude", c.amplitude);

  auto* fl = app.add_subcommand("flow", "symbolic-flow run, fitted vs predicted rate");
  add_common(fl);
  fl->add_option("--pair", c.pair_str);
  fl->add_option("--xi", c.xi_str, "longitudinal frequency or auto");
  fl->add_option("--eta", c.eta);
  fl->add_option("--grid-n", c.grid_n);
  fl->add_option("--grid-l", c.grid_l);
  fl->add_option("--dt", c.dt);
  fl->add_option("--t-final", c.t_final);
  fl->add_option("--flow-epsilon", c.flow_epsilon,
                 "epsilon of the 1/sqrt(eps) scaling (defaults to --epsilon if set)");
  fl->add_option("--envelope", c.envelope, "const:amp or gauss:amp,width");

  auto* zk = app.add_subcommand("zakharov", "envelope run");
  add_common(zk);
  zk->add_option("--grid-n", c.grid_n);
  zk->add_option("--grid-l", c.grid_l);
  zk->add_option("--dim-y", c.dim_y);
  zk->add_option("--dt", c.dt);
  zk->add_option("--t-final", c.t_final);
  zk->add_option("--envelope", c.envelope);
  zk->add_flag("--no-coupling", c.no_coupling, "disable the nonlinearity");

  auto* rp = app.add_subcommand("report", "full classification table");
  add_common(rp);
  rp->add_option("--amplitude", c.amplitude);

  auto* fig = app.add_subcommand("figure", "figure data emission");
  add_common(fig);
  fig->add_option("figure_id", figure_id,
                  "variety | stable-resonances | unstable-resonances | "
                  "trace-vs-k | rate-vs-k")
      ->required();
  fig->add_option("--samples", c.samples);
  fig->add_option("--k-min", c.k_min);
  fig->add_option("--k-max", c.k_max);
  fig->add_option("--amplitude", c.amplitude);
  fig->add_option("--eta", c.eta);
  auto* fxmin = fig->add_option("--xi-min", c.xi_min);
  fig->add_option("--xi-max", c.xi_max)->needs(fxmin);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  c.window_set = (disp->count("--xi-min") || res->count("--xi-min") ||
                  fig->count("--xi-min"));
  if (fl->parsed() && !fl->count("--flow-epsilon") && fl->count("--epsilon"))
    c.flow_epsilon = c.p.epsilon;
  if (c.samples < 2) {
    std::cerr << "error: --samples must be at least 2\n";
    return 2;
  }

  try {
    if (disp->parsed()) return run_dispersion(c);
    if (res->parsed()) return run_resonances(c, respair->count() > 0);
    if (st->parsed()) return run_spacetime(c);
    if (ts->parsed()) return run_trace_scan(c);
    if (rs->parsed()) return run_rate_scan(c);
    if (fl->parsed()) return run_flow(c);
    if (zk->parsed()) return run_zakharov(c);
    if (rp->parsed()) return run_report(c);
    if (fig->parsed()) return run_figure(c, figure_id);
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
