// usvbench: command-line front end for the vessel workbench. Subcommands
// cover open-loop simulation, parameter identification, trajectory
// tracking, Monte Carlo docking, and the bridge-building mission. Every
// run ends with a manifest that checksums its artifacts so a re-run can
// be verified byte for byte.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "usv/dock_trial.hpp"
#include "usv/manifest.hpp"
#include "usv/maneuver.hpp"
#include "usv/metrics.hpp"
#include "usv/mission.hpp"
#include "usv/reference.hpp"
#include "usv/rng.hpp"
#include "usv/svg.hpp"
#include "usv/sysid.hpp"
#include "usv/vessel_config.hpp"
#include "usv/wave.hpp"

namespace {

using namespace usv;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

/// Shared per-command state: the parsed config file (when given), the
/// resolved output directory, and the effective key-value config echoed
/// into the manifest.
struct CmdContext {
  CLI::App* cmd = nullptr;
  std::string config_path;
  std::string out_flag;
  uint64_t seed = 0;
  Kv file;
  fs::path out;
  std::map<std::string, std::string> effective;

  bool flag_given(const std::string& name) const {
    return cmd->count(name) > 0;
  }

  /// Precedence: explicit flag > config file > built-in default. The
  /// variable arrives holding flag-or-default; the file fills the gap.
  void settle(const char* flag, const char* key, double& v) {
    if (!flag_given(flag) && file.has(key)) v = file.get_double(key);
    effective[key] = fmt_double(v);
  }
  void settle(const char* flag, const char* key, int& v) {
    if (!flag_given(flag) && file.has(key)) v = file.get_int(key);
    effective[key] = std::to_string(v);
  }
  void settle(const char* flag, const char* key, uint64_t& v) {
    if (!flag_given(flag) && file.has(key)) {
      v = static_cast<uint64_t>(file.get_int(key));
    }
    effective[key] = std::to_string(v);
  }
  void settle(const char* flag, const char* key, std::string& v) {
    if (!flag_given(flag) && file.has(key)) v = file.get_string(key);
    effective[key] = v;
  }
  void settle(const char* flag, const char* key, std::vector<double>& v) {
    if (!flag_given(flag) && file.has(key)) v = file.get_list(key);
    effective[key] = join_doubles(v);
  }

  /// Config-file-only knob (no flag spelling).
  void file_only(const char* key, double& v) {
    if (file.has(key)) v = file.get_double(key);
    effective[key] = fmt_double(v);
  }

  VesselConfig vessel() const {
    return config_path.empty() ? VesselConfig{} : vessel_config_from_kv(file);
  }
};

/// Output directory: --out flag, else $USVBENCH_OUT/<command>, else
/// runs/<command>.
fs::path resolve_out(const CmdContext& ctx, const std::string& command) {
  fs::path dir;
  if (!ctx.out_flag.empty()) {
    dir = ctx.out_flag;
  } else if (const char* env = std::getenv("USVBENCH_OUT")) {
    dir = fs::path(env) / command;
  } else {
    dir = fs::path("runs") / command;
  }
  fs::create_directories(dir);
  return dir;
}

void prepare(CmdContext& ctx, const std::string& command) {
  if (!ctx.config_path.empty()) ctx.file = Kv::parse_file(ctx.config_path);
  ctx.settle("--seed", "seed", ctx.seed);
  ctx.out = resolve_out(ctx, command);
  ctx.effective["out"] = ctx.out.string();
  if (!ctx.config_path.empty()) ctx.effective["config"] = ctx.config_path;
}

void add_common(CLI::App* cmd, CmdContext& ctx) {
  ctx.cmd = cmd;
  cmd->add_option("--config", ctx.config_path,
                  "key-value config file (flags still win)");
  cmd->add_option("--seed", ctx.seed, "master random seed");
  cmd->add_option("--out", ctx.out_flag, "output directory");
}

WaveDisturbance water_preset(const std::string& name, uint64_t seed) {
  if (name == "calm") return calm_water();
  if (name == "turbulent") return turbulent_water(seed);
  throw std::invalid_argument("unknown water preset: " + name);
}

double form_length(const std::string& name) {
  if (name == "contracted") return 0.0;
  if (name == "expanded") return kMaxExpansion;
  throw std::invalid_argument("unknown form: " + name);
}

std::vector<std::string> expand_both(const std::string& value,
                                     const char* a, const char* b) {
  if (value == "both") return {a, b};
  return {value};
}

void finish_manifest(RunManifest& m, const CmdContext& ctx,
                     const std::string& command,
                     const std::vector<std::string>& artifacts) {
  m.command = command;
  m.config = ctx.effective;
  m.seed = ctx.seed;
  m.output_dir = ctx.out.string();
  for (const std::string& rel : artifacts) m.add_artifact(rel);
  m.write((ctx.out / "manifest.json").string());
  std::printf("wrote %s\n", (ctx.out / "manifest.json").string().c_str());
}

std::vector<std::string> raw_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) out.emplace_back(argv[i]);
  return out;
}

// ---------------------------------------------------------------------------
// simulate: one open-loop maneuver at a fixed expansion

struct SimulateOpts {
  CmdContext ctx;
  std::string maneuver = "straight";
  double length = 0.0;
  double duration = 20.0;
  double dt = 0.05;
  double noise = 0.0;
};

int cmd_simulate(SimulateOpts& o, const std::vector<std::string>& args) {
  prepare(o.ctx, "simulate");
  o.ctx.settle("--maneuver", "maneuver", o.maneuver);
  o.ctx.settle("--length", "length", o.length);
  o.ctx.settle("--duration", "duration", o.duration);
  o.ctx.settle("--dt", "dt", o.dt);
  o.ctx.settle("--noise", "noise", o.noise);

  ManeuverOptions mo;
  mo.duration = o.duration;
  mo.dt = o.dt;
  mo.velocity_noise_rel = o.noise;
  const ManeuverLog log = generate_maneuver_log(
      o.ctx.vessel(), maneuver_kind_from_name(o.maneuver), o.length, mo,
      o.ctx.seed);
  log.write_csv((o.ctx.out / "maneuver.csv").string());

  std::vector<double> xs, ys;
  for (const ManeuverSample& s : log.samples) {
    xs.push_back(s.state.pose.x);
    ys.push_back(s.state.pose.y);
  }
  SvgPlot plot("maneuver path", "x [m]", "y [m]");
  plot.add_line(xs, ys, o.maneuver, "#2266cc");
  plot.write((o.ctx.out / "path.svg").string());

  std::printf("simulate: %s l=%.2f, %zu samples\n", o.maneuver.c_str(),
              o.length, log.samples.size());
  RunManifest m;
  m.arguments = args;
  finish_manifest(m, o.ctx, "simulate", {"maneuver.csv", "path.svg"});
  return 0;
}

// ---------------------------------------------------------------------------
// identify: sweep expansions, fit the parameter polynomials

struct IdentifyOpts {
  CmdContext ctx;
  std::vector<double> lengths{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  double noise = 0.0;
  std::vector<std::string> logs;
};

IdentificationReport identify_from_logs(const IdentifyOpts& o) {
  std::map<double, std::vector<ManeuverLog>> groups;
  for (const std::string& path : o.logs) {
    ManeuverLog log = ManeuverLog::read_csv(path);
    groups[log.expansion].push_back(std::move(log));
  }
  std::vector<IdentificationProblem> problems;
  for (auto& [l, group] : groups) {
    IdentificationProblem problem =
        IdentificationProblem::with_default_guess(group);
    problem.seed = derive_seed(o.ctx.seed, problems.size());
    problems.push_back(std::move(problem));
  }
  IdentificationReport report;
  for (const IdentificationProblem& problem : problems) {
    IdentifiedPoint point = identify_at_length(problem);
    report.residual_pre.push_back(point.residual);
    report.points.push_back(std::move(point));
  }
  report.fitted = fit_polynomials(report.points).polynomials;
  for (size_t i = 0; i < problems.size(); ++i) {
    report.residual_post.push_back(velocity_error_cost(
        problems[i], report.fitted.eval(report.points[i].expansion)));
  }
  return report;
}

int cmd_identify(IdentifyOpts& o, const std::vector<std::string>& args) {
  prepare(o.ctx, "identify");
  o.ctx.settle("--lengths", "lengths", o.lengths);
  o.ctx.settle("--noise", "noise", o.noise);
  if (!o.logs.empty()) {
    std::string joined;
    for (size_t i = 0; i < o.logs.size(); ++i) {
      if (i) joined += ",";
      joined += o.logs[i];
    }
    o.ctx.effective["logs"] = joined;
  }

  IdentificationReport report;
  if (!o.logs.empty()) {
    report = identify_from_logs(o);
  } else {
    SweepOptions so;
    so.lengths = o.lengths;
    so.velocity_noise_rel = o.noise;
    so.seed = o.ctx.seed;
    report = identification_sweep(o.ctx.vessel(), so);
  }

  write_identification_report(report, (o.ctx.out / "report.json").string());
  VesselConfig fitted;
  fitted.polynomials = report.fitted;
  vessel_config_to_kv(fitted).write_file(
      (o.ctx.out / "fitted_model.kv").string());

  std::vector<double> ls, pre, post;
  for (size_t i = 0; i < report.points.size(); ++i) {
    ls.push_back(report.points[i].expansion);
    pre.push_back(report.residual_pre[i]);
    post.push_back(report.residual_post[i]);
  }
  SvgPlot plot("identification residuals", "expansion [m]", "weighted cost");
  plot.add_line(ls, pre, "identified", "#2266cc");
  plot.add_line(ls, post, "regressed", "#cc6622");
  plot.write((o.ctx.out / "residuals.svg").string());

  // Domain check: identified points must sit near the regression curve.
  double worst = 0.0;
  bool finite = true;
  for (const IdentifiedPoint& p : report.points) {
    const HydroParams fit = report.fitted.eval(p.expansion);
    const double rel[4] = {
        std::abs(p.params.m1 - fit.m1) / std::max(std::abs(fit.m1), 1e-9),
        std::abs(p.params.m3 - fit.m3) / std::max(std::abs(fit.m3), 1e-9),
        std::abs(p.params.Xu - fit.Xu) / std::max(std::abs(fit.Xu), 1e-9),
        std::abs(p.params.Nr - fit.Nr) / std::max(std::abs(fit.Nr), 1e-9)};
    for (double r : rel) worst = std::max(worst, r);
    if (!std::isfinite(p.residual)) finite = false;
  }
  for (size_t i = 0; i < report.points.size(); ++i) {
    const IdentifiedPoint& p = report.points[i];
    std::printf(
        "identify: l=%.3f m12=%.4f m3=%.4f xuyv=%.4f nr=%.4f residual=%.3g%s\n",
        p.expansion, p.params.m1, p.params.m3, p.params.Xu, p.params.Nr,
        p.residual, p.active_bound ? " [bound]" : "");
  }

  RunManifest m;
  m.arguments = args;
  finish_manifest(m, o.ctx, "identify",
                  {"report.json", "fitted_model.kv", "residuals.svg"});
  if (!finite || worst > 0.5) {
    std::fprintf(stderr,
                 "identification failed: worst relative regression gap %.3f\n",
                 worst);
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// track: closed-loop reference tracking, combinations compared

struct TrackOpts {
  CmdContext ctx;
  std::string shape = "square";
  std::string controller = "both";
  std::string form = "both";
  std::string water = "calm";
  int repetitions = 1;
  double size = 0.0;   // 0 = per-shape default
  double speed = 0.0;  // 0 = per-shape default
  int laps = 1;
};

struct TrackRow {
  std::string controller;
  std::string form;
  TrackingMetrics mean;
};

SimLog run_tracking_once(const VesselConfig& vessel,
                         const ReferenceTrajectory& ref, double expansion,
                         const std::string& controller,
                         const WaveDisturbance& waves) {
  Scenario scenario;
  scenario.vessel = vessel;
  const Vec6 q0 = ref.samples.front().q;
  scenario.initial.pose = Pose(q0[0], q0[1], q0[2]);
  scenario.initial.expansion = expansion;
  scenario.duration = ref.duration();
  scenario.waves = waves;
  scenario.validate();

  if (controller == "nmpc") {
    NmpcConfig nc;
    nc.dt = scenario.control_period();
    NmpcController c(nc, vessel, ref);
    return run_scenario(scenario, c);
  }
  if (controller == "pid") {
    PidController c(vessel, ref, scenario.control_period());
    return run_scenario(scenario, c);
  }
  throw std::invalid_argument("unknown controller: " + controller);
}

int cmd_track(TrackOpts& o, const std::vector<std::string>& args) {
  prepare(o.ctx, "track");
  o.ctx.settle("--shape", "shape", o.shape);
  o.ctx.settle("--controller", "controller", o.controller);
  o.ctx.settle("--form", "form", o.form);
  o.ctx.settle("--water", "water", o.water);
  o.ctx.settle("--repetitions", "repetitions", o.repetitions);
  o.ctx.settle("--size", "size", o.size);
  o.ctx.settle("--speed", "speed", o.speed);
  o.ctx.settle("--laps", "laps", o.laps);
  if (o.repetitions < 1) {
    throw std::invalid_argument("track: repetitions must be at least 1");
  }

  if (o.size <= 0.0) o.size = (o.shape == "circle") ? 1.5 : 3.0;
  if (o.speed <= 0.0) o.speed = (o.shape == "circle") ? 0.2 : 0.25;
  const VesselConfig vessel = o.ctx.vessel();
  const ReferenceTrajectory ref =
      build_reference(o.shape, o.size, o.speed, {0.0, 0.0}, 0.02, o.laps);

  std::vector<std::string> artifacts;
  std::vector<TrackRow> rows;
  SvgPlot plot("tracking paths: " + o.shape, "x [m]", "y [m]");
  {
    std::vector<double> rx, ry;
    for (const RefSample& s : ref.samples) {
      rx.push_back(s.q[0]);
      ry.push_back(s.q[1]);
    }
    plot.add_line(rx, ry, "reference", "#888888");
  }
  const char* colors[] = {"#2266cc", "#cc6622", "#22aa55", "#aa2255"};
  int combo = 0;

  for (const std::string& ctrl :
       expand_both(o.controller, "nmpc", "pid")) {
    for (const std::string& form :
         expand_both(o.form, "contracted", "expanded")) {
      TrackingMetrics sum;
      for (int rep = 0; rep < o.repetitions; ++rep) {
        WaveDisturbance waves = water_preset(
            o.water, derive_seed(o.ctx.seed, 100 * combo + rep));
        const SimLog log =
            run_tracking_once(vessel, ref, form_length(form), ctrl, waves);
        const TrackingMetrics m = tracking_metrics(log, ref);
        sum.mae_position += m.mae_position;
        sum.mae_yaw += m.mae_yaw;
        sum.effort += m.effort;
        const std::string name = "track_" + ctrl + "_" + form + "_r" +
                                 std::to_string(rep) + ".csv";
        log.write_csv((o.ctx.out / name).string());
        artifacts.push_back(name);
        if (rep == 0) {
          std::vector<double> xs, ys;
          for (const SimSample& s : log.samples) {
            xs.push_back(s.state.pose.x);
            ys.push_back(s.state.pose.y);
          }
          plot.add_line(xs, ys, ctrl + "/" + form, colors[combo % 4]);
        }
      }
      TrackRow row;
      row.controller = ctrl;
      row.form = form;
      row.mean.mae_position = sum.mae_position / o.repetitions;
      row.mean.mae_yaw = sum.mae_yaw / o.repetitions;
      row.mean.effort = sum.effort / o.repetitions;
      rows.push_back(row);
      ++combo;
    }
  }

  nlohmann::json j;
  j["shape"] = o.shape;
  j["size"] = o.size;
  j["speed"] = o.speed;
  j["laps"] = o.laps;
  j["water"] = o.water;
  j["repetitions"] = o.repetitions;
  j["rows"] = nlohmann::json::array();
  std::printf("%-6s %-11s %12s %10s %10s\n", "ctrl", "form", "mae_pos[m]",
              "mae_yaw", "effort");
  for (const TrackRow& r : rows) {
    j["rows"].push_back({{"controller", r.controller},
                         {"form", r.form},
                         {"mae_position", r.mean.mae_position},
                         {"mae_yaw", r.mean.mae_yaw},
                         {"effort", r.mean.effort}});
    std::printf("%-6s %-11s %12.4f %10.4f %10.1f\n", r.controller.c_str(),
                r.form.c_str(), r.mean.mae_position, r.mean.mae_yaw,
                r.mean.effort);
  }
  write_file_atomic((o.ctx.out / "metrics.json").string(), j.dump(2) + "\n");
  plot.write((o.ctx.out / "paths.svg").string());
  artifacts.push_back("metrics.json");
  artifacts.push_back("paths.svg");

  RunManifest m;
  m.arguments = args;
  finish_manifest(m, o.ctx, "track", artifacts);
  return 0;
}

// ---------------------------------------------------------------------------
// dock: Monte Carlo docking trials, fanned out to a worker pool

struct DockOpts {
  CmdContext ctx;
  std::string form = "both";
  std::string water = "calm";
  std::string controller = "nmpc";
  int repetitions = 20;
  double timeout = 90.0;
  bool keep_logs = false;
};

struct DockSummary {
  std::string form;
  std::vector<DockTrialResult> trials;
};

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

int cmd_dock(DockOpts& o, const std::vector<std::string>& args) {
  prepare(o.ctx, "dock");
  o.ctx.settle("--form", "form", o.form);
  o.ctx.settle("--water", "water", o.water);
  o.ctx.settle("--controller", "controller", o.controller);
  o.ctx.settle("--repetitions", "repetitions", o.repetitions);
  o.ctx.settle("--timeout", "timeout", o.timeout);
  if (o.repetitions < 0) {
    throw std::invalid_argument("dock: repetitions must be nonnegative");
  }

  const size_t n = static_cast<size_t>(o.repetitions);
  std::vector<std::string> artifacts;
  std::vector<DockSummary> summaries;

  for (const std::string& form :
       expand_both(o.form, "contracted", "expanded")) {
    DockTrialConfig cfg;
    cfg.vessel = o.ctx.vessel();
    cfg.expansion = form_length(form);
    cfg.waves = water_preset(o.water, 0);  // seed set per trial inside
    cfg.seed = o.ctx.seed;
    cfg.controller = o.controller;
    cfg.timeout = o.timeout;

    DockSummary summary;
    summary.form = form;
    summary.trials.resize(n);
    if (n > 0) {
      std::atomic<size_t> next{0};
      const unsigned workers = std::min<size_t>(
          std::max(1u, std::thread::hardware_concurrency()), n);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
          for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            summary.trials[i] = run_dock_trial(cfg, i);
          }
        });
      }
      for (std::thread& t : pool) t.join();
    }
    if (o.keep_logs) {
      for (size_t i = 0; i < n; ++i) {
        const std::string name =
            "dock_" + form + "_trial" + std::to_string(i) + ".csv";
        summary.trials[i].log.write_csv((o.ctx.out / name).string());
        artifacts.push_back(name);
      }
    }
    summaries.push_back(std::move(summary));
  }

  nlohmann::json j;
  j["water"] = o.water;
  j["controller"] = o.controller;
  j["repetitions"] = o.repetitions;
  j["forms"] = nlohmann::json::array();
  SvgPlot plot("time to dock", "form", "seconds");
  double x = 1.0;
  for (const DockSummary& s : summaries) {
    size_t ok = 0;
    std::vector<double> times;
    nlohmann::json trials = nlohmann::json::array();
    for (size_t i = 0; i < s.trials.size(); ++i) {
      const DockTrialResult& r = s.trials[i];
      if (r.success) {
        ++ok;
        times.push_back(r.time_to_dock);
      }
      trials.push_back({{"trial", i},
                        {"success", r.success},
                        {"time_to_dock", r.time_to_dock},
                        {"failure_reason", r.failure_reason}});
    }
    std::sort(times.begin(), times.end());
    nlohmann::json entry;
    entry["form"] = s.form;
    entry["trials"] = trials;
    entry["successes"] = ok;
    if (!s.trials.empty()) {
      entry["success_rate"] = static_cast<double>(ok) / s.trials.size();
    } else {
      entry["success_rate"] = nullptr;
    }
    if (!times.empty()) {
      entry["time_to_dock"] = {{"min", times.front()},
                               {"q1", quantile(times, 0.25)},
                               {"median", quantile(times, 0.5)},
                               {"q3", quantile(times, 0.75)},
                               {"max", times.back()},
                               {"mean",
                                std::accumulate(times.begin(), times.end(),
                                                0.0) /
                                    times.size()}};
      plot.add_box(x, 0.5, times.front(), quantile(times, 0.25),
                   quantile(times, 0.5), quantile(times, 0.75), times.back(),
                   "#2266cc");
      std::vector<double> xs(times.size(), x + 0.45);
      plot.add_scatter(xs, times, s.form, "#cc6622");
    }
    j["forms"].push_back(entry);
    std::printf("dock %-11s: %zu/%zu captured", s.form.c_str(), ok,
                s.trials.size());
    if (!times.empty()) {
      std::printf(", median %.1f s", quantile(times, 0.5));
    }
    std::printf("\n");
    x += 1.0;
  }
  write_file_atomic((o.ctx.out / "report.json").string(), j.dump(2) + "\n");
  plot.write((o.ctx.out / "times.svg").string());
  artifacts.push_back("report.json");
  artifacts.push_back("times.svg");

  RunManifest m;
  m.arguments = args;
  finish_manifest(m, o.ctx, "dock", artifacts);
  return 0;
}

// ---------------------------------------------------------------------------
// bridge: the block-by-block construction mission

struct BridgeOpts {
  CmdContext ctx;
  int blocks = 6;
  std::string water = "calm";
  std::string controller = "nmpc";
  double duration = 1800.0;
  int retry_cap = 5;
};

int cmd_bridge(BridgeOpts& o, const std::vector<std::string>& args) {
  prepare(o.ctx, "bridge");
  o.ctx.settle("--blocks", "blocks", o.blocks);
  o.ctx.settle("--water", "water", o.water);
  o.ctx.settle("--controller", "controller", o.controller);
  o.ctx.settle("--duration", "duration", o.duration);
  o.ctx.settle("--retry-cap", "retry_cap", o.retry_cap);

  // Plan geometry comes from the config file (bridge.* keys, degrees for
  // angles); the stock bridge is the default.
  double start_x = 2.5, start_y = 1.5, heading_deg = 90.0, block_width = 0.4;
  double pickup_x = 1.5, pickup_y = 0.0, pickup_psi_deg = 0.0;
  o.ctx.file_only("bridge.start_x", start_x);
  o.ctx.file_only("bridge.start_y", start_y);
  o.ctx.file_only("bridge.heading_deg", heading_deg);
  o.ctx.file_only("bridge.block_width", block_width);
  o.ctx.file_only("bridge.pickup_x", pickup_x);
  o.ctx.file_only("bridge.pickup_y", pickup_y);
  o.ctx.file_only("bridge.pickup_psi_deg", pickup_psi_deg);

  MissionConfig cfg;
  cfg.plan = plan_bridge({start_x, start_y}, deg2rad(heading_deg), o.blocks,
                         block_width,
                         Pose(pickup_x, pickup_y, deg2rad(pickup_psi_deg)));
  cfg.controller = o.controller;
  cfg.retry_cap = o.retry_cap;

  Scenario base;
  base.vessel = o.ctx.vessel();
  base.duration = o.duration;
  base.waves = water_preset(o.water, derive_seed(o.ctx.seed, 0xb21d));

  const MissionResult res = run_mission(cfg, base);
  write_mission_summary(res.summary, (o.ctx.out / "summary.json").string());
  res.log.write_csv((o.ctx.out / "mission.csv").string());
  res.log.write_events_json((o.ctx.out / "events.json").string());

  {
    // Animation frames at the control rate: enough for a smooth replay
    // without the full log volume.
    std::string frames = "t,x,y,psi,l\n";
    for (size_t i = 0; i < res.log.samples.size(); i += 5) {
      const SimSample& s = res.log.samples[i];
      frames += fmt_double(s.t) + "," + fmt_double(s.state.pose.x) + "," +
                fmt_double(s.state.pose.y) + "," +
                fmt_double(s.state.pose.psi) + "," +
                fmt_double(s.state.expansion) + "\n";
    }
    write_file_atomic((o.ctx.out / "frames.csv").string(), frames);
  }

  SvgPlot plot("bridge mission path", "x [m]", "y [m]");
  {
    std::vector<double> xs, ys;
    for (const SimSample& s : res.log.samples) {
      xs.push_back(s.state.pose.x);
      ys.push_back(s.state.pose.y);
    }
    plot.add_line(xs, ys, "boat", "#2266cc");
    std::vector<double> px{cfg.plan.pickup.x}, py{cfg.plan.pickup.y};
    for (const Pose& t : cfg.plan.targets) {
      px.push_back(t.x);
      py.push_back(t.y);
    }
    plot.add_scatter(px, py, "ports", "#cc2222");
  }
  plot.write((o.ctx.out / "path.svg").string());

  std::printf("bridge: %s, %d/%d blocks, %d+%d retries, %.1f s%s%s\n",
              res.summary.success ? "success" : "ABORTED",
              res.summary.blocks_placed, o.blocks,
              res.summary.pickup_retries, res.summary.assembly_retries,
              res.summary.total_time,
              res.summary.abort_phase.empty() ? "" : " in ",
              res.summary.abort_phase.c_str());

  RunManifest m;
  m.arguments = args;
  finish_manifest(
      m, o.ctx, "bridge",
      {"summary.json", "mission.csv", "events.json", "frames.csv", "path.svg"});
  return res.summary.success ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"usvbench: transformable-vessel simulation workbench"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "open-loop maneuver run");
  add_common(c_sim, sim.ctx);
  c_sim->add_option("--maneuver", sim.maneuver, "straight|circle|spin");
  c_sim->add_option("--length", sim.length, "expansion length [m]");
  c_sim->add_option("--duration", sim.duration, "run time [s]");
  c_sim->add_option("--dt", sim.dt, "sample step [s]");
  c_sim->add_option("--noise", sim.noise, "relative velocity noise");

  IdentifyOpts ident;
  CLI::App* c_ident =
      app.add_subcommand("identify", "parameter identification sweep");
  add_common(c_ident, ident.ctx);
  c_ident->add_option("--lengths", ident.lengths, "expansion lengths [m]")
      ->delimiter(',');
  c_ident->add_option("--noise", ident.noise, "relative velocity noise");
  c_ident->add_option("--logs", ident.logs, "imported maneuver CSV files")
      ->delimiter(',');

  TrackOpts track;
  CLI::App* c_track =
      app.add_subcommand("track", "closed-loop trajectory tracking");
  add_common(c_track, track.ctx);
  c_track->add_option("--shape", track.shape, "circle|square|hourglass")
      ->check(CLI::IsMember({"circle", "square", "hourglass"}));
  c_track->add_option("--controller", track.controller, "nmpc|pid|both")
      ->check(CLI::IsMember({"nmpc", "pid", "both"}));
  c_track->add_option("--form", track.form, "contracted|expanded|both")
      ->check(CLI::IsMember({"contracted", "expanded", "both"}));
  c_track->add_option("--water", track.water, "calm|turbulent")
      ->check(CLI::IsMember({"calm", "turbulent"}));
  c_track->add_option("--repetitions", track.repetitions, "trials per combo");
  c_track->add_option("--size", track.size, "shape size [m] (0 = default)");
  c_track->add_option("--speed", track.speed, "speed [m/s] (0 = default)");
  c_track->add_option("--laps", track.laps, "laps");

  DockOpts dock;
  CLI::App* c_dock = app.add_subcommand("dock", "Monte Carlo docking trials");
  add_common(c_dock, dock.ctx);
  c_dock->add_option("--form", dock.form, "contracted|expanded|both")
      ->check(CLI::IsMember({"contracted", "expanded", "both"}));
  c_dock->add_option("--water", dock.water, "calm|turbulent")
      ->check(CLI::IsMember({"calm", "turbulent"}));
  c_dock->add_option("--controller", dock.controller, "nmpc|pid")
      ->check(CLI::IsMember({"nmpc", "pid"}));
  c_dock->add_option("--repetitions", dock.repetitions, "trial count");
  c_dock->add_option("--timeout", dock.timeout, "per-trial budget [s]");
  c_dock->add_flag("--keep-logs", dock.keep_logs, "write per-trial CSV logs");

  BridgeOpts bridge;
  CLI::App* c_bridge =
      app.add_subcommand("bridge", "block-by-block bridge mission");
  add_common(c_bridge, bridge.ctx);
  c_bridge->add_option("--blocks", bridge.blocks, "blocks to place");
  c_bridge->add_option("--water", bridge.water, "calm|turbulent")
      ->check(CLI::IsMember({"calm", "turbulent"}));
  c_bridge->add_option("--controller", bridge.controller, "nmpc|pid")
      ->check(CLI::IsMember({"nmpc", "pid"}));
  c_bridge->add_option("--duration", bridge.duration, "time budget [s]");
  c_bridge->add_option("--retry-cap", bridge.retry_cap, "docking retries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::vector<std::string> args = raw_args(argc, argv);
  try {
    if (c_sim->parsed()) return cmd_simulate(sim, args);
    if (c_ident->parsed()) return cmd_identify(ident, args);
    if (c_track->parsed()) return cmd_track(track, args);
    if (c_dock->parsed()) return cmd_dock(dock, args);
    if (c_bridge->parsed()) return cmd_bridge(bridge, args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "usvbench: %s\n", e.what());
    return 2;
  }
  return 2;
}
