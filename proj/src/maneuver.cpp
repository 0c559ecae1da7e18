#include "usv/maneuver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "usv/rng.hpp"
#include "usv/simulator.hpp"

namespace usv {

const char* maneuver_kind_name(ManeuverKind kind) {
  switch (kind) {
    case ManeuverKind::straight: return "straight";
    case ManeuverKind::circle: return "circle";
    case ManeuverKind::spin: return "spin";
  }
  return "unknown";
}

ManeuverKind maneuver_kind_from_name(const std::string& name) {
  if (name == "straight") return ManeuverKind::straight;
  if (name == "circle") return ManeuverKind::circle;
  if (name == "spin") return ManeuverKind::spin;
  throw std::invalid_argument("unknown maneuver kind: " + name);
}

Vec4 maneuver_command(ManeuverKind kind, double t, const ManeuverOptions& opt) {
  const bool late = opt.step_change && t >= 0.5 * opt.duration;
  Vec4 u = Vec4::Zero();
  switch (kind) {
    case ManeuverKind::straight: {
      const double f = late ? 2.0 : 4.0;
      u << 0.0, f, 0.0, f;
      break;
    }
    case ManeuverKind::circle: {
      const double hi = late ? 3.5 : 5.0;
      const double lo = late ? 1.0 : 2.0;
      u << 0.0, hi, 0.0, lo;
      break;
    }
    case ManeuverKind::spin: {
      const double f = late ? 1.5 : 3.0;
      u << -f, -f, f, f;
      break;
    }
  }
  return u;
}

ManeuverLog generate_maneuver_log(const VesselConfig& truth, ManeuverKind kind,
                                  double expansion, const ManeuverOptions& opt,
                                  uint64_t seed) {
  if (!(expansion >= 0.0 && expansion <= kMaxExpansion)) {
    throw std::out_of_range("maneuver expansion outside [0, 0.5]");
  }
  Scenario sc;
  sc.vessel = truth;
  sc.initial = VesselState{};
  sc.initial.expansion = expansion;
  sc.duration = opt.duration;
  sc.dt = opt.dt;
  sc.control_divisor = 1;

  ThrustProgram program(
      [kind, &opt](double t) { return maneuver_command(kind, t, opt); });
  SimLog sim = run_scenario(sc, program);

  ManeuverLog log;
  log.kind = kind;
  log.expansion = expansion;
  log.dt = opt.dt;
  log.samples.reserve(sim.samples.size());
  for (const SimSample& s : sim.samples) {
    log.samples.push_back(ManeuverSample{s.t, s.state, s.command});
  }

  if (opt.velocity_noise_rel > 0.0) {
    double rms[3] = {0.0, 0.0, 0.0};
    for (const ManeuverSample& s : log.samples) {
      rms[0] += s.state.vel.u * s.state.vel.u;
      rms[1] += s.state.vel.v * s.state.vel.v;
      rms[2] += s.state.vel.r * s.state.vel.r;
    }
    const double n = static_cast<double>(log.samples.size());
    for (double& v : rms) v = std::sqrt(v / n);
    Rng rng(derive_seed(seed, 0x6d616e65ULL + static_cast<uint64_t>(kind)));
    for (ManeuverSample& s : log.samples) {
      s.state.vel.u += opt.velocity_noise_rel * rms[0] * rng.normal();
      s.state.vel.v += opt.velocity_noise_rel * rms[1] * rng.normal();
      s.state.vel.r += opt.velocity_noise_rel * rms[2] * rng.normal();
    }
  }
  return log;
}

std::vector<ManeuverLog> generate_maneuver_logs(const VesselConfig& truth,
                                                double expansion,
                                                const ManeuverOptions& opt,
                                                uint64_t seed) {
  std::vector<ManeuverLog> logs;
  for (ManeuverKind kind :
       {ManeuverKind::straight, ManeuverKind::circle, ManeuverKind::spin}) {
    logs.push_back(generate_maneuver_log(truth, kind, expansion, opt, seed));
  }
  return logs;
}

namespace {

constexpr const char* kHeader = "t,x,y,psi,u,v,r,f1,f2,f3,f4,l";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ManeuverLog::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "# kind = " << maneuver_kind_name(kind) << "\n";
  f << kHeader << "\n";
  for (const ManeuverSample& s : samples) {
    f << fmt(s.t) << ',' << fmt(s.state.pose.x) << ',' << fmt(s.state.pose.y)
      << ',' << fmt(s.state.pose.psi) << ',' << fmt(s.state.vel.u) << ','
      << fmt(s.state.vel.v) << ',' << fmt(s.state.vel.r);
    for (int i = 0; i < 4; ++i) f << ',' << fmt(s.u[i]);
    f << ',' << fmt(s.state.expansion) << "\n";
  }
}

ManeuverLog ManeuverLog::read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  ManeuverLog log;
  std::string line;
  bool header_seen = false;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# kind = ", 0) == 0) {
      log.kind = maneuver_kind_from_name(line.substr(9));
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw std::runtime_error(path + ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    double v[12];
    std::string cell;
    for (int i = 0; i < 12; ++i) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected 12 columns");
      }
      v[i] = std::stod(cell);
    }
    ManeuverSample s;
    s.t = v[0];
    s.state.pose = Pose(v[1], v[2], v[3]);
    s.state.vel = BodyVelocity{v[4], v[5], v[6]};
    s.u << v[7], v[8], v[9], v[10];
    s.state.expansion = v[11];
    log.samples.push_back(s);
  }
  if (log.samples.empty()) throw std::runtime_error(path + ": no samples");
  log.expansion = log.samples.front().state.expansion;
  log.dt = log.samples.size() >= 2 ? log.samples[1].t - log.samples[0].t : 0.0;
  return log;
}

}  // namespace usv
