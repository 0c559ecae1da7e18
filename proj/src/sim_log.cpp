#include "usv/sim_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace usv {

namespace {

constexpr const char* kHeader =
    "t,x,y,psi,u,v,r,f1,f2,f3,f4,Fx,Fy,Mz,dx,dy,dm,l";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool SimLog::has_event(const std::string& kind) const {
  for (const SimEvent& e : events) {
    if (e.kind == kind) return true;
  }
  return false;
}

std::vector<const SimEvent*> SimLog::events_of(const std::string& kind) const {
  std::vector<const SimEvent*> out;
  for (const SimEvent& e : events) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

void SimLog::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << kHeader << "\n";
  for (const SimSample& s : samples) {
    f << fmt(s.t) << ',' << fmt(s.state.pose.x) << ',' << fmt(s.state.pose.y)
      << ',' << fmt(s.state.pose.psi) << ',' << fmt(s.state.vel.u) << ','
      << fmt(s.state.vel.v) << ',' << fmt(s.state.vel.r);
    for (int i = 0; i < 4; ++i) f << ',' << fmt(s.command[i]);
    for (int i = 0; i < 3; ++i) f << ',' << fmt(s.applied[i]);
    for (int i = 0; i < 3; ++i) f << ',' << fmt(s.disturbance[i]);
    f << ',' << fmt(s.state.expansion) << "\n";
  }
}

void SimLog::write_events_json(const std::string& path) const {
  nlohmann::json j;
  j["dt"] = dt;
  j["samples"] = samples.size();
  j["meta"] = meta;
  j["events"] = nlohmann::json::array();
  for (const SimEvent& e : events) {
    j["events"].push_back({{"t", e.t}, {"kind", e.kind}, {"detail", e.detail}});
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

SimLog SimLog::read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line) || line != kHeader) {
    throw std::runtime_error(path + ": unexpected header");
  }
  SimLog log;
  size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v[18];
    std::string cell;
    for (int i = 0; i < 18; ++i) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected 18 columns");
      }
      v[i] = std::stod(cell);
    }
    SimSample s;
    s.t = v[0];
    s.state.pose = Pose(v[1], v[2], v[3]);
    s.state.vel = BodyVelocity{v[4], v[5], v[6]};
    s.command << v[7], v[8], v[9], v[10];
    s.applied << v[11], v[12], v[13];
    s.disturbance << v[14], v[15], v[16];
    s.state.expansion = v[17];
    log.samples.push_back(s);
  }
  if (log.samples.size() >= 2) {
    log.dt = log.samples[1].t - log.samples[0].t;
  }
  return log;
}

}  // namespace usv
