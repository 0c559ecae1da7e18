#include "usv/vessel_config.hpp"

#include <stdexcept>

#include "usv/angles.hpp"

namespace usv {

void VesselConfig::validate() const {
  if (!(f_max > 0.0)) {
    throw std::invalid_argument("thrust.f_max: must be positive");
  }
  if (!(arm_offset > 0.0)) {
    throw std::invalid_argument("thrust.arm_offset: must be positive");
  }
  // Polynomials must yield a valid parameter set across the whole
  // expansion range; probe the ends and the midpoint.
  for (double l : {0.0, 0.5 * kMaxExpansion, kMaxExpansion}) {
    polynomials.eval(l).validate();
  }
}

namespace {

Quadratic quad_from_kv(const Kv& doc, const std::string& prefix,
                       const Quadratic& fallback) {
  Quadratic q;
  q.c2 = doc.get_double(prefix + ".c2", fallback.c2);
  q.c1 = doc.get_double(prefix + ".c1", fallback.c1);
  q.c0 = doc.get_double(prefix + ".c0", fallback.c0);
  return q;
}

void quad_to_kv(Kv& doc, const std::string& prefix, const Quadratic& q) {
  doc.set_double(prefix + ".c2", q.c2);
  doc.set_double(prefix + ".c1", q.c1);
  doc.set_double(prefix + ".c0", q.c0);
}

}  // namespace

VesselConfig vessel_config_from_kv(const Kv& doc) {
  VesselConfig cfg;
  cfg.polynomials.m12 = quad_from_kv(doc, "model.m12", cfg.polynomials.m12);
  cfg.polynomials.m3 = quad_from_kv(doc, "model.m3", cfg.polynomials.m3);
  cfg.polynomials.xuyv = quad_from_kv(doc, "model.xuyv", cfg.polynomials.xuyv);
  cfg.polynomials.nr = quad_from_kv(doc, "model.nr", cfg.polynomials.nr);

  const MechanismGeometry def = MechanismGeometry::standard();
  const double l1 = doc.get_double("mechanism.l1", def.l1);
  const double l2 = doc.get_double("mechanism.l2", def.l2);
  const double l3 = doc.get_double("mechanism.l3", def.l3);
  const double l4 = doc.get_double("mechanism.l4", def.l4);
  const double y_p0 = doc.get_double("mechanism.y_p0", def.y_p0);
  const double y_p4 = doc.get_double("mechanism.y_p4", def.y_p4);
  const double tmin =
      doc.get_double("mechanism.theta_min_deg", rad2deg(def.theta_min));
  const double tmax =
      doc.get_double("mechanism.theta_max_deg", rad2deg(def.theta_max));
  try {
    cfg.geometry = MechanismGeometry::make(l1, l2, l3, l4, y_p0, y_p4,
                                           deg2rad(tmin), deg2rad(tmax));
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("mechanism: ") + e.what());
  }

  cfg.f_max = doc.get_double("thrust.f_max", cfg.f_max);
  cfg.arm_offset = doc.get_double("thrust.arm_offset", cfg.arm_offset);
  cfg.validate();
  return cfg;
}

VesselConfig load_vessel_config(const std::string& path) {
  return vessel_config_from_kv(Kv::parse_file(path));
}

Kv vessel_config_to_kv(const VesselConfig& cfg) {
  Kv doc;
  quad_to_kv(doc, "model.m12", cfg.polynomials.m12);
  quad_to_kv(doc, "model.m3", cfg.polynomials.m3);
  quad_to_kv(doc, "model.xuyv", cfg.polynomials.xuyv);
  quad_to_kv(doc, "model.nr", cfg.polynomials.nr);
  doc.set_double("mechanism.l1", cfg.geometry.l1);
  doc.set_double("mechanism.l2", cfg.geometry.l2);
  doc.set_double("mechanism.l3", cfg.geometry.l3);
  doc.set_double("mechanism.l4", cfg.geometry.l4);
  doc.set_double("mechanism.y_p0", cfg.geometry.y_p0);
  doc.set_double("mechanism.y_p4", cfg.geometry.y_p4);
  doc.set_double("mechanism.theta_min_deg", rad2deg(cfg.geometry.theta_min));
  doc.set_double("mechanism.theta_max_deg", rad2deg(cfg.geometry.theta_max));
  doc.set_double("thrust.f_max", cfg.f_max);
  doc.set_double("thrust.arm_offset", cfg.arm_offset);
  return doc;
}

}  // namespace usv
