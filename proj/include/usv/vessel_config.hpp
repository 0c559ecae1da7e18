#pragma once

#include <string>

#include "usv/kv.hpp"
#include "usv/mechanism.hpp"
#include "usv/types.hpp"

namespace usv {

/// Everything needed to instantiate the vessel model. Defaults reproduce
/// the stock identified vehicle; a kv file overrides individual entries.
struct VesselConfig {
  ParamPolynomials polynomials;
  MechanismGeometry geometry = MechanismGeometry::standard();
  double f_max = 6.0;
  double arm_offset = 0.4435;

  /// Throws std::invalid_argument naming the first violated requirement.
  void validate() const;

  double thruster_arm(double expansion) const {
    return expansion + arm_offset;
  }
  HydroParams params_at(double expansion) const {
    return polynomials.eval(expansion);
  }
};

/// Reads overrides from a kv document. Recognized keys:
///   model.m12.c2 .c1 .c0, model.m3.*, model.xuyv.*, model.nr.*
///   mechanism.l1 .l2 .l3 .l4 .y_p0 .y_p4 .theta_min_deg .theta_max_deg
///   thrust.f_max, thrust.arm_offset
/// Missing keys keep their defaults. Errors carry the key path.
VesselConfig vessel_config_from_kv(const Kv& doc);

VesselConfig load_vessel_config(const std::string& path);

/// Canonical kv dump of every recognized key.
Kv vessel_config_to_kv(const VesselConfig& cfg);

}  // namespace usv
