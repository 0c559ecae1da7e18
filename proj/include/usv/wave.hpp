#pragma once

#include <array>
#include <cstdint>

#include "usv/types.hpp"

namespace usv {

/// Wave action reduced to an additive generalized force in the body frame.
/// The main component is a sinusoid at the configured frequency applied on
/// Fx and Fy with independent phases; a band-limited noise component rides
/// on top. Everything is a pure function of time once seeded.
struct WaveDisturbance {
  double frequency = 1.5;        // Hz
  double force_amplitude = 0.0;  // N, on Fx and Fy
  double moment_amplitude = 0.0; // N m
  double noise_std = 0.0;        // N, band-limited component
  uint64_t seed = 0;

  bool quiet() const {
    return force_amplitude == 0.0 && moment_amplitude == 0.0 &&
           noise_std == 0.0;
  }
};

/// Realized wave field. The noise band is a fixed sum of seeded sinusoids
/// (frequencies in [0.3, 3] Hz), which keeps force(t) deterministic and
/// free of integration-step coupling.
class WaveField {
 public:
  static constexpr int kNoiseComponents = 8;

  explicit WaveField(const WaveDisturbance& cfg);

  /// Generalized body force [Fx, Fy, Mz] at time t.
  Vec3 force(double t) const;

  const WaveDisturbance& config() const { return cfg_; }

 private:
  struct Component {
    double omega;
    double phase;
    double amplitude;
  };

  WaveDisturbance cfg_;
  std::array<double, 3> main_phase_{};
  std::array<std::array<Component, kNoiseComponents>, 3> noise_{};
};

/// One-shot evaluation; builds the field from the seed each call.
Vec3 wave_force(const WaveDisturbance& cfg, double t);

/// Shipped water presets. Calm is perfectly quiet. Turbulent is sized so
/// docking in the contracted form succeeds most but not all of the time,
/// which keeps the form comparison informative.
WaveDisturbance calm_water();
WaveDisturbance turbulent_water(uint64_t seed = 0);

}  // namespace usv
