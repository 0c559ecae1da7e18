#include "usv/wave.hpp"

#include <cmath>

#include "usv/angles.hpp"
#include "usv/rng.hpp"

namespace usv {

WaveField::WaveField(const WaveDisturbance& cfg) : cfg_(cfg) {
  Rng rng(derive_seed(cfg.seed, 0x77617665ULL));
  for (int axis = 0; axis < 3; ++axis) {
    main_phase_[axis] = rng.uniform(0.0, 2.0 * kPi);
  }
  // Equal-power split across the noise band keeps the summed variance at
  // noise_std^2 per axis.
  const double amp = cfg.noise_std * std::sqrt(2.0 / kNoiseComponents);
  for (int axis = 0; axis < 3; ++axis) {
    for (int i = 0; i < kNoiseComponents; ++i) {
      Component& c = noise_[axis][i];
      c.omega = 2.0 * kPi * rng.uniform(0.3, 3.0);
      c.phase = rng.uniform(0.0, 2.0 * kPi);
      c.amplitude = amp;
    }
  }
}

Vec3 WaveField::force(double t) const {
  const double w = 2.0 * kPi * cfg_.frequency;
  Vec3 f;
  f[0] = cfg_.force_amplitude * std::sin(w * t + main_phase_[0]);
  f[1] = cfg_.force_amplitude * std::sin(w * t + main_phase_[1]);
  f[2] = cfg_.moment_amplitude * std::sin(w * t + main_phase_[2]);
  if (cfg_.noise_std != 0.0) {
    for (int axis = 0; axis < 3; ++axis) {
      double n = 0.0;
      for (const Component& c : noise_[axis]) {
        n += c.amplitude * std::sin(c.omega * t + c.phase);
      }
      f[axis] += n;
    }
  }
  return f;
}

Vec3 wave_force(const WaveDisturbance& cfg, double t) {
  return WaveField(cfg).force(t);
}

WaveDisturbance calm_water() { return WaveDisturbance{}; }

WaveDisturbance turbulent_water(uint64_t seed) {
  WaveDisturbance w;
  w.frequency = 1.5;
  w.force_amplitude = 14.0;
  w.moment_amplitude = 4.0;
  w.noise_std = 12.0;
  w.seed = seed;
  return w;
}

}  // namespace usv
