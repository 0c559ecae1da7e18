#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usv/least_squares.hpp"
#include "usv/maneuver.hpp"
#include "usv/types.hpp"

namespace usv {

/// Identification problem at one expansion length. Symmetry ties the
/// parameter vector down to four values: {m12, m3, XuYv, Nr}.
struct IdentificationProblem {
  std::vector<ManeuverLog> logs;
  Vec3 weight{1.0, 1.0, 0.25};  // diagonal of W on (u, v, r) errors
  Vec4 guess;
  Vec4 lower;
  Vec4 upper;
  int multistarts = 5;
  double jitter = 0.3;  // relative spread of multistart perturbations
  uint64_t seed = 0;

  /// Rigid-body initial guess with [0.2x, 5x] bounds. The mass guess is
  /// the hull mass; yaw inertia is the rigid plate estimate; the yaw drag
  /// guess scales the linear drag guess by the squared thruster arm so
  /// the bounds bracket plausible values.
  static IdentificationProblem with_default_guess(
      std::vector<ManeuverLog> logs, double hull_mass = 42.0,
      double hull_length = 1.2, double hull_width = 0.8,
      double drag_guess = 15.0, double arm = 0.4435);

  void validate() const;
};

HydroParams params_from_reduced(const Vec4& x);
Vec4 reduced_from_params(const HydroParams& p);

/// Replays the log's thrust sequence (zero-order hold) through the model
/// under candidate parameters; returns the body-velocity sequence.
/// Returns false when the rollout leaves the finite envelope.
bool simulate_candidate(const ManeuverLog& log, const HydroParams& candidate,
                        std::vector<Vec3>& velocities);

/// Sum over logs and samples of e' W e with e = logged minus simulated
/// velocity. Divergence yields +infinity.
double velocity_error_cost(const IdentificationProblem& problem,
                           const HydroParams& candidate);

struct IdentifiedPoint {
  double expansion = 0.0;
  HydroParams params;
  double residual = 0.0;  // final weighted cost
  bool active_bound = false;
  int iterations = 0;
  int best_start = 0;
};

/// Bounded trust-region minimization over the reduced vector with seeded
/// multistarts; deterministic for a fixed problem.
IdentifiedPoint identify_at_length(const IdentificationProblem& problem);

struct PolynomialFit {
  ParamPolynomials polynomials;
  /// Largest relative change across the sweep between identified values
  /// and the regression evaluated at the same lengths, per family.
  double worst_rel_change = 0.0;
};

/// Least-squares quadratic per parameter family; needs >= 3 distinct
/// lengths. Throws std::invalid_argument otherwise.
PolynomialFit fit_polynomials(const std::vector<IdentifiedPoint>& points);

struct IdentificationReport {
  std::vector<IdentifiedPoint> points;
  ParamPolynomials fitted;
  std::vector<double> residual_pre;   // per length, before regression
  std::vector<double> residual_post;  // per length, with fitted parameters
};

struct SweepOptions {
  std::vector<double> lengths{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  ManeuverOptions maneuver;
  double velocity_noise_rel = 0.0;
  uint64_t seed = 0;
};

/// Full pipeline: generate logs from the truth model at each length,
/// identify, then regress.
IdentificationReport identification_sweep(const VesselConfig& truth,
                                          const SweepOptions& options);

void write_identification_report(const IdentificationReport& report,
                                 const std::string& path);

}  // namespace usv
