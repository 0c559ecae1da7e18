#include "usv/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "usv/dynamics.hpp"
#include "usv/propulsion.hpp"
#include "usv/rng.hpp"

namespace usv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kVelocityEnvelope = 1e3;  // rollout divergence guard
}  // namespace

IdentificationProblem IdentificationProblem::with_default_guess(
    std::vector<ManeuverLog> logs, double hull_mass, double hull_length,
    double hull_width, double drag_guess, double arm) {
  IdentificationProblem p;
  p.logs = std::move(logs);
  const double yaw_inertia =
      hull_mass * (hull_length * hull_length + hull_width * hull_width) / 12.0;
  p.guess << hull_mass, yaw_inertia, drag_guess, drag_guess * arm * arm;
  p.lower = 0.2 * p.guess;
  p.upper = 5.0 * p.guess;
  return p;
}

void IdentificationProblem::validate() const {
  if (logs.empty()) throw std::invalid_argument("identification: no logs");
  for (const ManeuverLog& log : logs) {
    if (log.samples.size() < 2) {
      throw std::invalid_argument("identification: log too short");
    }
    if (!(log.dt > 0.0)) {
      throw std::invalid_argument("identification: log dt must be positive");
    }
    if (log.expansion != logs.front().expansion) {
      throw std::invalid_argument(
          "identification: all logs must share one expansion length");
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!(weight[i] > 0.0)) {
      throw std::invalid_argument("identification: weight must be positive");
    }
  }
  for (int i = 0; i < 4; ++i) {
    if (!(0.0 < lower[i] && lower[i] <= guess[i] && guess[i] <= upper[i])) {
      throw std::invalid_argument(
          "identification: bounds must satisfy 0 < lower <= guess <= upper");
    }
  }
}

HydroParams params_from_reduced(const Vec4& x) {
  return HydroParams::symmetric(x[0], x[1], x[2], x[3]);
}

Vec4 reduced_from_params(const HydroParams& p) {
  return Vec4(p.m1, p.m3, p.Xu, p.Nr);
}

bool simulate_candidate(const ManeuverLog& log, const HydroParams& candidate,
                        std::vector<Vec3>& velocities) {
  velocities.clear();
  velocities.reserve(log.samples.size());
  VesselState s = log.samples.front().state;
  const double arm = thruster_arm(log.expansion);
  for (size_t k = 0; k < log.samples.size(); ++k) {
    velocities.push_back(s.vel.vec());
    if (k + 1 == log.samples.size()) break;
    const Vec3 force = allocation(log.samples[k].u, arm);
    try {
      s = integrate_rk4(s, candidate, force, log.dt);
    } catch (const std::domain_error&) {
      return false;
    }
    if (!s.vel.finite() || s.vel.vec().cwiseAbs().maxCoeff() > kVelocityEnvelope) {
      return false;
    }
  }
  return true;
}

double velocity_error_cost(const IdentificationProblem& problem,
                           const HydroParams& candidate) {
  double cost = 0.0;
  std::vector<Vec3> sim;
  for (const ManeuverLog& log : problem.logs) {
    if (!simulate_candidate(log, candidate, sim)) return kInf;
    for (size_t k = 0; k < log.samples.size(); ++k) {
      const Vec3 e = log.samples[k].state.vel.vec() - sim[k];
      cost += problem.weight.dot(e.cwiseProduct(e));
    }
  }
  return cost;
}

namespace {

/// Stacked weighted residual across all logs; false on divergence.
bool stacked_residual(const IdentificationProblem& problem,
                      const Vec4& reduced, Eigen::VectorXd& r) {
  size_t total = 0;
  for (const ManeuverLog& log : problem.logs) total += log.samples.size();
  r.resize(static_cast<Eigen::Index>(3 * total));

  const HydroParams candidate = params_from_reduced(reduced);
  const Vec3 sqrt_w = problem.weight.cwiseSqrt();
  std::vector<Vec3> sim;
  Eigen::Index row = 0;
  for (const ManeuverLog& log : problem.logs) {
    if (!simulate_candidate(log, candidate, sim)) return false;
    for (size_t k = 0; k < log.samples.size(); ++k) {
      const Vec3 e = log.samples[k].state.vel.vec() - sim[k];
      r.segment<3>(row) = sqrt_w.cwiseProduct(e);
      row += 3;
    }
  }
  return true;
}

}  // namespace

IdentifiedPoint identify_at_length(const IdentificationProblem& problem) {
  problem.validate();

  BoundedLsqProblem lsq;
  lsq.lower = problem.lower;
  lsq.upper = problem.upper;
  lsq.residual = [&problem](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    return stacked_residual(problem, Vec4(x), r);
  };

  IdentifiedPoint best;
  best.expansion = problem.logs.front().expansion;
  best.residual = kInf;

  bool any = false;
  for (int start = 0; start < problem.multistarts; ++start) {
    Vec4 x0 = problem.guess;
    if (start > 0) {
      Rng rng(derive_seed(problem.seed, static_cast<uint64_t>(start)));
      for (int i = 0; i < 4; ++i) {
        x0[i] *= 1.0 + problem.jitter * rng.uniform(-1.0, 1.0);
        x0[i] = std::clamp(x0[i], problem.lower[i], problem.upper[i]);
      }
    }
    const BoundedLsqResult res = minimize_bounded_lsq(lsq, x0);
    if (std::isfinite(res.cost) && res.cost < best.residual) {
      best.params = params_from_reduced(Vec4(res.x));
      best.residual = res.cost;
      best.active_bound = res.active_bound;
      best.iterations = res.iterations;
      best.best_start = start;
      any = true;
    }
    if (any && best.residual < 1e-12) break;  // noise-free perfection
  }
  if (!any) {
    throw std::runtime_error(
        "identification failed: every start diverged at expansion " +
        std::to_string(best.expansion));
  }
  return best;
}

PolynomialFit fit_polynomials(const std::vector<IdentifiedPoint>& points) {
  std::set<double> distinct;
  for (const IdentifiedPoint& p : points) distinct.insert(p.expansion);
  if (distinct.size() < 3) {
    throw std::invalid_argument(
        "fit_polynomials: need at least 3 distinct expansion lengths");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd vander(n, 3);
  Eigen::MatrixXd values(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = points[i].expansion;
    vander(i, 0) = l * l;
    vander(i, 1) = l;
    vander(i, 2) = 1.0;
    values.row(i) = reduced_from_params(points[i].params).transpose();
  }
  const Eigen::MatrixXd coef = vander.colPivHouseholderQr().solve(values);

  PolynomialFit fit;
  auto quad = [&coef](int col) {
    return Quadratic{coef(0, col), coef(1, col), coef(2, col)};
  };
  fit.polynomials.m12 = quad(0);
  fit.polynomials.m3 = quad(1);
  fit.polynomials.xuyv = quad(2);
  fit.polynomials.nr = quad(3);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = points[i].expansion;
    const Vec4 fitted(fit.polynomials.m12.eval(l), fit.polynomials.m3.eval(l),
                      fit.polynomials.xuyv.eval(l), fit.polynomials.nr.eval(l));
    const Vec4 ident = reduced_from_params(points[i].params);
    for (int j = 0; j < 4; ++j) {
      const double rel = std::abs(fitted[j] - ident[j]) /
                         std::max(std::abs(ident[j]), 1e-12);
      fit.worst_rel_change = std::max(fit.worst_rel_change, rel);
    }
  }
  return fit;
}

IdentificationReport identification_sweep(const VesselConfig& truth,
                                          const SweepOptions& options) {
  if (options.lengths.size() < 3) {
    throw std::invalid_argument("sweep: need at least 3 lengths");
  }
  IdentificationReport report;
  for (size_t i = 0; i < options.lengths.size(); ++i) {
    const double l = options.lengths[i];
    ManeuverOptions mopt = options.maneuver;
    mopt.velocity_noise_rel = options.velocity_noise_rel;
    const uint64_t log_seed = derive_seed(options.seed, 100 + i);
    std::vector<ManeuverLog> logs =
        generate_maneuver_logs(truth, l, mopt, log_seed);

    IdentificationProblem problem =
        IdentificationProblem::with_default_guess(std::move(logs));
    problem.seed = derive_seed(options.seed, 200 + i);
    IdentifiedPoint point = identify_at_length(problem);
    report.residual_pre.push_back(point.residual);
    report.points.push_back(std::move(point));
  }

  report.fitted = fit_polynomials(report.points).polynomials;

  for (size_t i = 0; i < options.lengths.size(); ++i) {
    const double l = options.lengths[i];
    ManeuverOptions mopt = options.maneuver;
    mopt.velocity_noise_rel = options.velocity_noise_rel;
    const uint64_t log_seed = derive_seed(options.seed, 100 + i);
    std::vector<ManeuverLog> logs =
        generate_maneuver_logs(truth, l, mopt, log_seed);
    IdentificationProblem problem =
        IdentificationProblem::with_default_guess(std::move(logs));
    report.residual_post.push_back(
        velocity_error_cost(problem, report.fitted.eval(l)));
  }
  return report;
}

void write_identification_report(const IdentificationReport& report,
                                 const std::string& path) {
  nlohmann::json j;
  j["lengths"] = nlohmann::json::array();
  for (size_t i = 0; i < report.points.size(); ++i) {
    const IdentifiedPoint& p = report.points[i];
    j["lengths"].push_back({
        {"l", p.expansion},
        {"m12", p.params.m1},
        {"m3", p.params.m3},
        {"xuyv", p.params.Xu},
        {"nr", p.params.Nr},
        {"residual_pre", report.residual_pre[i]},
        {"residual_post", report.residual_post[i]},
        {"active_bound", p.active_bound},
        {"iterations", p.iterations},
        {"best_start", p.best_start},
    });
  }
  auto quad = [](const Quadratic& q) {
    return nlohmann::json{{"c2", q.c2}, {"c1", q.c1}, {"c0", q.c0}};
  };
  j["fitted"] = {{"m12", quad(report.fitted.m12)},
                 {"m3", quad(report.fitted.m3)},
                 {"xuyv", quad(report.fitted.xuyv)},
                 {"nr", quad(report.fitted.nr)}};
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace usv
