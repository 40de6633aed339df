#include "tve/timeloop.hpp"

#include <cmath>

namespace tve {

namespace {

Mat2 rotation2(double angle) {
  Mat2 q;
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return q;
}

}  // namespace

Vec2 DirichletMotion::apply(double t, const Vec2& x) const {
  switch (kind) {
    case Kind::Static: return x;
    case Kind::RigidRotation: return rotation2(rotation_rate * t) * x;
    case Kind::Map: return map(t, x);
  }
  return x;
}

std::function<Vec2(const Vec2&)> DirichletMotion::incremental_update(double t0, double t1) const {
  if (kind == Kind::Static) return [](const Vec2& x) { return x; };
  if (kind == Kind::RigidRotation) {
    const Mat2 q = rotation2(rotation_rate * (t1 - t0));
    return [q](const Vec2& x) { return Vec2(q * x); };
  }
  return nullptr;
}

StepLoads step_loads(const LoadProgram& loads, int k, double tau) {
  if (k < 1) fail(ErrorCode::ValidationError, "step_loads: k must be >= 1");
  const double t0 = (k - 1) * tau, t1 = k * tau;
  StepLoads sl;
  sl.body_force = loads.body_force.interval_average(t0, t1);
  sl.traction = loads.traction.interval_average(t0, t1);
  sl.theta_flat = loads.theta_flat.interval_average(t0, t1);
  return sl;
}

Trajectory run_simulation(const Mesh& mesh, const FemCache& cache, const MaterialModel& m,
                          const LoadProgram& loads, const Eigen::VectorXd& y0,
                          const Eigen::VectorXd& theta0, double tau, double t_end,
                          const MechSolveConfig& mech_cfg, const ThermalSolveConfig& thermal_cfg,
                          const StepCallback& callback) {
  m.require_valid();
  const double steps_real = t_end / tau;
  const int n_steps = int(std::llround(steps_real));
  if (n_steps < 1 || std::abs(steps_real - n_steps) > 1e-9 * std::max(1.0, steps_real))
    fail(ErrorCode::ValidationError, "run_simulation: T/tau must be a positive integer");
  if (theta0.minCoeff() < 0.0)
    fail(ErrorCode::NegativeTemperatureInput, "run_simulation: theta0 must be nonnegative");

  const std::vector<int> dirichlet_mech = boundary_nodes(mesh, BoundaryTag::DirichletMech);

  Trajectory traj;
  traj.states.push_back({y0, theta0, 0.0});

  for (int k = 1; k <= n_steps; ++k) {
    const State& prev = traj.states.back();
    const double t_k = k * tau;
    try {
      const StepLoads sl = step_loads(loads, k, tau);
      std::vector<Vec2> targets;
      targets.reserve(dirichlet_mech.size());
      for (int n : dirichlet_mech)
        targets.push_back(loads.dirichlet_motion.apply(t_k, mesh.nodes[n]));
      const DofConstraints bc = mech_constraints(mesh, dirichlet_mech, targets);

      auto update = loads.dirichlet_motion.incremental_update((k - 1) * tau, t_k);
      auto [y_k, mech_rep] = solve_mech_step(prev, bc, sl, tau, m, mesh, cache, mech_cfg,
                                             update ? &update : nullptr);
      auto [theta_k, thermal_rep] =
          solve_thermal_step(y_k, prev, sl.theta_flat, tau, m, mesh, cache, thermal_cfg);

      traj.states.push_back({std::move(y_k), std::move(theta_k), t_k});
      traj.mech_reports.push_back(mech_rep);
      traj.thermal_reports.push_back(thermal_rep);
      if (callback) callback(k, traj.states.back(), mech_rep, thermal_rep);
    } catch (const Error& err) {
      throw SimulationError(err.code(),
                            "step " + std::to_string(k) + ": " + err.what(), k, traj);
    }
  }
  return traj;
}

}  // namespace tve
