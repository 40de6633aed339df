#pragma once

#include "tve/mech_step.hpp"

namespace tve {

struct ThermalSolveConfig {
  double tol_residual = 1e-10;  // relative to the step's energy-rate scale
  int max_newton = 30;
  double theta_floor = 1e-12;
};

DofConstraints thermal_constraints(const Mesh& mesh, double theta_flat);

std::pair<Eigen::VectorXd, StepReport> solve_thermal_step(const Eigen::VectorXd& y_k,
                                                          const State& prev, double theta_flat,
                                                          double tau, const MaterialModel& m,
                                                          const Mesh& mesh, const FemCache& cache,
                                                          const ThermalSolveConfig& cfg);

// Row sum of the thermal residual over free nodes: the discrete balance of
// internal energy against sources and boundary exchange, normalized by the
// internal energy itself.
double energy_balance_check(const Eigen::VectorXd& theta_k, const Eigen::VectorXd& y_k,
                            const State& prev, double theta_flat, double tau,
                            const MaterialModel& m, const Mesh& mesh, const FemCache& cache);

}  // namespace tve
