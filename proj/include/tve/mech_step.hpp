#pragma once

#include "tve/fem.hpp"

namespace tve {

struct MechSolveConfig {
  double tol_residual = 1e-8;  // relative to 1 + load scale
  int max_newton = 50;
  int max_backtrack = 40;
  double backtrack_factor = 0.5;
  double hessian_regularization = 0.0;  // 0 selects the adaptive shift
};

struct StepReport {
  int newton_iters = 0;
  double final_residual = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double dissipation = 0.0;
  bool energy_decrease_ok = true;
  int backtracks = 0;
  int clamped_nodes = 0;        // thermal step only
  bool clamp_anomaly = false;   // clamp fired although the positivity condition held
};

// Solver failures carry the last iterate for diagnostics.
class SolveFailure : public Error {
 public:
  SolveFailure(ErrorCode code, const std::string& msg, Eigen::VectorXd last_iterate,
               StepReport report)
      : Error(code, msg), last_iterate(std::move(last_iterate)), report(report) {}
  Eigen::VectorXd last_iterate;
  StepReport report;
};

// Dirichlet data for one mechanical step (targets at t = k*tau).
DofConstraints mech_constraints(const Mesh& mesh, const std::vector<int>& nodes,
                                const std::vector<Vec2>& targets);

// Feasible starting guess satisfying the new Dirichlet data exactly.
// rigid_update, when available, is applied to every node (the push-forward of
// the previous solution through the Dirichlet motion).
Eigen::VectorXd feasible_init(const Eigen::VectorXd& y_prev, const DofConstraints& bc,
                              const Mesh& mesh, const FemCache& cache,
                              const std::function<Vec2(const Vec2&)>* rigid_update = nullptr);

std::pair<Eigen::VectorXd, StepReport> solve_mech_step(
    const State& prev, const DofConstraints& bc, const StepLoads& loads, double tau,
    const MaterialModel& m, const Mesh& mesh, const FemCache& cache, const MechSolveConfig& cfg,
    const std::function<Vec2(const Vec2&)>* rigid_update = nullptr);

}  // namespace tve
