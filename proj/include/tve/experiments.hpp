#pragma once

#include "tve/timeloop.hpp"

namespace tve {

enum class ExperimentKind { RigidRotation, Creep, SmaCycle };

struct ExperimentConfig {
  ExperimentKind which = ExperimentKind::Creep;

  // mesh
  double length = 1.0, height = 0.25;       // rectangle geometries
  int nx = 8, ny = 2;
  double r_in = 1.0, r_out = 2.0;           // annulus geometry
  int n_radial = 8, n_circum = 32;

  MaterialModel model;
  double theta_boundary = 293.0;            // boundary and initial temperature
  double rotation_rate = 1.0;               // rigid rotation only
  double traction_amplitude = 0.0;          // axial (creep) or vertical peak (cycle)

  double tau = 0.25;
  int steps = 320;
  int snapshot_stride = 10;
  int probe_node_override = -1;  // < 0 selects the preset's own probe

  MechSolveConfig mech;
  ThermalSolveConfig thermal;

  Mesh build_mesh() const;
  LoadProgram build_loads() const;
  double total_time() const { return tau * steps; }
};

// The three preset protocols. Values not fixed by the physics (amplitudes,
// annulus radii, conductivity of the rotation test) are documented defaults.
ExperimentConfig preset_rigid_rotation(DissipationVariant variant);
ExperimentConfig preset_creep(double nu_over_mu);
ExperimentConfig preset_sma_cycle(double nu_over_mu);

// Distance of the strain to the two martensitic wells: 0 at the -eps well,
// 1 at the +eps well, 1/2 at the identity.
double phase_indicator(const Mat3& f, double eps);

// Triangle-wave vertical traction: rises to +amplitude over the first quarter
// of the period, falls to -amplitude over the next half, returns to zero.
// The argument is measured in steps and wraps periodically.
Vec2 cyclic_traction(double t_steps, double amplitude, double period_steps = 80.0);

struct RunResult {
  ExperimentConfig config;
  Mesh mesh;
  FemCache cache;
  Trajectory trajectory;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // one per step
};

RunResult run_experiment(const ExperimentConfig& config, const StepCallback& callback = nullptr);

struct DissipationGap {
  std::vector<double> per_step_v1;
  std::vector<double> per_step_v2;
  double max_v1 = 0.0;
  double min_v2 = 0.0;
  double fitted_c = 0.0;  // min over steps of v2 dissipation / tau^2
};

// Pairs the per-step dissipation of matched frame-indifferent and legacy runs.
DissipationGap dissipation_gap_probe(const Trajectory& v1, const Trajectory& v2, double tau);

// Discrete L2-in-time, H1-in-space distance between trajectories on the same
// mesh with step sizes tau and tau/2, compared at the coarse time points.
double trajectory_distance(const Trajectory& coarse, const Trajectory& fine, double tau_coarse,
                           const Mesh& mesh, const FemCache& cache);

// Per-element field averages over quadrature points (snapshot output).
std::vector<double> element_phase_field(const Mesh& mesh, const FemCache& cache,
                                        const Eigen::VectorXd& y, double eps);
std::vector<double> element_det_field(const Mesh& mesh, const FemCache& cache,
                                      const Eigen::VectorXd& y);

}  // namespace tve
