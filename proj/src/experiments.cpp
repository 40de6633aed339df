#include "tve/experiments.hpp"

#include <cmath>

namespace tve {

namespace {

// Probe helpers: the creep strain is read at the first quadrature point of
// element 0; the cycle strain at the reference corner sitting on the probe node.
Mat2 probe_gradient(const ExperimentConfig& cfg, const Mesh& mesh, const FemCache& cache,
                    const Eigen::VectorXd& y) {
  if (cfg.which == ExperimentKind::SmaCycle) {
    const int elem = cfg.nx / 2;  // bottom row, right of midspan
    return deformation_gradient_at(mesh, elem, y, -1.0, -1.0);
  }
  return deformation_gradient(y, mesh.elements[0], cache.elem_quad[0][0]);
}

int probe_node(const ExperimentConfig& cfg) {
  if (cfg.probe_node_override >= 0) return cfg.probe_node_override;
  if (cfg.which == ExperimentKind::RigidRotation) return 0;  // inner ring reference node
  if (cfg.which == ExperimentKind::SmaCycle) return cfg.nx / 2;  // (length/2, 0)
  // creep: midpoint of the loaded right edge
  return (cfg.ny / 2) * (cfg.nx + 1) + cfg.nx;
}

void strain_extent(const Mesh& mesh, const FemCache& cache, const Eigen::VectorXd& y,
                   double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (int e = 0; e < mesh.element_count(); ++e)
    for (const auto& qp : cache.elem_quad[e]) {
      const double s = deformation_gradient(y, mesh.elements[e], qp)(0, 0);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
}

}  // namespace

Mesh ExperimentConfig::build_mesh() const {
  if (which == ExperimentKind::RigidRotation)
    return gen_annulus(r_in, r_out, n_radial, n_circum);
  Mesh mesh = gen_rectangle(length, height, nx, ny);
  if (which == ExperimentKind::SmaCycle) {
    // Clamp both ends thermally and mechanically, load the top surface.
    const double l = length, h = height;
    retag_boundary(mesh, [l, h](const Vec2& mid, TagMask) -> TagMask {
      const TagMask clamped =
          tag_mask(BoundaryTag::DirichletMech) | tag_mask(BoundaryTag::DirichletHeat);
      if (mid.x() < 1e-12 * l || mid.x() > l - 1e-12 * l) return clamped;
      if (mid.y() > h - 1e-12 * h) return tag_mask(BoundaryTag::NeumannTraction);
      return tag_mask(BoundaryTag::Free) | tag_mask(BoundaryTag::RobinHeat);
    });
  }
  return mesh;
}

LoadProgram ExperimentConfig::build_loads() const {
  LoadProgram loads;
  loads.theta_flat = Curve<double>::constant(theta_boundary);
  switch (which) {
    case ExperimentKind::RigidRotation:
      loads.dirichlet_motion.kind = DirichletMotion::Kind::RigidRotation;
      loads.dirichlet_motion.rotation_rate = rotation_rate;
      break;
    case ExperimentKind::Creep:
      loads.traction = Curve<Vec2>::constant(Vec2(traction_amplitude, 0.0));
      break;
    case ExperimentKind::SmaCycle: {
      std::vector<double> t;
      std::vector<Vec2> v;
      const double p = 80.0 * tau;
      const double horizon = total_time() + tau;
      for (int cycle = 0; cycle * p <= horizon; ++cycle) {
        const double off = cycle * p;
        t.insert(t.end(), {off, off + 0.25 * p, off + 0.75 * p});
        v.insert(v.end(), {Vec2(0, 0), Vec2(0, traction_amplitude), Vec2(0, -traction_amplitude)});
      }
      t.push_back(t.back() + 0.25 * p);
      v.push_back(Vec2(0, 0));
      loads.traction = Curve<Vec2>::piecewise_linear(std::move(t), std::move(v));
      break;
    }
  }
  return loads;
}

ExperimentConfig preset_rigid_rotation(DissipationVariant variant) {
  ExperimentConfig cfg;
  cfg.which = ExperimentKind::RigidRotation;
  cfg.r_in = 1.0;
  cfg.r_out = 2.0;
  cfg.n_radial = 8;
  cfg.n_circum = 32;
  cfg.model.kind = MaterialKind::SimpleNeoHookean;
  cfg.model.mu = 1.0;
  cfg.model.lambda = 1.0;
  cfg.model.nu_visc = 1.0;
  cfg.model.c1 = 1.0;
  cfg.model.k_cond = 0.01;  // slow diffusion so heating accumulates over one revolution
  cfg.model.kappa = 0.0;
  cfg.model.dissipation_variant = variant;
  cfg.model.heat_source_variant =
      variant == DissipationVariant::V1 ? HeatSourceVariant::Vh1 : HeatSourceVariant::Vh2;
  cfg.theta_boundary = 293.0;
  cfg.rotation_rate = 1.0;
  cfg.tau = 2.0 * M_PI / 80.0;
  cfg.steps = 80;
  cfg.snapshot_stride = 15;
  return cfg;
}

ExperimentConfig preset_creep(double nu_over_mu) {
  if (!(nu_over_mu > 0)) fail(ErrorCode::ValidationError, "preset_creep: nu_over_mu must be > 0");
  ExperimentConfig cfg;
  cfg.which = ExperimentKind::Creep;
  cfg.length = 1.0;
  cfg.height = 0.25;
  cfg.nx = 8;
  cfg.ny = 2;
  cfg.model.kind = MaterialKind::SimpleNeoHookean;
  cfg.model.mu = 1.0;
  cfg.model.lambda = 1.0;  // Poisson ratio 0.125
  cfg.model.nu_visc = nu_over_mu;
  cfg.model.c1 = 1.0;
  cfg.model.k_cond = 0.2;  // c1/k = 5
  cfg.model.kappa = 0.0;
  cfg.theta_boundary = 293.0;
  cfg.traction_amplitude = 0.01;  // peak axial strain near 5%
  cfg.tau = 0.25;
  cfg.steps = 320;
  cfg.snapshot_stride = 40;
  return cfg;
}

ExperimentConfig preset_sma_cycle(double nu_over_mu) {
  if (!(nu_over_mu > 0))
    fail(ErrorCode::ValidationError, "preset_sma_cycle: nu_over_mu must be > 0");
  ExperimentConfig cfg;
  cfg.which = ExperimentKind::SmaCycle;
  cfg.length = 1.0;
  cfg.height = 0.25;
  cfg.nx = 16;
  cfg.ny = 4;
  cfg.model.kind = MaterialKind::Sma;
  cfg.model.mu = 1.0;
  cfg.model.lambda = 1.0;
  cfg.model.eps = 0.01;
  cfg.model.nu_visc = nu_over_mu;
  cfg.model.c1 = 1e-3;
  cfg.model.k_cond = 1e-4;  // capacity/conductivity ratio 10 at the reference state
  cfg.model.kappa = 0.0;
  cfg.theta_boundary = 293.0;
  cfg.traction_amplitude = 1e-4;
  cfg.tau = 1.0;
  cfg.steps = 80;
  cfg.snapshot_stride = 20;
  return cfg;
}

double phase_indicator(const Mat3& f, double eps) {
  if (!(f.determinant() > 0.0))
    fail(ErrorCode::NonPositiveDeterminant, "phase_indicator: det(F) <= 0");
  const Mat3 c = f.transpose() * f;
  const Mat3 gm = simple_shear(-eps);
  const Mat3 gp = simple_shear(+eps);
  const double dm = (c - gm.transpose() * gm).squaredNorm();
  const double dp = (c - gp.transpose() * gp).squaredNorm();
  if (dm + dp == 0.0)
    fail(ErrorCode::ValidationError, "phase_indicator: both well distances vanish (eps = 0?)");
  return dm / (dm + dp);
}

Vec2 cyclic_traction(double t_steps, double amplitude, double period_steps) {
  if (t_steps < 0.0) fail(ErrorCode::ValidationError, "cyclic_traction: t must be >= 0");
  const double t = std::fmod(t_steps, period_steps);
  const double q = period_steps / 4.0;
  double v;
  if (t <= q)
    v = amplitude * t / q;
  else if (t <= 3.0 * q)
    v = amplitude * (1.0 - (t - q) / q);
  else
    v = amplitude * ((t - 3.0 * q) / q - 1.0);
  return Vec2(0.0, v);
}

RunResult run_experiment(const ExperimentConfig& config, const StepCallback& callback) {
  config.model.require_valid();
  RunResult result;
  result.config = config;
  result.mesh = config.build_mesh();
  result.cache = build_cache(result.mesh);
  const LoadProgram loads = config.build_loads();
  const State init = reference_state(result.mesh, config.theta_boundary);

  result.columns = {"time",        "mech_iters",      "thermal_iters", "dissipation",
                    "internal_energy", "theta_probe", "theta_max_dev", "theta_min"};
  switch (config.which) {
    case ExperimentKind::RigidRotation: break;
    case ExperimentKind::Creep:
      result.columns.insert(result.columns.end(), {"axial_strain", "strain_spread"});
      break;
    case ExperimentKind::SmaCycle:
      result.columns.insert(result.columns.end(),
                            {"traction", "probe_strain", "phase_probe"});
      break;
  }

  const Mesh& mesh = result.mesh;
  const FemCache& cache = result.cache;
  const int probe = probe_node(config);
  auto row_callback = [&](int k, const State& s, const StepReport& mrep,
                          const StepReport& trep) {
    std::vector<double> row = {
        s.time,
        double(mrep.newton_iters),
        double(trep.newton_iters),
        mrep.dissipation,
        integrate_internal_energy(s.theta, s.y, config.model, mesh, cache),
        s.theta[probe],
        (s.theta.array() - config.theta_boundary).abs().maxCoeff(),
        s.theta.minCoeff(),
    };
    if (config.which == ExperimentKind::Creep) {
      double lo, hi;
      strain_extent(mesh, cache, s.y, lo, hi);
      row.push_back(probe_gradient(config, mesh, cache, s.y)(0, 0));
      row.push_back(hi - lo);
    } else if (config.which == ExperimentKind::SmaCycle) {
      const Mat2 f2 = probe_gradient(config, mesh, cache, s.y);
      row.push_back(cyclic_traction(s.time / config.tau, config.traction_amplitude).y());
      row.push_back(f2(1, 1) - 1.0);
      row.push_back(phase_indicator(lift_plane_strain(f2), config.model.eps));
    }
    result.rows.push_back(std::move(row));
    if (callback) callback(k, s, mrep, trep);
  };

  result.trajectory = run_simulation(mesh, cache, config.model, loads, init.y, init.theta,
                                     config.tau, config.total_time(), config.mech, config.thermal,
                                     row_callback);
  return result;
}

DissipationGap dissipation_gap_probe(const Trajectory& v1, const Trajectory& v2, double tau) {
  if (v1.step_count() != v2.step_count() || v1.step_count() == 0)
    fail(ErrorCode::MismatchedConfigs, "dissipation_gap_probe: trajectories differ in length");
  DissipationGap gap;
  gap.min_v2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < v1.step_count(); ++k) {
    gap.per_step_v1.push_back(v1.mech_reports[k].dissipation);
    gap.per_step_v2.push_back(v2.mech_reports[k].dissipation);
    gap.max_v1 = std::max(gap.max_v1, gap.per_step_v1.back());
    gap.min_v2 = std::min(gap.min_v2, gap.per_step_v2.back());
  }
  gap.fitted_c = gap.min_v2 / (tau * tau);
  return gap;
}

double trajectory_distance(const Trajectory& coarse, const Trajectory& fine, double tau_coarse,
                           const Mesh& mesh, const FemCache& cache) {
  const int n = int(coarse.states.size()) - 1;
  if (int(fine.states.size()) - 1 != 2 * n || n < 1)
    fail(ErrorCode::MismatchedConfigs, "trajectory_distance: expected a half-step refinement");
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    const State& a = coarse.states[k];
    const State& b = fine.states[2 * k];
    double h1 = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& el = mesh.elements[e];
      for (const auto& qp : cache.elem_quad[e]) {
        Vec2 dy = Vec2::Zero();
        Mat2 dgrad = Mat2::Zero();
        double dth = 0.0;
        Vec2 dth_grad = Vec2::Zero();
        for (int i = 0; i < 4; ++i) {
          const Vec2 diff = a.y.segment<2>(2 * el[i]) - b.y.segment<2>(2 * el[i]);
          dy += qp.shape[i] * diff;
          dgrad += diff * qp.grad[i].transpose();
          const double tdiff = a.theta[el[i]] - b.theta[el[i]];
          dth += qp.shape[i] * tdiff;
          dth_grad += tdiff * qp.grad[i];
        }
        h1 += qp.weight * (dy.squaredNorm() + dgrad.squaredNorm() + dth * dth +
                           dth_grad.squaredNorm());
      }
    }
    acc += tau_coarse * h1;
  }
  return std::sqrt(acc);
}

std::vector<double> element_phase_field(const Mesh& mesh, const FemCache& cache,
                                        const Eigen::VectorXd& y, double eps) {
  std::vector<double> field(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    double acc = 0.0;
    for (const auto& qp : cache.elem_quad[e])
      acc += phase_indicator(lift_plane_strain(deformation_gradient(y, mesh.elements[e], qp)), eps);
    field[e] = acc / 4.0;
  }
  return field;
}

std::vector<double> element_det_field(const Mesh& mesh, const FemCache& cache,
                                      const Eigen::VectorXd& y) {
  std::vector<double> field(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    double acc = 0.0;
    for (const auto& qp : cache.elem_quad[e])
      acc += deformation_gradient(y, mesh.elements[e], qp).determinant();
    field[e] = acc / 4.0;
  }
  return field;
}

}  // namespace tve
