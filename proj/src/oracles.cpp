#include "tve/oracles.hpp"

#include <cmath>

namespace tve {

double RandomSampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

Mat2 RandomSampler::rotation2() {
  const double a = uniform(0.0, 2.0 * M_PI);
  Mat2 q;
  q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return q;
}

Mat3 RandomSampler::rotation3() {
  // Normalized axis, uniform angle.
  Vec3 axis(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
  while (axis.norm() < 1e-3)
    axis = Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
  axis.normalize();
  return Eigen::AngleAxisd(uniform(0.0, 2.0 * M_PI), axis).toRotationMatrix();
}

Mat2 RandomSampler::gl2() {
  const Vec2 s(uniform(0.5, 2.0), uniform(0.5, 2.0));
  return rotation2() * s.asDiagonal() * rotation2();
}

Mat3 RandomSampler::gl3() {
  const Vec3 s(uniform(0.5, 2.0), uniform(0.5, 2.0), uniform(0.5, 2.0));
  return rotation3() * s.asDiagonal() * rotation3();
}

Mat3 RandomSampler::gl3_lifted() { return lift_plane_strain(gl2()); }

Mat2 RandomSampler::spd2(double lo, double hi) {
  const Mat2 q = rotation2();
  const Vec2 s(uniform(lo, hi), uniform(lo, hi));
  return q * s.asDiagonal() * q.transpose();
}

Mat3 RandomSampler::spd3(double lo, double hi) {
  const Mat3 q = rotation3();
  const Vec3 s(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  return q * s.asDiagonal() * q.transpose();
}

Mat3 RandomSampler::symmetric3(double scale) {
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = uniform(-scale, scale);
  return sym(a);
}

namespace {

// Admissible sample for derivative checks: det in [0.5, 2], away from the
// martensite tie set.
Mat3 admissible_gradient(RandomSampler& rs, const MaterialModel& m) {
  for (;;) {
    const Mat3 f = rs.gl3();
    const double det = f.determinant();
    if (det < 0.5 || det > 2.0) continue;
    if (m.kind == MaterialKind::Sma) {
      const double zp = well_energy(f, +m.eps, m.mu, m.lambda);
      const double zm = well_energy(f, -m.eps, m.mu, m.lambda);
      if (std::abs(zp - zm) < 1e-6 * (1.0 + zp + zm)) continue;
    }
    return f;
  }
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-12});
}

}  // namespace

OracleReport fd_gradient_suite(const MaterialModel& m, unsigned seed) {
  RandomSampler rs(seed);
  OracleReport rep;
  rep.name = m.kind == MaterialKind::Sma ? "fd_gradients_sma" : "fd_gradients_neo_hookean";
  rep.tolerance = 1e-6;
  const int n_points = 100;
  for (int s = 0; s < n_points; ++s) {
    const Mat3 f = admissible_gradient(rs, m);
    const double theta = rs.uniform(100.0, 600.0);
    const double hf = 1e-6 * f.norm();
    const double ht = 1e-6 * theta;

    // d/dF of elastic and coupling energies against the analytic stresses.
    const Mat3 pe = elastic_stress(f, m);
    const Mat3 pc = coupling_stress(f, theta, m);
    const Mat3 pct = coupling_dF_dtheta(f, theta, m);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Mat3 fp = f, fm = f;
        fp(i, j) += hf;
        fm(i, j) -= hf;
        const double fd_el = (elastic_energy(fp, m) - elastic_energy(fm, m)) / (2 * hf);
        const double fd_cpl =
            (coupling_energy(fp, theta, m) - coupling_energy(fm, theta, m)) / (2 * hf);
        const double fd_mixed =
            (coupling_dtheta(fp, theta, m) - coupling_dtheta(fm, theta, m)) / (2 * hf);
        const double scale_el = std::max(1.0, pe.norm());
        const double scale_cpl = std::max(1.0, pc.norm());
        const double scale_mx = std::max(1.0, pct.norm());
        rep.max_violation = std::max(rep.max_violation, std::abs(fd_el - pe(i, j)) / scale_el);
        rep.max_violation = std::max(rep.max_violation, std::abs(fd_cpl - pc(i, j)) / scale_cpl);
        rep.max_violation = std::max(rep.max_violation, std::abs(fd_mixed - pct(i, j)) / scale_mx);
        ++rep.samples;
      }
    }

    // Temperature derivatives: coupling, internal energy antiderivative, capacity.
    const double fd_th =
        (coupling_energy(f, theta + ht, m) - coupling_energy(f, theta - ht, m)) / (2 * ht);
    rep.max_violation = std::max(rep.max_violation, rel_err(coupling_dtheta(f, theta, m), fd_th));
    const double fd_int = (internal_energy_integral(f, theta + ht, m) -
                           internal_energy_integral(f, theta - ht, m)) /
                          (2 * ht);
    rep.max_violation = std::max(rep.max_violation, rel_err(internal_energy(f, theta, m), fd_int));
    const double fd_cap =
        (internal_energy(f, theta + ht, m) - internal_energy(f, theta - ht, m)) / (2 * ht);
    rep.max_violation = std::max(rep.max_violation, rel_err(heat_capacity(f, theta, m), fd_cap));
    // Internal energy definition w = w_cpl - theta * d_theta w_cpl.
    const double w_def = coupling_energy(f, theta, m) - theta * coupling_dtheta(f, theta, m);
    rep.max_violation =
        std::max(rep.max_violation, rel_err(internal_energy(f, theta, m), w_def));
    rep.samples += 4;
  }
  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

OracleReport matrix_lemma_suite(unsigned seed) {
  RandomSampler rs(seed);
  OracleReport rep;
  rep.name = "matrix_root_inequality";
  rep.tolerance = 1e-12;
  auto check = [&rep](const auto& a, const auto& d) {
    const double alpha = min_eigenvalue(d);
    const double alpha_t = min_eigenvalue(a);
    const double lhs = (a - d).norm();
    const double rhs = (a * a - d * d).norm() / (alpha + alpha_t);
    rep.max_violation = std::max(rep.max_violation, lhs - rhs);
    ++rep.samples;
  };
  for (int i = 0; i < 10000; ++i) check(rs.spd2(), rs.spd2());
  for (int i = 0; i < 10000; ++i) check(rs.spd3(), rs.spd3());
  // Equality witness: A = 2 Id, D = Id gives |A - D| = sqrt(2) = |A^2 - D^2| / 3.
  const Mat2 a2 = 2.0 * Mat2::Identity();
  const Mat2 d2 = Mat2::Identity();
  const double lhs = (a2 - d2).norm();
  const double rhs = (a2 * a2 - d2 * d2).norm() / (1.0 + 2.0);
  rep.max_violation = std::max(rep.max_violation, std::abs(lhs - rhs));
  rep.max_violation = std::max(rep.max_violation, std::abs(lhs - std::sqrt(2.0)));
  ++rep.samples;
  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

OracleReport identity_suite(unsigned seed) {
  RandomSampler rs(seed);
  OracleReport rep;
  rep.name = "algebraic_identities";
  rep.tolerance = 1e-12;

  MaterialModel sma;
  sma.kind = MaterialKind::Sma;
  sma.eps = 0.15;
  sma.mu = 1.3;
  sma.lambda = 0.7;
  sma.c1 = 2.0;
  sma.nu_visc = 0.9;

  MaterialModel v1 = sma;
  v1.dissipation_variant = DissipationVariant::V1;
  MaterialModel v2 = sma;
  v2.dissipation_variant = DissipationVariant::V2;

  for (int s = 0; s < 1000; ++s) {
    const Mat3 f1 = rs.gl3();
    const Mat3 f2 = rs.gl3();
    const double scale = std::max(1.0, f1.squaredNorm() + f2.squaredNorm());

    // Difference of the two strain increments is the quadratic remainder.
    const Mat3 df = f2 - f1;
    const Mat3 lhs = df.transpose() * f1 + f1.transpose() * df -
                     (f2.transpose() * f2 - f1.transpose() * f1);
    rep.max_violation =
        std::max(rep.max_violation, (lhs + df.transpose() * df).norm() / scale);

    // Dissipation-rate chain: dR/dFdot : Fdot = V Cdot : Cdot = 2 R.
    const Mat3 fdot = rs.symmetric3() + 0.5 * (rs.gl3() - rs.gl3());
    const Mat3 cdot = fdot.transpose() * f1 + f1.transpose() * fdot;
    const double xi = xi_rate(f1, fdot, 300.0, sma);
    const double via_stress = ddot(Mat3(viscous_stress(f1, fdot, 300.0, sma)), fdot);
    const double via_form = visc_form(sma.nu_visc, cdot, cdot);
    const double xscale = std::max(1.0, std::abs(xi));
    rep.max_violation = std::max(rep.max_violation, std::abs(xi - via_stress) / xscale);
    rep.max_violation = std::max(rep.max_violation, std::abs(xi - via_form) / xscale);

    // Chain rule between the F-gradient and the strain-space gradient.
    const double theta = rs.uniform(50.0, 600.0);
    const Mat3 pf = coupling_stress(f1, theta, sma);
    const Mat3 pc = coupling_stress_c(f1, theta, sma);
    rep.max_violation =
        std::max(rep.max_violation, (pf - 2.0 * f1 * pc).norm() / std::max(1.0, pf.norm()));

    // Separate frame indifference of the strain-based dissipation.
    const Mat3 q1 = rs.rotation3();
    const Mat3 q2 = rs.rotation3();
    const double d2_base = dissipation_density(f1, f2, theta, v1);
    const double d2_rot = dissipation_density(Mat3(q1 * f1), Mat3(q2 * f2), theta, v1);
    rep.max_violation = std::max(
        rep.max_violation, std::abs(d2_base - d2_rot) / std::max(1.0, std::abs(d2_base)));

    rep.samples += 5;
  }

  // The legacy dissipation is positive between distinct rotations; the
  // strain-based one vanishes there.
  double min_witness = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 200; ++s) {
    const Mat3 s1 = rs.rotation3();
    Mat3 s2 = rs.rotation3();
    while ((s1 - s2).norm() < 1e-3) s2 = rs.rotation3();
    const double d2 = dissipation_density(s1, s2, 300.0, v2);
    const Mat3 msym = 2.0 * sym(Mat3(s1.transpose() * (s2 - s1)));
    const double lower = 2.0 * (0.5 * v2.nu_visc) * msym.squaredNorm();
    if (d2 < lower - 1e-12 * std::max(1.0, d2)) rep.max_violation = std::max(rep.max_violation, lower - d2);
    min_witness = std::min(min_witness, d2);
    const double d1 = dissipation_density(s1, s2, 300.0, v1);
    rep.max_violation = std::max(rep.max_violation, std::abs(d1));
    rep.samples += 2;
  }
  if (!(min_witness > 0.0)) rep.max_violation = std::max(rep.max_violation, 1.0);

  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

OracleReport balance_and_convergence_suite() {
  OracleReport rep;
  rep.name = "balance_and_self_convergence";
  rep.tolerance = 1e-9;  // 10x the thermal solver tolerance

  ExperimentConfig cfg = preset_creep(0.5);
  cfg.nx = 4;
  cfg.ny = 4;
  cfg.height = 1.0;

  // (a) Discrete internal-energy balance along a 40-step run.
  {
    ExperimentConfig c = cfg;
    c.tau = 0.5;
    c.steps = 40;
    const Mesh mesh = c.build_mesh();
    const FemCache cache = build_cache(mesh);
    const LoadProgram loads = c.build_loads();
    const State init = reference_state(mesh, c.theta_boundary);
    Trajectory traj = run_simulation(mesh, cache, c.model, loads, init.y, init.theta, c.tau,
                                     c.tau * c.steps, c.mech, c.thermal);
    for (int k = 1; k <= traj.step_count(); ++k) {
      const double res = energy_balance_check(traj.states[k].theta, traj.states[k].y,
                                              traj.states[k - 1], c.theta_boundary, c.tau,
                                              c.model, mesh, cache);
      rep.max_violation = std::max(rep.max_violation, res);
      ++rep.samples;
    }
  }

  // (b) Trajectory self-convergence under step halving.
  {
    const double t_end = 8.0;
    const Mesh mesh = cfg.build_mesh();
    const FemCache cache = build_cache(mesh);
    const LoadProgram loads = cfg.build_loads();
    const State init = reference_state(mesh, cfg.theta_boundary);
    auto run_with = [&](int steps) {
      return run_simulation(mesh, cache, cfg.model, loads, init.y, init.theta, t_end / steps,
                            t_end, cfg.mech, cfg.thermal);
    };
    const Trajectory t20 = run_with(20);
    const Trajectory t40 = run_with(40);
    const Trajectory t80 = run_with(80);
    const double d1 = trajectory_distance(t20, t40, t_end / 20, mesh, cache);
    const double d2 = trajectory_distance(t40, t80, t_end / 40, mesh, cache);
    if (!(d2 < d1)) rep.max_violation = std::max(rep.max_violation, d2 - d1 + 1.0);
    rep.samples += 2;
  }

  rep.pass = rep.max_violation <= rep.tolerance;
  return rep;
}

std::vector<OracleReport> run_all_oracles() {
  MaterialModel nh;
  MaterialModel sma;
  sma.kind = MaterialKind::Sma;
  sma.eps = 0.1;
  sma.c1 = 2.0;
  std::vector<OracleReport> reports;
  reports.push_back(fd_gradient_suite(nh));
  reports.push_back(fd_gradient_suite(sma));
  reports.push_back(matrix_lemma_suite());
  reports.push_back(identity_suite());
  reports.push_back(balance_and_convergence_suite());
  return reports;
}

}  // namespace tve
