#include <doctest.h>

#include <cmath>
#include <set>

#include "tve/oracles.hpp"
#include "tve/thermal_step.hpp"

using namespace tve;

namespace {

MaterialModel nh_model(DissipationVariant v = DissipationVariant::V1) {
  MaterialModel m;
  m.nu_visc = 1.0;
  m.dissipation_variant = v;
  m.heat_source_variant =
      v == DissipationVariant::V1 ? HeatSourceVariant::Vh1 : HeatSourceVariant::Vh2;
  return m;
}

DofConstraints static_bc(const Mesh& mesh) {
  const auto nodes = boundary_nodes(mesh, BoundaryTag::DirichletMech);
  std::vector<Vec2> targets;
  for (int n : nodes) targets.push_back(mesh.nodes[n]);
  return mech_constraints(mesh, nodes, targets);
}

}  // namespace

TEST_CASE("stationary state solves in at most one iteration") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 4, 2);
  const FemCache cache = build_cache(mesh);
  const MaterialModel m = nh_model();
  const State prev = reference_state(mesh, 293.0);

  auto [y, rep] = solve_mech_step(prev, static_bc(mesh), StepLoads{}, 0.1, m, mesh, cache,
                                  MechSolveConfig{});
  CHECK((y - prev.y).norm() < 1e-12);
  CHECK(rep.newton_iters <= 1);
  CHECK(rep.dissipation <= 1e-20);
  CHECK(rep.energy_decrease_ok);
}

TEST_CASE("rigid rotation step: strain-based dissipation vanishes, legacy does not") {
  const Mesh mesh = gen_annulus(1.0, 2.0, 3, 16);
  const FemCache cache = build_cache(mesh);
  const double tau = 2.0 * M_PI / 80.0;

  DirichletMotion motion;
  motion.kind = DirichletMotion::Kind::RigidRotation;
  motion.rotation_rate = 1.0;

  const auto nodes = boundary_nodes(mesh, BoundaryTag::DirichletMech);
  std::vector<Vec2> targets;
  for (int n : nodes) targets.push_back(motion.apply(tau, mesh.nodes[n]));
  const DofConstraints bc = mech_constraints(mesh, nodes, targets);
  const State prev = reference_state(mesh, 293.0);
  auto update = motion.incremental_update(0.0, tau);

  {
    auto [y, rep] = solve_mech_step(prev, bc, StepLoads{}, tau, nh_model(DissipationVariant::V1),
                                    mesh, cache, MechSolveConfig{}, &update);
    CHECK(rep.dissipation <= 1e-10 * cache.area);
    // Solution is the rotation applied to every node.
    for (int n = 0; n < mesh.node_count(); ++n)
      CHECK((Vec2(y.segment<2>(2 * n)) - update(mesh.nodes[n])).norm() < 1e-9);
  }
  {
    auto [y, rep] = solve_mech_step(prev, bc, StepLoads{}, tau, nh_model(DissipationVariant::V2),
                                    mesh, cache, MechSolveConfig{}, &update);
    CHECK(rep.dissipation > 0.0);
    // Close to the rigid rotation, with the analytically computed dissipation.
    const double predicted = 4.0 * (1.0 - std::cos(tau)) * (1.0 - std::cos(tau)) * cache.area;
    CHECK(rep.dissipation == doctest::Approx(predicted).epsilon(1e-6));
  }
}

TEST_CASE("feasible_init candidates") {
  const Mesh mesh = gen_rectangle(1.0, 1.0, 3, 3);
  const FemCache cache = build_cache(mesh);
  const State prev = reference_state(mesh, 293.0);

  // Static data keeps the previous solution.
  CHECK((feasible_init(prev.y, static_bc(mesh), mesh, cache) - prev.y).norm() == 0.0);

  // A large rigid rotation applied boundary-only would fold elements; the
  // affine fallback recovers the rotation everywhere.
  const double angle = 2.0;
  Mat2 q;
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  std::set<int> bnodes;
  for (const auto& e : mesh.boundary_edges) {
    bnodes.insert(e.n0);
    bnodes.insert(e.n1);
  }
  std::vector<int> nodes(bnodes.begin(), bnodes.end());
  std::vector<Vec2> targets;
  for (int n : nodes) targets.push_back(q * mesh.nodes[n]);
  const DofConstraints bc = mech_constraints(mesh, nodes, targets);
  const Eigen::VectorXd y = feasible_init(prev.y, bc, mesh, cache);
  for (int n = 0; n < mesh.node_count(); ++n)
    CHECK((Vec2(y.segment<2>(2 * n)) - q * mesh.nodes[n]).norm() < 1e-10);

  // A stretch applied through the motion map stays feasible.
  DirichletMotion stretch;
  stretch.kind = DirichletMotion::Kind::Map;
  stretch.map = [](double t, const Vec2& x) { return Vec2((1.0 + 0.05 * t) * x.x(), x.y()); };
  std::vector<Vec2> stretch_targets;
  for (int n : nodes) stretch_targets.push_back(stretch.apply(1.0, mesh.nodes[n]));
  const DofConstraints bc2 = mech_constraints(mesh, nodes, stretch_targets);
  const Eigen::VectorXd y2 = feasible_init(prev.y, bc2, mesh, cache);
  for (int e = 0; e < mesh.element_count(); ++e)
    for (const auto& qp : cache.elem_quad[e])
      CHECK(deformation_gradient(y2, mesh.elements[e], qp).determinant() > 0.0);
}

TEST_CASE("mech solver error carries the last iterate") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 2, 1);
  const FemCache cache = build_cache(mesh);
  const State prev = reference_state(mesh, 293.0);
  StepLoads loads;
  loads.traction = Vec2(0.05, 0.0);
  MechSolveConfig cfg;
  cfg.max_newton = 0;
  try {
    solve_mech_step(prev, static_bc(mesh), loads, 0.1, nh_model(), mesh, cache, cfg);
    FAIL("expected MaxIterations");
  } catch (const SolveFailure& e) {
    CHECK(e.code() == ErrorCode::MaxIterations);
    CHECK(e.last_iterate.size() == mesh.dof_count());
  }
}

TEST_CASE("thermal step: constant boundary temperature is stationary") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 4, 2);
  const FemCache cache = build_cache(mesh);
  MaterialModel m = nh_model();
  m.kappa = 0.5;
  const State prev = reference_state(mesh, 293.0);

  auto [theta, rep] =
      solve_thermal_step(prev.y, prev, 293.0, 0.1, m, mesh, cache, ThermalSolveConfig{});
  CHECK((theta.array() - 293.0).abs().maxCoeff() < 1e-10);
  CHECK(rep.clamped_nodes == 0);

  // The neo-Hookean functional is quadratic: exactly one Newton iteration.
  State warm = prev;
  for (int n = 0; n < warm.theta.size(); ++n) warm.theta[n] = 293.0 + 5.0 * (n % 3);
  auto [theta2, rep2] =
      solve_thermal_step(prev.y, warm, 293.0, 0.1, m, mesh, cache, ThermalSolveConfig{});
  CHECK(rep2.newton_iters == 1);
}

TEST_CASE("thermal step is affine in the previous temperature (neo-Hookean)") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 3, 2);
  const FemCache cache = build_cache(mesh);
  MaterialModel m = nh_model();
  m.kappa = 0.2;
  RandomSampler rs(7);

  State a = reference_state(mesh, 0.0);
  State b = reference_state(mesh, 0.0);
  for (int n = 0; n < a.theta.size(); ++n) {
    a.theta[n] = rs.uniform(250.0, 350.0);
    b.theta[n] = rs.uniform(250.0, 350.0);
  }
  State mid = a;
  mid.theta = 0.5 * (a.theta + b.theta);

  const ThermalSolveConfig cfg;
  const auto ta = solve_thermal_step(a.y, a, 293.0, 0.1, m, mesh, cache, cfg).first;
  const auto tb = solve_thermal_step(b.y, b, 293.0, 0.1, m, mesh, cache, cfg).first;
  const auto tm = solve_thermal_step(mid.y, mid, 293.0, 0.1, m, mesh, cache, cfg).first;
  CHECK((tm - 0.5 * (ta + tb)).norm() <= 1e-9 * tm.norm());
}

TEST_CASE("robin exchange cools a hot body") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 4, 2);
  const FemCache cache = build_cache(mesh);
  MaterialModel m = nh_model();
  m.kappa = 1.0;
  State prev = reference_state(mesh, 350.0);  // hotter than the exterior

  auto [theta, rep] =
      solve_thermal_step(prev.y, prev, 293.0, 0.1, m, mesh, cache, ThermalSolveConfig{});
  const double w_before = integrate_internal_energy(prev.theta, prev.y, m, mesh, cache);
  const double w_after = integrate_internal_energy(theta, prev.y, m, mesh, cache);
  CHECK(w_after < w_before);
}

TEST_CASE("internal energy balance") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 4, 2);
  const FemCache cache = build_cache(mesh);
  MaterialModel m = nh_model();

  // No exchange, no motion: conservation to solver precision.
  State prev = reference_state(mesh, 0.0);
  for (int n = 0; n < prev.theta.size(); ++n) prev.theta[n] = 293.0 + (n % 4);
  auto [theta, rep] =
      solve_thermal_step(prev.y, prev, 293.0, 0.1, m, mesh, cache, ThermalSolveConfig{});
  // The rectangle keeps DirichletHeat on its left edge, so restrict the check
  // to the balance functional itself.
  const double res = energy_balance_check(theta, prev.y, prev, 293.0, 0.1, m, mesh, cache);
  CHECK(res <= 1e-9);

  // Legacy variant under a rigid rotation: the source term heats the body by
  // exactly the dissipated increment (up to conduction through the inner ring).
  const Mesh ann = gen_annulus(1.0, 2.0, 2, 12);
  const FemCache acache = build_cache(ann);
  MaterialModel mv2 = nh_model(DissipationVariant::V2);
  mv2.k_cond = 0.01;
  const double tau = 2.0 * M_PI / 80.0;
  DirichletMotion motion;
  motion.kind = DirichletMotion::Kind::RigidRotation;
  motion.rotation_rate = 1.0;
  const auto nodes = boundary_nodes(ann, BoundaryTag::DirichletMech);
  std::vector<Vec2> targets;
  for (int n : nodes) targets.push_back(motion.apply(tau, ann.nodes[n]));
  auto update = motion.incremental_update(0.0, tau);
  const State aprev = reference_state(ann, 293.0);
  auto [yk, mrep] = solve_mech_step(aprev, mech_constraints(ann, nodes, targets), StepLoads{}, tau,
                                    mv2, ann, acache, MechSolveConfig{}, &update);
  auto [tk, trep] = solve_thermal_step(yk, aprev, 293.0, tau, mv2, ann, acache,
                                       ThermalSolveConfig{});
  const double balance = energy_balance_check(tk, yk, aprev, 293.0, tau, mv2, ann, acache);
  CHECK(balance <= 1e-9);
  const double w0 = integrate_internal_energy(aprev.theta, aprev.y, mv2, ann, acache);
  const double w1 = integrate_internal_energy(tk, yk, mv2, ann, acache);
  // tau * integral(h) = 2 D / tau for the legacy pairing with F-independent coupling.
  const double heating = 2.0 * mrep.dissipation / tau;
  // At the first step the temperature is uniform: no conduction loss yet at the
  // free nodes, only through the Dirichlet ring.
  CHECK(w1 - w0 == doctest::Approx(heating).epsilon(0.15));
  CHECK(w1 > w0);
}
