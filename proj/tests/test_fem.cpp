#include <doctest.h>

#include <set>

#include "tve/oracles.hpp"
#include "tve/thermal_step.hpp"

using namespace tve;

namespace {

double polygon_area(const Mesh& mesh) {
  double area = 0.0;
  for (const auto& el : mesh.elements) {
    double a = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Vec2& p = mesh.nodes[el[i]];
      const Vec2& q = mesh.nodes[el[(i + 1) % 4]];
      a += p.x() * q.y() - q.x() * p.y();
    }
    area += 0.5 * a;
  }
  return area;
}

Eigen::VectorXd identity_deformation(const Mesh& mesh) {
  return reference_state(mesh, 0.0).y;
}

MaterialModel basic_model() {
  MaterialModel m;
  m.c1 = 2.0;
  m.nu_visc = 0.8;
  m.k_cond = 0.5;
  return m;
}

}  // namespace

TEST_CASE("quadrature exactness") {
  const Mesh mesh = gen_rectangle(1.0, 1.0, 1, 1);
  const auto eq = gauss_2x2(mesh, 0);
  double area = 0.0, centroid_x = 0.0;
  for (const auto& qp : eq) {
    double x = 0.0;
    for (int a = 0; a < 4; ++a) x += qp.shape[a] * mesh.nodes[mesh.elements[0][a]].x();
    area += qp.weight;
    centroid_x += qp.weight * x;
    double shape_sum = qp.shape[0] + qp.shape[1] + qp.shape[2] + qp.shape[3];
    CHECK(shape_sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(centroid_x == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quadrature area matches the polygonal mesh area") {
  for (const Mesh& mesh : {gen_rectangle(2.0, 0.5, 7, 3), gen_annulus(1.0, 2.0, 4, 16)}) {
    const FemCache cache = build_cache(mesh);
    CHECK(cache.area == doctest::Approx(polygon_area(mesh)).epsilon(1e-12));
  }
}

TEST_CASE("deformation gradient of canonical maps") {
  const Mesh mesh = gen_annulus(1.0, 2.0, 2, 12);
  const FemCache cache = build_cache(mesh);
  const Eigen::VectorXd y_id = identity_deformation(mesh);

  Mat2 a;
  a << 1.2, 0.3, -0.1, 0.9;
  Eigen::VectorXd y_aff(mesh.dof_count());
  for (int n = 0; n < mesh.node_count(); ++n) y_aff.segment<2>(2 * n) = a * mesh.nodes[n];

  RandomSampler rs(71);
  const Mat2 q = rs.rotation2();
  Eigen::VectorXd y_rot(mesh.dof_count());
  for (int n = 0; n < mesh.node_count(); ++n) y_rot.segment<2>(2 * n) = q * mesh.nodes[n];

  for (int e = 0; e < mesh.element_count(); ++e) {
    for (const auto& qp : cache.elem_quad[e]) {
      CHECK((deformation_gradient(y_id, mesh.elements[e], qp) - Mat2::Identity()).norm() < 1e-13);
      CHECK((deformation_gradient(y_aff, mesh.elements[e], qp) - a).norm() < 1e-12);
      const Mat2 f = deformation_gradient(y_rot, mesh.elements[e], qp);
      CHECK((f - q).norm() < 1e-12);
      CHECK(f.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("patch test: affine Dirichlet data is stationary") {
  const Mesh mesh = gen_rectangle(1.0, 1.0, 3, 3);
  const FemCache cache = build_cache(mesh);
  const MaterialModel m = basic_model();

  Mat2 a;
  a << 1.1, 0.2, 0.05, 0.95;
  Eigen::VectorXd y_aff(mesh.dof_count());
  for (int n = 0; n < mesh.node_count(); ++n) y_aff.segment<2>(2 * n) = a * mesh.nodes[n];

  // No viscous history (previous state equals the trial), no loads.
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(mesh.node_count(), 300.0);
  const Eigen::VectorXd loads = Eigen::VectorXd::Zero(mesh.dof_count());
  const Eigen::VectorXd r = mech_residual(y_aff, y_aff, theta, loads, 0.1, m, mesh, cache);

  std::set<int> boundary;
  for (const auto& e : mesh.boundary_edges) {
    boundary.insert(e.n0);
    boundary.insert(e.n1);
  }
  const double stress_scale = elastic_stress(lift_plane_strain(a), m).norm();
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (boundary.count(n)) continue;
    CHECK(r.segment<2>(2 * n).norm() <= 1e-12 * std::max(1.0, stress_scale));
  }
}

TEST_CASE("incremental energy special cases") {
  const Mesh mesh = gen_rectangle(1.0, 0.5, 4, 2);
  const FemCache cache = build_cache(mesh);
  const MaterialModel m = basic_model();
  const Eigen::VectorXd y = identity_deformation(mesh);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(mesh.node_count(), 293.0);
  const Eigen::VectorXd no_loads = Eigen::VectorXd::Zero(mesh.dof_count());

  // Stress-free identity start: only the coupling term remains.
  const double e0 = mech_incremental_energy(y, y, theta, no_loads, 0.1, m, mesh, cache);
  const double expected = cache.area * coupling_energy(Mat3::Identity(), 293.0, m);
  CHECK(e0 == doctest::Approx(expected).epsilon(1e-12));

  // Infeasible trial reports the failure.
  Eigen::VectorXd folded = y;
  folded[0] = 5.0;  // drags one corner across the element
  CHECK(!mech_incremental_energy_guarded(folded, y, theta, no_loads, 0.1, m, mesh, cache)
             .has_value());
  CHECK_THROWS_AS(
      (void)mech_incremental_energy(folded, y, theta, no_loads, 0.1, m, mesh, cache), Error);
}

TEST_CASE("mechanical residual and tangent match finite differences") {
  const Mesh mesh = gen_rectangle(1.0, 1.0, 2, 2);
  const FemCache cache = build_cache(mesh);
  MaterialModel m = basic_model();
  RandomSampler rs(83);

  for (auto variant : {DissipationVariant::V1, DissipationVariant::V2}) {
    m.dissipation_variant = variant;
    Eigen::VectorXd y_prev = identity_deformation(mesh);
    Eigen::VectorXd y = y_prev;
    for (int i = 0; i < y.size(); ++i) y[i] += rs.uniform(-0.04, 0.04);
    Eigen::VectorXd theta(mesh.node_count());
    for (int n = 0; n < theta.size(); ++n) theta[n] = rs.uniform(280.0, 320.0);
    Eigen::VectorXd loads(mesh.dof_count());
    for (int i = 0; i < loads.size(); ++i) loads[i] = rs.uniform(-0.01, 0.01);
    const double tau = 0.05;

    const Eigen::VectorXd r = mech_residual(y, y_prev, theta, loads, tau, m, mesh, cache);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd d(y.size());
      for (int i = 0; i < d.size(); ++i) d[i] = rs.uniform(-1.0, 1.0);
      d.normalize();
      const double h = 1e-6;
      const double ep =
          mech_incremental_energy(y + h * d, y_prev, theta, loads, tau, m, mesh, cache);
      const double em =
          mech_incremental_energy(y - h * d, y_prev, theta, loads, tau, m, mesh, cache);
      const double fd = (ep - em) / (2 * h);
      CHECK(r.dot(d) == doctest::Approx(fd).epsilon(2e-6));
    }

    const auto trips = mech_tangent_triplets(y, y_prev, theta, tau, m, mesh, cache);
    Eigen::SparseMatrix<double> k(mesh.dof_count(), mesh.dof_count());
    k.setFromTriplets(trips.begin(), trips.end());
    const Eigen::MatrixXd kd(k);
    CHECK((kd - kd.transpose()).norm() <= 1e-10 * kd.norm());
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd d(y.size());
      for (int i = 0; i < d.size(); ++i) d[i] = rs.uniform(-1.0, 1.0);
      d.normalize();
      const double h = 1e-6;
      const Eigen::VectorXd rp =
          mech_residual(y + h * d, y_prev, theta, loads, tau, m, mesh, cache);
      const Eigen::VectorXd rm =
          mech_residual(y - h * d, y_prev, theta, loads, tau, m, mesh, cache);
      const Eigen::VectorXd fd = (rp - rm) / (2 * h);
      const Eigen::VectorXd kdd = k * d;
      CHECK((kdd - fd).norm() <= 1e-5 * std::max(1.0, kdd.norm()));
    }

    // Locality: tangent entries only couple nodes sharing an element.
    std::set<std::pair<int, int>> allowed;
    for (const auto& el : mesh.elements)
      for (int a : el)
        for (int b : el) allowed.insert({a, b});
    for (const auto& t : trips)
      CHECK(allowed.count({int(t.row()) / 2, int(t.col()) / 2}) == 1);
  }
}

TEST_CASE("thermal functional, residual, and tangent") {
  const Mesh mesh = gen_rectangle(1.0, 1.0, 3, 2);
  const FemCache cache = build_cache(mesh);
  MaterialModel m = basic_model();
  RandomSampler rs(97);

  Eigen::VectorXd y_prev = identity_deformation(mesh);
  Eigen::VectorXd y_k = y_prev;
  for (int i = 0; i < y_k.size(); ++i) y_k[i] += rs.uniform(-0.03, 0.03);
  Eigen::VectorXd theta_prev(mesh.node_count());
  for (int n = 0; n < theta_prev.size(); ++n) theta_prev[n] = rs.uniform(280.0, 320.0);
  const double tau = 0.02;
  m.kappa = 0.3;

  const ThermalStepData data =
      prepare_thermal_step(y_k, y_prev, theta_prev, 293.0, tau, m, mesh, cache);

  // Residual is the gradient of the functional.
  Eigen::VectorXd theta = theta_prev;
  const Eigen::VectorXd r = thermal_residual(theta, data, m, mesh, cache);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd d(theta.size());
    for (int i = 0; i < d.size(); ++i) d[i] = rs.uniform(-1.0, 1.0);
    d.normalize();
    const double h = 1e-5;
    const double fp = thermal_functional(theta + h * d, data, m, mesh, cache);
    const double fm = thermal_functional(theta - h * d, data, m, mesh, cache);
    CHECK(r.dot(d) == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6));
  }

  // Tangent: symmetric positive definite, and the derivative of the residual.
  const auto trips = thermal_tangent_triplets(theta, data, m, mesh, cache);
  Eigen::SparseMatrix<double> k(mesh.node_count(), mesh.node_count());
  k.setFromTriplets(trips.begin(), trips.end());
  const Eigen::MatrixXd kd(k);
  CHECK((kd - kd.transpose()).norm() <= 1e-12 * kd.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kd);
  CHECK(es.eigenvalues()(0) > 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd d(theta.size());
    for (int i = 0; i < d.size(); ++i) d[i] = rs.uniform(-1.0, 1.0);
    d.normalize();
    const double h = 1e-5;
    const Eigen::VectorXd rp = thermal_residual(theta + h * d, data, m, mesh, cache);
    const Eigen::VectorXd rm = thermal_residual(theta - h * d, data, m, mesh, cache);
    CHECK((k * d - (rp - rm) / (2 * h)).norm() <= 1e-6 * std::max(1.0, (k * d).norm()));
  }

  // Row sum identity: summing all residual rows reproduces the balance terms.
  double direct = 0.0;
  size_t q = 0;
  for (int e = 0; e < mesh.element_count(); ++e)
    for (const auto& qp : cache.elem_quad[e]) {
      const double th = interpolate(theta, mesh.elements[e], qp);
      direct += qp.weight *
                ((internal_energy(data.f_k[q], th, m) - data.w_prev[q]) / tau - data.h_src[q]);
      ++q;
    }
  for (const auto& edge : mesh.boundary_edges) {
    if (!has_tag(edge.tags, BoundaryTag::RobinHeat)) continue;
    const double len = (mesh.nodes[edge.n1] - mesh.nodes[edge.n0]).norm();
    // Exact edge integral of the linear interpolant.
    direct += m.kappa * len * (0.5 * (theta[edge.n0] + theta[edge.n1]) - data.theta_flat);
  }
  CHECK(r.sum() == doctest::Approx(direct).epsilon(1e-10));
}
