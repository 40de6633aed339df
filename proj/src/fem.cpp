#include "tve/fem.hpp"

#include <cmath>

namespace tve {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

const double kRefPts[4][2] = {
    {-kGauss, -kGauss}, {kGauss, -kGauss}, {kGauss, kGauss}, {-kGauss, kGauss}};

void shape_at(double xi, double eta, std::array<double, 4>& n, std::array<Vec2, 4>& dn_ref) {
  n = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta), 0.25 * (1 + xi) * (1 + eta),
       0.25 * (1 - xi) * (1 + eta)};
  dn_ref[0] = Vec2(-(1 - eta), -(1 - xi)) * 0.25;
  dn_ref[1] = Vec2((1 - eta), -(1 + xi)) * 0.25;
  dn_ref[2] = Vec2((1 + eta), (1 + xi)) * 0.25;
  dn_ref[3] = Vec2(-(1 + eta), (1 - xi)) * 0.25;
}

QuadraturePoint quad_point_at(const Mesh& mesh, int elem, double xi, double eta) {
  QuadraturePoint qp;
  qp.ref_coords = Vec2(xi, eta);
  std::array<Vec2, 4> dn_ref;
  shape_at(xi, eta, qp.shape, dn_ref);
  Mat2 jac = Mat2::Zero();
  const auto& el = mesh.elements[elem];
  for (int a = 0; a < 4; ++a) jac += mesh.nodes[el[a]] * dn_ref[a].transpose();
  const double det = jac.determinant();
  if (!(det > 0.0))
    fail(ErrorCode::DegenerateElement,
         "nonpositive Jacobian in element " + std::to_string(elem));
  const Mat2 jinv_t = jac.inverse().transpose();
  for (int a = 0; a < 4; ++a) qp.grad[a] = jinv_t * dn_ref[a];
  qp.weight = det;  // reference weight is 1 at each of the four points
  return qp;
}

// Edge quadrature: two Gauss points on the segment between two boundary nodes.
struct EdgePoint {
  double weight;    // includes the length element
  double shape[2];  // endpoint hat values
  Vec2 pos;
};

std::array<EdgePoint, 2> edge_quadrature(const Mesh& mesh, const BoundaryEdge& edge) {
  const Vec2 a = mesh.nodes[edge.n0];
  const Vec2 b = mesh.nodes[edge.n1];
  const double half_len = 0.5 * (b - a).norm();
  std::array<EdgePoint, 2> pts;
  const double s[2] = {-kGauss, kGauss};
  for (int i = 0; i < 2; ++i) {
    const double n0 = 0.5 * (1 - s[i]);
    const double n1 = 0.5 * (1 + s[i]);
    pts[i] = {half_len, {n0, n1}, n0 * a + n1 * b};
  }
  return pts;
}

Mat3 lifted_gradient(const Eigen::VectorXd& y, const std::array<int, 4>& el,
                     const QuadraturePoint& qp) {
  return lift_plane_strain(deformation_gradient(y, el, qp));
}

}  // namespace

ElementQuadrature gauss_2x2(const Mesh& mesh, int elem) {
  ElementQuadrature eq;
  for (int q = 0; q < 4; ++q) eq[q] = quad_point_at(mesh, elem, kRefPts[q][0], kRefPts[q][1]);
  return eq;
}

FemCache build_cache(const Mesh& mesh) {
  FemCache cache;
  cache.elem_quad.reserve(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    cache.elem_quad.push_back(gauss_2x2(mesh, e));
    for (const auto& qp : cache.elem_quad.back()) cache.area += qp.weight;
  }
  return cache;
}

State reference_state(const Mesh& mesh, double theta0) {
  State s;
  s.y.resize(mesh.dof_count());
  for (int n = 0; n < mesh.node_count(); ++n) s.y.segment<2>(2 * n) = mesh.nodes[n];
  s.theta = Eigen::VectorXd::Constant(mesh.node_count(), theta0);
  return s;
}

Mat2 deformation_gradient(const Eigen::VectorXd& y, const std::array<int, 4>& el,
                          const QuadraturePoint& qp) {
  Mat2 f = Mat2::Zero();
  for (int a = 0; a < 4; ++a) f += y.segment<2>(2 * el[a]) * qp.grad[a].transpose();
  return f;
}

Mat2 deformation_gradient_at(const Mesh& mesh, int elem, const Eigen::VectorXd& y, double xi,
                             double eta) {
  const QuadraturePoint qp = quad_point_at(mesh, elem, xi, eta);
  return deformation_gradient(y, mesh.elements[elem], qp);
}

double interpolate(const Eigen::VectorXd& nodal, const std::array<int, 4>& el,
                   const QuadraturePoint& qp) {
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += nodal[el[a]] * qp.shape[a];
  return v;
}

int DofConstraints::free_count() const {
  int n = 0;
  for (char f : fixed) n += f ? 0 : 1;
  return n;
}

Eigen::VectorXd DofConstraints::reduce(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(free_count());
  int k = 0;
  for (int i = 0; i < int(fixed.size()); ++i)
    if (!fixed[i]) r[k++] = full[i];
  return r;
}

Eigen::VectorXd DofConstraints::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd full(fixed.size());
  int k = 0;
  for (int i = 0; i < int(fixed.size()); ++i) full[i] = fixed[i] ? values[i] : reduced[k++];
  return full;
}

void DofConstraints::apply(Eigen::VectorXd& full) const {
  for (int i = 0; i < int(fixed.size()); ++i)
    if (fixed[i]) full[i] = values[i];
}

Eigen::VectorXd assemble_mech_loads(const Mesh& mesh, const FemCache& cache,
                                    const StepLoads& loads) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.dof_count());
  if (!loads.body_force.isZero()) {
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& el = mesh.elements[e];
      for (const auto& qp : cache.elem_quad[e])
        for (int a = 0; a < 4; ++a)
          load.segment<2>(2 * el[a]) += qp.weight * qp.shape[a] * loads.body_force;
    }
  }
  if (!loads.traction.isZero()) {
    for (const auto& edge : mesh.boundary_edges) {
      if (!has_tag(edge.tags, BoundaryTag::NeumannTraction)) continue;
      for (const auto& ep : edge_quadrature(mesh, edge)) {
        load.segment<2>(2 * edge.n0) += ep.weight * ep.shape[0] * loads.traction;
        load.segment<2>(2 * edge.n1) += ep.weight * ep.shape[1] * loads.traction;
      }
    }
  }
  return load;
}

std::optional<double> mech_incremental_energy_guarded(
    const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
    const Eigen::VectorXd& theta_prev, const Eigen::VectorXd& load_vector, double tau,
    const MaterialModel& m, const Mesh& mesh, const FemCache& cache) {
  double acc = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const Mat2 f2 = deformation_gradient(y_trial, el, qp);
      if (!(f2.determinant() > 0.0)) return std::nullopt;
      const Mat3 f = lift_plane_strain(f2);
      const Mat3 fp = lifted_gradient(y_prev, el, qp);
      const double th = interpolate(theta_prev, el, qp);
      double density = elastic_energy(f, m) + coupling_energy(f, th, m) +
                       dissipation_density(fp, f, th, m) / (2.0 * tau);
      acc += qp.weight * density;
    }
  }
  return acc - load_vector.dot(y_trial);
}

double mech_incremental_energy(const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
                               const Eigen::VectorXd& theta_prev,
                               const Eigen::VectorXd& load_vector, double tau,
                               const MaterialModel& m, const Mesh& mesh, const FemCache& cache) {
  auto v = mech_incremental_energy_guarded(y_trial, y_prev, theta_prev, load_vector, tau, m, mesh,
                                           cache);
  if (!v) fail(ErrorCode::NonPositiveDeterminant, "mech_incremental_energy: infeasible trial");
  return *v;
}

Eigen::VectorXd mech_residual(const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
                              const Eigen::VectorXd& theta_prev,
                              const Eigen::VectorXd& load_vector, double tau,
                              const MaterialModel& m, const Mesh& mesh, const FemCache& cache) {
  Eigen::VectorXd r = -load_vector;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const Mat2 f2 = deformation_gradient(y_trial, el, qp);
      if (!(f2.determinant() > 0.0))
        fail(ErrorCode::NonPositiveDeterminant,
             "mech_residual: det <= 0 in element " + std::to_string(e));
      const Mat3 f = lift_plane_strain(f2);
      const Mat3 fp = lifted_gradient(y_prev, el, qp);
      const double th = interpolate(theta_prev, el, qp);
      Mat3 p = elastic_stress(f, m) + coupling_stress(f, th, m) +
               dissipation_dF2(fp, f, th, m) / (2.0 * tau);
      const Mat2 p2 = p.topLeftCorner<2, 2>();
      for (int a = 0; a < 4; ++a)
        r.segment<2>(2 * el[a]) += qp.weight * (p2 * qp.grad[a]);
    }
  }
  return r;
}

std::vector<Eigen::Triplet<double>> mech_tangent_triplets(
    const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
    const Eigen::VectorXd& theta_prev, double tau, const MaterialModel& m, const Mesh& mesh,
    const FemCache& cache) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.element_count() * 64);
  Eigen::Matrix<double, 8, 8> ke;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    ke.setZero();
    for (const auto& qp : cache.elem_quad[e]) {
      const Mat2 f2 = deformation_gradient(y_trial, el, qp);
      if (!(f2.determinant() > 0.0))
        fail(ErrorCode::NonPositiveDeterminant,
             "mech_tangent: det <= 0 in element " + std::to_string(e));
      const Mat3 f = lift_plane_strain(f2);
      const Mat3 fp = lifted_gradient(y_prev, el, qp);
      const double th = interpolate(theta_prev, el, qp);
      for (int b = 0; b < 4; ++b) {
        for (int j = 0; j < 2; ++j) {
          Mat2 dir2 = Mat2::Zero();
          dir2.row(j) = qp.grad[b].transpose();
          Mat3 dir = Mat3::Zero();
          dir.topLeftCorner<2, 2>() = dir2;
          Mat3 dp = elastic_stress_diff(f, dir, m) + coupling_stress_diff(f, dir, th, m) +
                    dissipation_dF2_diff(fp, f, dir, th, m) / (2.0 * tau);
          const Mat2 dp2 = dp.topLeftCorner<2, 2>();
          for (int a = 0; a < 4; ++a) {
            const Vec2 row = dp2 * qp.grad[a];
            ke(2 * a + 0, 2 * b + j) += qp.weight * row[0];
            ke(2 * a + 1, 2 * b + j) += qp.weight * row[1];
          }
        }
      }
    }
    ke = 0.5 * (ke + ke.transpose()).eval();
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 2; ++i)
        for (int b = 0; b < 4; ++b)
          for (int j = 0; j < 2; ++j)
            trips.emplace_back(2 * el[a] + i, 2 * el[b] + j, ke(2 * a + i, 2 * b + j));
  }
  return trips;
}

ThermalStepData prepare_thermal_step(const Eigen::VectorXd& y_k, const Eigen::VectorXd& y_prev,
                                     const Eigen::VectorXd& theta_prev, double theta_flat,
                                     double tau, const MaterialModel& m, const Mesh& mesh,
                                     const FemCache& cache) {
  ThermalStepData data;
  data.tau = tau;
  data.theta_flat = theta_flat;
  const size_t nqp = size_t(mesh.element_count()) * 4;
  data.f_k.reserve(nqp);
  data.w_prev.reserve(nqp);
  data.conductivity.reserve(nqp);
  data.h_src.reserve(nqp);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const Mat3 fk = lifted_gradient(y_k, el, qp);
      const Mat3 fp = lifted_gradient(y_prev, el, qp);
      const double thp = std::max(interpolate(theta_prev, el, qp), 0.0);
      data.f_k.push_back(fk);
      data.w_prev.push_back(internal_energy(fp, thp, m));
      data.conductivity.push_back(conductivity_pullback(fp, thp, m));
      data.h_src.push_back(heat_source_h_tau(fk, fp, thp, tau, m));
    }
  }
  return data;
}

double thermal_functional(const Eigen::VectorXd& theta, const ThermalStepData& data,
                          const MaterialModel& m, const Mesh& mesh, const FemCache& cache) {
  double acc = 0.0;
  size_t q = 0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const double th = interpolate(theta, el, qp);
      Vec2 grad_th = Vec2::Zero();
      for (int a = 0; a < 4; ++a) grad_th += theta[el[a]] * qp.grad[a];
      const Mat2 kk = data.conductivity[q].topLeftCorner<2, 2>();
      double density = (internal_energy_integral(data.f_k[q], th, m) - data.w_prev[q] * th) /
                           data.tau +
                       0.5 * grad_th.dot(kk * grad_th) - data.h_src[q] * th;
      acc += qp.weight * density;
      ++q;
    }
  }
  if (m.kappa > 0.0) {
    for (const auto& edge : mesh.boundary_edges) {
      if (!has_tag(edge.tags, BoundaryTag::RobinHeat)) continue;
      for (const auto& ep : edge_quadrature(mesh, edge)) {
        const double th = ep.shape[0] * theta[edge.n0] + ep.shape[1] * theta[edge.n1];
        const double d = th - data.theta_flat;
        acc += 0.5 * m.kappa * ep.weight * d * d;
      }
    }
  }
  return acc;
}

Eigen::VectorXd thermal_residual(const Eigen::VectorXd& theta, const ThermalStepData& data,
                                 const MaterialModel& m, const Mesh& mesh, const FemCache& cache) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.node_count());
  size_t q = 0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const double th = interpolate(theta, el, qp);
      Vec2 grad_th = Vec2::Zero();
      for (int a = 0; a < 4; ++a) grad_th += theta[el[a]] * qp.grad[a];
      const Mat2 kk = data.conductivity[q].topLeftCorner<2, 2>();
      const double bulk =
          (internal_energy(data.f_k[q], std::max(th, 0.0), m) - data.w_prev[q]) / data.tau -
          data.h_src[q];
      const Vec2 flux = kk * grad_th;
      for (int a = 0; a < 4; ++a)
        r[el[a]] += qp.weight * (bulk * qp.shape[a] + flux.dot(qp.grad[a]));
      ++q;
    }
  }
  if (m.kappa > 0.0) {
    for (const auto& edge : mesh.boundary_edges) {
      if (!has_tag(edge.tags, BoundaryTag::RobinHeat)) continue;
      for (const auto& ep : edge_quadrature(mesh, edge)) {
        const double th = ep.shape[0] * theta[edge.n0] + ep.shape[1] * theta[edge.n1];
        const double d = m.kappa * ep.weight * (th - data.theta_flat);
        r[edge.n0] += d * ep.shape[0];
        r[edge.n1] += d * ep.shape[1];
      }
    }
  }
  return r;
}

std::vector<Eigen::Triplet<double>> thermal_tangent_triplets(const Eigen::VectorXd& theta,
                                                             const ThermalStepData& data,
                                                             const MaterialModel& m,
                                                             const Mesh& mesh,
                                                             const FemCache& cache) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.element_count() * 16 + 8 * mesh.boundary_edges.size());
  size_t q = 0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const double th = interpolate(theta, el, qp);
      const double cap = heat_capacity(data.f_k[q], std::max(th, 0.0), m);
      const Mat2 kk = data.conductivity[q].topLeftCorner<2, 2>();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double v = qp.weight * (cap / data.tau * qp.shape[a] * qp.shape[b] +
                                        qp.grad[a].dot(kk * qp.grad[b]));
          trips.emplace_back(el[a], el[b], v);
        }
      ++q;
    }
  }
  if (m.kappa > 0.0) {
    for (const auto& edge : mesh.boundary_edges) {
      if (!has_tag(edge.tags, BoundaryTag::RobinHeat)) continue;
      for (const auto& ep : edge_quadrature(mesh, edge)) {
        const int n[2] = {edge.n0, edge.n1};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            trips.emplace_back(n[a], n[b], m.kappa * ep.weight * ep.shape[a] * ep.shape[b]);
      }
    }
  }
  return trips;
}

SparseSystem reduce_system(const std::vector<Eigen::Triplet<double>>& triplets,
                           const Eigen::VectorXd& residual, const DofConstraints& bc) {
  const int n = int(bc.fixed.size());
  std::vector<int> map(n, -1);
  int k = 0;
  for (int i = 0; i < n; ++i)
    if (!bc.fixed[i]) map[i] = k++;
  std::vector<Eigen::Triplet<double>> reduced;
  reduced.reserve(triplets.size());
  for (const auto& t : triplets) {
    const int r = map[t.row()], c = map[t.col()];
    if (r >= 0 && c >= 0) reduced.emplace_back(r, c, t.value());
  }
  SparseSystem sys;
  sys.matrix.resize(k, k);
  sys.matrix.setFromTriplets(reduced.begin(), reduced.end());
  sys.rhs = bc.reduce(residual);
  return sys;
}

double integrate_internal_energy(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                                 const MaterialModel& m, const Mesh& mesh, const FemCache& cache) {
  double acc = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const Mat3 f = lifted_gradient(y, el, qp);
      acc += qp.weight * internal_energy(f, std::max(interpolate(theta, el, qp), 0.0), m);
    }
  }
  return acc;
}

double integrate_dissipation(const Eigen::VectorXd& y_prev, const Eigen::VectorXd& y_k,
                             const Eigen::VectorXd& theta_prev, const MaterialModel& m,
                             const Mesh& mesh, const FemCache& cache) {
  double acc = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.elements[e];
    for (const auto& qp : cache.elem_quad[e]) {
      const Mat3 fp = lifted_gradient(y_prev, el, qp);
      const Mat3 fk = lifted_gradient(y_k, el, qp);
      acc += qp.weight * dissipation_density(fp, fk, interpolate(theta_prev, el, qp), m);
    }
  }
  return 0.5 * acc;
}

}  // namespace tve
