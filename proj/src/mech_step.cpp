#include "tve/mech_step.hpp"

#include <Eigen/SparseCholesky>

namespace tve {

namespace {

bool all_dets_positive(const Eigen::VectorXd& y, const Mesh& mesh, const FemCache& cache) {
  for (int e = 0; e < mesh.element_count(); ++e)
    for (const auto& qp : cache.elem_quad[e])
      if (!(deformation_gradient(y, mesh.elements[e], qp).determinant() > 0.0)) return false;
  return true;
}

// Least-squares affine fit x -> A x + b of the boundary update old -> new.
bool fit_affine_update(const std::vector<Vec2>& from, const std::vector<Vec2>& to, Mat2& a,
                       Vec2& b) {
  if (from.size() < 3) return false;
  Eigen::MatrixXd lhs(2 * from.size(), 6);
  Eigen::VectorXd rhs(2 * from.size());
  for (size_t i = 0; i < from.size(); ++i) {
    lhs.row(2 * i) << from[i].x(), from[i].y(), 0, 0, 1, 0;
    lhs.row(2 * i + 1) << 0, 0, from[i].x(), from[i].y(), 0, 1;
    rhs[2 * i] = to[i].x();
    rhs[2 * i + 1] = to[i].y();
  }
  Eigen::VectorXd sol = lhs.colPivHouseholderQr().solve(rhs);
  a << sol[0], sol[1], sol[2], sol[3];
  b << sol[4], sol[5];
  return a.determinant() > 0.0;
}

}  // namespace

DofConstraints mech_constraints(const Mesh& mesh, const std::vector<int>& nodes,
                                const std::vector<Vec2>& targets) {
  DofConstraints bc;
  bc.fixed.assign(mesh.dof_count(), 0);
  bc.values = Eigen::VectorXd::Zero(mesh.dof_count());
  for (size_t i = 0; i < nodes.size(); ++i) {
    bc.fixed[2 * nodes[i]] = 1;
    bc.fixed[2 * nodes[i] + 1] = 1;
    bc.values.segment<2>(2 * nodes[i]) = targets[i];
  }
  return bc;
}

Eigen::VectorXd feasible_init(const Eigen::VectorXd& y_prev, const DofConstraints& bc,
                              const Mesh& mesh, const FemCache& cache,
                              const std::function<Vec2(const Vec2&)>* rigid_update) {
  if (rigid_update) {
    Eigen::VectorXd y = y_prev;
    for (int n = 0; n < mesh.node_count(); ++n)
      y.segment<2>(2 * n) = (*rigid_update)(Vec2(y_prev.segment<2>(2 * n)));
    bc.apply(y);  // exact targets at constrained nodes
    if (all_dets_positive(y, mesh, cache)) return y;
  }

  Eigen::VectorXd y = y_prev;
  bc.apply(y);
  if (all_dets_positive(y, mesh, cache)) return y;

  // Boundary-only update folded the mesh; push the whole previous solution
  // through the affine map best fitting the Dirichlet increment.
  std::vector<Vec2> from, to;
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (bc.fixed[2 * n] && bc.fixed[2 * n + 1]) {
      from.push_back(Vec2(y_prev.segment<2>(2 * n)));
      to.push_back(Vec2(bc.values.segment<2>(2 * n)));
    }
  }
  Mat2 a;
  Vec2 b;
  if (fit_affine_update(from, to, a, b)) {
    Eigen::VectorXd ya = y_prev;
    for (int n = 0; n < mesh.node_count(); ++n)
      ya.segment<2>(2 * n) = a * Vec2(y_prev.segment<2>(2 * n)) + b;
    bc.apply(ya);
    if (all_dets_positive(ya, mesh, cache)) return ya;
  }
  fail(ErrorCode::InfeasibleInit, "feasible_init: no candidate keeps det > 0");
}

std::pair<Eigen::VectorXd, StepReport> solve_mech_step(
    const State& prev, const DofConstraints& bc, const StepLoads& loads, double tau,
    const MaterialModel& m, const Mesh& mesh, const FemCache& cache, const MechSolveConfig& cfg,
    const std::function<Vec2(const Vec2&)>* rigid_update) {
  const Eigen::VectorXd load_vec = assemble_mech_loads(mesh, cache, loads);
  Eigen::VectorXd y = feasible_init(prev.y, bc, mesh, cache, rigid_update);

  StepReport rep;
  auto energy = [&](const Eigen::VectorXd& yt) {
    return mech_incremental_energy_guarded(yt, prev.y, prev.theta, load_vec, tau, m, mesh, cache);
  };
  double e_cur = energy(y).value();
  rep.energy_before = e_cur;

  const double load_scale = 1.0 + bc.reduce(load_vec).norm();
  double residual_norm = 0.0;
  bool converged = false;

  for (int iter = 0; iter <= cfg.max_newton; ++iter) {
    const Eigen::VectorXd r_full =
        mech_residual(y, prev.y, prev.theta, load_vec, tau, m, mesh, cache);
    const Eigen::VectorXd r = bc.reduce(r_full);
    residual_norm = r.norm();
    rep.newton_iters = iter;
    if (residual_norm <= cfg.tol_residual * load_scale) {
      converged = true;
      break;
    }
    if (iter == cfg.max_newton) break;

    const auto trips = mech_tangent_triplets(y, prev.y, prev.theta, tau, m, mesh, cache);
    SparseSystem sys = reduce_system(trips, r_full, bc);

    double diag_scale = 0.0;
    for (int i = 0; i < sys.matrix.rows(); ++i) diag_scale += std::abs(sys.matrix.coeff(i, i));
    diag_scale = std::max(diag_scale / std::max<double>(double(sys.matrix.rows()), 1.0), 1e-30);

    Eigen::SparseMatrix<double> identity(sys.matrix.rows(), sys.matrix.cols());
    identity.setIdentity();

    double shift = cfg.hessian_regularization;
    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Eigen::SparseMatrix<double> k_shifted = sys.matrix;
      if (shift > 0.0) k_shifted += shift * identity;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k_shifted);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd d = ldlt.solve(-r);
        if (ldlt.info() == Eigen::Success && d.allFinite() && d.dot(r) < 0.0) {
          // Backtrack until the trial keeps det > 0 and does not raise the energy.
          double s = 1.0;
          for (int bt = 0; bt <= cfg.max_backtrack; ++bt) {
            Eigen::VectorXd y_trial = bc.expand(bc.reduce(y) + s * d);
            auto e_trial = energy(y_trial);
            if (e_trial && *e_trial <= e_cur + 1e-12 * (1.0 + std::abs(e_cur))) {
              y = y_trial;
              e_cur = *e_trial;
              accepted = true;
              rep.backtracks += bt;
              break;
            }
            s *= cfg.backtrack_factor;
          }
        }
      }
      if (!accepted) shift = (shift == 0.0) ? 1e-8 * diag_scale : shift * 10.0;
    }
    if (!accepted) {
      rep.final_residual = residual_norm;
      rep.energy_after = e_cur;
      rep.dissipation = integrate_dissipation(prev.y, y, prev.theta, m, mesh, cache);
      throw SolveFailure(ErrorCode::LineSearchFailed,
                         "mech step: no step keeps det > 0 and decreases the energy", y, rep);
    }
  }

  rep.final_residual = residual_norm;
  rep.energy_after = e_cur;
  rep.dissipation = integrate_dissipation(prev.y, y, prev.theta, m, mesh, cache);
  rep.energy_decrease_ok = e_cur <= rep.energy_before + 1e-10 * (1.0 + std::abs(rep.energy_before));
  if (!converged)
    throw SolveFailure(ErrorCode::MaxIterations, "mech step: Newton did not converge", y, rep);
  return {y, rep};
}

}  // namespace tve
