#pragma once

#include <Eigen/Sparse>
#include <optional>

#include "tve/materials.hpp"
#include "tve/mesh.hpp"

namespace tve {

struct QuadraturePoint {
  Vec2 ref_coords;
  double weight = 0.0;              // includes the Jacobian determinant
  std::array<double, 4> shape{};    // partition of unity
  std::array<Vec2, 4> grad{};       // physical shape gradients
};

using ElementQuadrature = std::array<QuadraturePoint, 4>;

// 2x2 Gauss rule on one element; throws DegenerateElement on nonpositive Jacobian.
ElementQuadrature gauss_2x2(const Mesh& mesh, int elem);

struct FemCache {
  std::vector<ElementQuadrature> elem_quad;
  double area = 0.0;
};

FemCache build_cache(const Mesh& mesh);

struct State {
  Eigen::VectorXd y;      // nodal deformation, 2 per node
  Eigen::VectorXd theta;  // nodal temperature
  double time = 0.0;
};

State reference_state(const Mesh& mesh, double theta0);

// In-plane deformation gradient at one quadrature point.
Mat2 deformation_gradient(const Eigen::VectorXd& y, const std::array<int, 4>& elem,
                          const QuadraturePoint& qp);
// Same, at arbitrary reference coordinates of an element.
Mat2 deformation_gradient_at(const Mesh& mesh, int elem, const Eigen::VectorXd& y, double xi,
                             double eta);
double interpolate(const Eigen::VectorXd& nodal, const std::array<int, 4>& elem,
                   const QuadraturePoint& qp);

// Loads already averaged over one time step.
struct StepLoads {
  Vec2 body_force = Vec2::Zero();  // constant over the body
  Vec2 traction = Vec2::Zero();    // constant over the traction boundary
  double theta_flat = 0.0;         // external boundary temperature
};

struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

// Fixed-value constraints over a flat dof vector.
struct DofConstraints {
  std::vector<char> fixed;   // one flag per dof
  Eigen::VectorXd values;    // target values at fixed dofs

  int free_count() const;
  Eigen::VectorXd reduce(const Eigen::VectorXd& full) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
  void apply(Eigen::VectorXd& full) const;  // overwrite fixed entries
};

// External mechanical load vector: body force plus Neumann traction.
Eigen::VectorXd assemble_mech_loads(const Mesh& mesh, const FemCache& cache,
                                    const StepLoads& loads);

// Incremental mechanical energy of a trial deformation against the previous state.
double mech_incremental_energy(const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
                               const Eigen::VectorXd& theta_prev,
                               const Eigen::VectorXd& load_vector, double tau,
                               const MaterialModel& m, const Mesh& mesh, const FemCache& cache);
// Same, but reports infeasible trials (det <= 0 somewhere) as nullopt.
std::optional<double> mech_incremental_energy_guarded(
    const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
    const Eigen::VectorXd& theta_prev, const Eigen::VectorXd& load_vector, double tau,
    const MaterialModel& m, const Mesh& mesh, const FemCache& cache);

// Full-length gradient of the incremental energy (includes -load_vector).
Eigen::VectorXd mech_residual(const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
                              const Eigen::VectorXd& theta_prev,
                              const Eigen::VectorXd& load_vector, double tau,
                              const MaterialModel& m, const Mesh& mesh, const FemCache& cache);

std::vector<Eigen::Triplet<double>> mech_tangent_triplets(
    const Eigen::VectorXd& y_trial, const Eigen::VectorXd& y_prev,
    const Eigen::VectorXd& theta_prev, double tau, const MaterialModel& m, const Mesh& mesh,
    const FemCache& cache);

// Frozen per-step data for the thermal minimization.
struct ThermalStepData {
  double tau = 0.0;
  double theta_flat = 0.0;
  std::vector<Mat3> f_k;          // per qp, lifted
  std::vector<double> w_prev;     // internal energy at the previous state
  std::vector<Mat3> conductivity; // pulled back, frozen at the previous state
  std::vector<double> h_src;      // discrete heat source
};

ThermalStepData prepare_thermal_step(const Eigen::VectorXd& y_k, const Eigen::VectorXd& y_prev,
                                     const Eigen::VectorXd& theta_prev, double theta_flat,
                                     double tau, const MaterialModel& m, const Mesh& mesh,
                                     const FemCache& cache);

double thermal_functional(const Eigen::VectorXd& theta, const ThermalStepData& data,
                          const MaterialModel& m, const Mesh& mesh, const FemCache& cache);
Eigen::VectorXd thermal_residual(const Eigen::VectorXd& theta, const ThermalStepData& data,
                                 const MaterialModel& m, const Mesh& mesh, const FemCache& cache);
std::vector<Eigen::Triplet<double>> thermal_tangent_triplets(const Eigen::VectorXd& theta,
                                                             const ThermalStepData& data,
                                                             const MaterialModel& m,
                                                             const Mesh& mesh,
                                                             const FemCache& cache);

// Assemble the reduced system over free dofs from full-length triplets/residual.
SparseSystem reduce_system(const std::vector<Eigen::Triplet<double>>& triplets,
                           const Eigen::VectorXd& residual, const DofConstraints& bc);

// Domain integrals used for diagnostics.
double integrate_internal_energy(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                                 const MaterialModel& m, const Mesh& mesh, const FemCache& cache);
double integrate_dissipation(const Eigen::VectorXd& y_prev, const Eigen::VectorXd& y_k,
                             const Eigen::VectorXd& theta_prev, const MaterialModel& m,
                             const Mesh& mesh, const FemCache& cache);

}  // namespace tve
