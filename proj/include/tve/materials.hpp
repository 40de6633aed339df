#pragma once

#include <string>
#include <vector>

#include "tve/tensor.hpp"

namespace tve {

enum class MaterialKind { SimpleNeoHookean, Sma };
enum class DissipationVariant { V1, V2 };
enum class HeatSourceVariant { Vh1, Vh2 };

// Pointwise densities are evaluated on lifted 3x3 deformation gradients
// (plane strain): callers pass lift_plane_strain(F2).
struct MaterialModel {
  MaterialKind kind = MaterialKind::SimpleNeoHookean;
  double mu = 1.0;       // shear modulus
  double lambda = 1.0;   // bulk-type modulus
  double c1 = 1.0;       // thermal coupling constant
  double eps = 0.0;      // martensite shear parameter (Sma only)
  double nu_visc = 1.0;  // viscosity constant
  double k_cond = 1.0;   // heat conductivity
  double kappa = 0.0;    // boundary heat-transfer coefficient
  DissipationVariant dissipation_variant = DissipationVariant::V1;
  HeatSourceVariant heat_source_variant = HeatSourceVariant::Vh1;

  std::vector<std::string> validate() const;  // all violations, empty if valid
  void require_valid() const;                 // throws ValidationError listing every violation
};

constexpr double kThetaFloor = 1e-12;

// In-plane simple shear by gamma (unit out-of-plane block).
Mat3 simple_shear(double gamma);

// Sheared compressible neo-Hookean well: zero exactly on SO(3)*simple_shear(-gamma).
double well_energy(const Mat3& f, double gamma, double mu, double lambda);
Mat3 well_stress(const Mat3& f, double gamma, double mu, double lambda);
// Directional derivative of well_stress at f in direction df.
Mat3 well_stress_diff(const Mat3& f, const Mat3& df, double gamma, double mu, double lambda);
// Gradient of the same well expressed in the right Cauchy-Green strain c = F^T F.
Mat3 well_stress_c(const Mat3& c, double gamma, double mu, double lambda);

double neo_hookean_energy(const Mat3& f, double mu, double lambda);
double austenite_energy(const Mat3& f, const MaterialModel& m);
double martensite_energy(const Mat3& f, const MaterialModel& m);
// Branch selected at f; ties go to the +eps well.
double martensite_branch(const Mat3& f, const MaterialModel& m);

double elastic_energy(const Mat3& f, const MaterialModel& m);
Mat3 elastic_stress(const Mat3& f, const MaterialModel& m);
Mat3 elastic_stress_diff(const Mat3& f, const Mat3& df, const MaterialModel& m);

// Austenite volume fraction a(theta) = theta/(1+theta) and derivatives.
double austenite_fraction(double theta);
double austenite_fraction_d1(double theta);
double austenite_fraction_d2(double theta);

double coupling_energy(const Mat3& f, double theta, const MaterialModel& m);
Mat3 coupling_stress(const Mat3& f, double theta, const MaterialModel& m);
Mat3 coupling_stress_diff(const Mat3& f, const Mat3& df, double theta, const MaterialModel& m);
// Strain-space coupling gradient; satisfies coupling_stress = 2 F * coupling_stress_c.
Mat3 coupling_stress_c(const Mat3& f, double theta, const MaterialModel& m);
double coupling_dtheta(const Mat3& f, double theta, const MaterialModel& m);
Mat3 coupling_dF_dtheta(const Mat3& f, double theta, const MaterialModel& m);

// Internal energy density, its antiderivative in theta, and the heat capacity.
double internal_energy(const Mat3& f, double theta, const MaterialModel& m);
double internal_energy_integral(const Mat3& f, double theta, const MaterialModel& m);
double heat_capacity(const Mat3& f, double theta, const MaterialModel& m);

// Incremental dissipation density between two gradients (variant per model).
double dissipation_density(const Mat3& f1, const Mat3& f2, double theta, const MaterialModel& m);
Mat3 dissipation_dF2(const Mat3& f1, const Mat3& f2, double theta, const MaterialModel& m);
Mat3 dissipation_dF2_diff(const Mat3& f1, const Mat3& f2, const Mat3& df2, double theta,
                          const MaterialModel& m);

// Dissipation rate xi = dR/dFdot : Fdot = V Cdot : Cdot = 2R.
double xi_rate(const Mat3& f, const Mat3& fdot, double theta, const MaterialModel& m);
Mat3 viscous_stress(const Mat3& f, const Mat3& fdot, double theta, const MaterialModel& m);

// Discrete heat source (variant per model); may be negative (adiabatic sink).
double heat_source_h_tau(const Mat3& f_k, const Mat3& f_km1, double theta_km1, double tau,
                         const MaterialModel& m);

// Pull-back of the spatial conductivity k*Id into the reference configuration.
Mat3 conductivity_pullback(const Mat3& f, double theta, const MaterialModel& m);

}  // namespace tve
