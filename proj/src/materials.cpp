#include "tve/materials.hpp"

#include <cmath>
#include <sstream>

namespace tve {

namespace {

void check_det(const Mat3& f, const char* where) {
  if (!(f.determinant() > 0.0))
    fail(ErrorCode::NonPositiveDeterminant, std::string(where) + ": det(F) <= 0");
}

void check_theta_nonneg(double theta, const char* where) {
  if (theta < 0.0)
    fail(ErrorCode::NegativeTemperatureInput, std::string(where) + ": theta < 0");
}

void check_theta_pos(double theta, const char* where) {
  if (!(theta > kThetaFloor))
    fail(ErrorCode::NonPositiveTemperature, std::string(where) + ": theta below floor");
}

double theta_entropy_term(double theta) {
  // c1-normalized thermal part theta*(1-log(theta)), extended by 0 at theta = 0.
  return theta > 0.0 ? theta * (1.0 - std::log(theta)) : 0.0;
}

}  // namespace

std::vector<std::string> MaterialModel::validate() const {
  std::vector<std::string> v;
  if (!(mu > 0)) v.push_back("mu must be > 0");
  if (!(lambda > 0)) v.push_back("lambda must be > 0");
  if (!(c1 > 0)) v.push_back("c1 must be > 0");
  if (!(nu_visc > 0)) v.push_back("nu_visc must be > 0");
  if (!(k_cond > 0)) v.push_back("k_cond must be > 0");
  if (kappa < 0) v.push_back("kappa must be >= 0");
  if (eps < 0) v.push_back("eps must be >= 0");
  if (kind == MaterialKind::Sma && !(eps > 0)) v.push_back("eps must be > 0 for Sma");
  return v;
}

void MaterialModel::require_valid() const {
  auto v = validate();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid material:";
  for (const auto& s : v) os << " [" << s << "]";
  fail(ErrorCode::ValidationError, os.str());
}

Mat3 simple_shear(double gamma) {
  Mat3 g = Mat3::Identity();
  g(0, 1) = gamma;
  return g;
}

double well_energy(const Mat3& f, double gamma, double mu, double lambda) {
  check_det(f, "well_energy");
  const double j = f.determinant();
  const double iso = std::pow(j, -2.0 / 3.0) * (f * simple_shear(gamma)).squaredNorm() - 3.0;
  const double vol = j + 1.0 / j - 2.0;
  return mu * iso * iso + lambda * vol * vol;
}

Mat3 well_stress(const Mat3& f, double gamma, double mu, double lambda) {
  check_det(f, "well_stress");
  const Mat3 g = simple_shear(gamma);
  const Mat3 h = g * g.transpose();
  const double j = f.determinant();
  const Mat3 n = f.inverse().transpose();
  const double jm23 = std::pow(j, -2.0 / 3.0);
  const double i1 = (f * g).squaredNorm();
  const double e = jm23 * i1 - 3.0;
  const double v = j + 1.0 / j - 2.0;
  const Mat3 de = jm23 * (2.0 * f * h - (2.0 / 3.0) * i1 * n);
  const Mat3 dv = (j - 1.0 / j) * n;
  return 2.0 * mu * e * de + 2.0 * lambda * v * dv;
}

Mat3 well_stress_diff(const Mat3& f, const Mat3& w, double gamma, double mu, double lambda) {
  check_det(f, "well_stress_diff");
  const Mat3 g = simple_shear(gamma);
  const Mat3 h = g * g.transpose();
  const double j = f.determinant();
  const Mat3 n = f.inverse().transpose();
  const double jm23 = std::pow(j, -2.0 / 3.0);
  const double i1 = (f * g).squaredNorm();
  const double e = jm23 * i1 - 3.0;
  const double v = j + 1.0 / j - 2.0;

  const double nw = ddot(n, w);
  const double di1 = 2.0 * ddot(Mat3(f * h), w);
  const double djm23 = -(2.0 / 3.0) * jm23 * nw;
  const Mat3 dn = -n * w.transpose() * n;

  const Mat3 de_grad = jm23 * (2.0 * f * h - (2.0 / 3.0) * i1 * n);
  const double de = ddot(de_grad, w);
  const double dv = (j - 1.0 / j) * nw;
  const Mat3 d_de_grad = djm23 * (2.0 * f * h - (2.0 / 3.0) * i1 * n) +
                         jm23 * (2.0 * w * h - (2.0 / 3.0) * di1 * n - (2.0 / 3.0) * i1 * dn);
  const Mat3 dv_grad = (j - 1.0 / j) * n;
  const Mat3 d_dv_grad = (j + 1.0 / j) * nw * n + (j - 1.0 / j) * dn;

  return 2.0 * mu * (de * de_grad + e * d_de_grad) + 2.0 * lambda * (dv * dv_grad + v * d_dv_grad);
}

Mat3 well_stress_c(const Mat3& c, double gamma, double mu, double lambda) {
  const double d = c.determinant();
  if (!(d > 0.0)) fail(ErrorCode::NonPositiveDeterminant, "well_stress_c: det(C) <= 0");
  const Mat3 g = simple_shear(gamma);
  const Mat3 h = g * g.transpose();
  const Mat3 cinv = c.inverse();
  const double dm13 = std::pow(d, -1.0 / 3.0);
  const double i1 = ddot(c, h);
  const double e = dm13 * i1 - 3.0;
  const double sq = std::sqrt(d);
  const double v = sq + 1.0 / sq - 2.0;
  const Mat3 de = dm13 * (h - (1.0 / 3.0) * i1 * cinv);
  const Mat3 dv = 0.5 * (sq - 1.0 / sq) * cinv;
  return 2.0 * mu * e * de + 2.0 * lambda * v * dv;
}

double neo_hookean_energy(const Mat3& f, double mu, double lambda) {
  return well_energy(f, 0.0, mu, lambda);
}

double austenite_energy(const Mat3& f, const MaterialModel& m) {
  return well_energy(f, 0.0, m.mu, m.lambda);
}

double martensite_branch(const Mat3& f, const MaterialModel& m) {
  const double zp = well_energy(f, +m.eps, m.mu, m.lambda);
  const double zm = well_energy(f, -m.eps, m.mu, m.lambda);
  return zp <= zm ? +m.eps : -m.eps;
}

double martensite_energy(const Mat3& f, const MaterialModel& m) {
  return std::min(well_energy(f, +m.eps, m.mu, m.lambda),
                  well_energy(f, -m.eps, m.mu, m.lambda));
}

double elastic_energy(const Mat3& f, const MaterialModel& m) {
  if (m.kind == MaterialKind::SimpleNeoHookean) return well_energy(f, 0.0, m.mu, m.lambda);
  return martensite_energy(f, m);
}

Mat3 elastic_stress(const Mat3& f, const MaterialModel& m) {
  if (m.kind == MaterialKind::SimpleNeoHookean) return well_stress(f, 0.0, m.mu, m.lambda);
  return well_stress(f, martensite_branch(f, m), m.mu, m.lambda);
}

Mat3 elastic_stress_diff(const Mat3& f, const Mat3& df, const MaterialModel& m) {
  if (m.kind == MaterialKind::SimpleNeoHookean) return well_stress_diff(f, df, 0.0, m.mu, m.lambda);
  return well_stress_diff(f, df, martensite_branch(f, m), m.mu, m.lambda);
}

double austenite_fraction(double theta) { return theta / (1.0 + theta); }
double austenite_fraction_d1(double theta) {
  const double s = 1.0 + theta;
  return 1.0 / (s * s);
}
double austenite_fraction_d2(double theta) {
  const double s = 1.0 + theta;
  return -2.0 / (s * s * s);
}

double coupling_energy(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "coupling_energy");
  check_theta_nonneg(theta, "coupling_energy");
  const double thermal = m.c1 * theta_entropy_term(theta);
  if (m.kind == MaterialKind::SimpleNeoHookean) return thermal;
  const double dw = austenite_energy(f, m) - martensite_energy(f, m);
  return austenite_fraction(theta) * dw + thermal;
}

Mat3 coupling_stress(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "coupling_stress");
  check_theta_nonneg(theta, "coupling_stress");
  if (m.kind == MaterialKind::SimpleNeoHookean) return Mat3::Zero();
  const Mat3 pa = well_stress(f, 0.0, m.mu, m.lambda);
  const Mat3 pm = well_stress(f, martensite_branch(f, m), m.mu, m.lambda);
  return austenite_fraction(theta) * (pa - pm);
}

Mat3 coupling_stress_diff(const Mat3& f, const Mat3& df, double theta, const MaterialModel& m) {
  if (m.kind == MaterialKind::SimpleNeoHookean) return Mat3::Zero();
  const Mat3 da = well_stress_diff(f, df, 0.0, m.mu, m.lambda);
  const Mat3 dm = well_stress_diff(f, df, martensite_branch(f, m), m.mu, m.lambda);
  return austenite_fraction(theta) * (da - dm);
}

Mat3 coupling_stress_c(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "coupling_stress_c");
  check_theta_nonneg(theta, "coupling_stress_c");
  if (m.kind == MaterialKind::SimpleNeoHookean) return Mat3::Zero();
  const Mat3 c = f.transpose() * f;
  const Mat3 ga = well_stress_c(c, 0.0, m.mu, m.lambda);
  const Mat3 gm = well_stress_c(c, martensite_branch(f, m), m.mu, m.lambda);
  return austenite_fraction(theta) * (ga - gm);
}

double coupling_dtheta(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "coupling_dtheta");
  check_theta_pos(theta, "coupling_dtheta");
  const double thermal = -m.c1 * std::log(theta);
  if (m.kind == MaterialKind::SimpleNeoHookean) return thermal;
  const double dw = austenite_energy(f, m) - martensite_energy(f, m);
  return austenite_fraction_d1(theta) * dw + thermal;
}

Mat3 coupling_dF_dtheta(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "coupling_dF_dtheta");
  check_theta_pos(theta, "coupling_dF_dtheta");
  if (m.kind == MaterialKind::SimpleNeoHookean) return Mat3::Zero();
  const Mat3 pa = well_stress(f, 0.0, m.mu, m.lambda);
  const Mat3 pm = well_stress(f, martensite_branch(f, m), m.mu, m.lambda);
  return austenite_fraction_d1(theta) * (pa - pm);
}

double internal_energy(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "internal_energy");
  check_theta_nonneg(theta, "internal_energy");
  if (theta == 0.0) return 0.0;
  if (m.kind == MaterialKind::SimpleNeoHookean) return m.c1 * theta;
  const double dw = austenite_energy(f, m) - martensite_energy(f, m);
  const double s = 1.0 + theta;
  return dw * theta * theta / (s * s) + m.c1 * theta;
}

double internal_energy_integral(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "internal_energy_integral");
  const double quad = 0.5 * m.c1 * theta * theta;
  if (m.kind == MaterialKind::SimpleNeoHookean) return quad;
  // int_0^theta s^2/(1+s)^2 ds = theta - 2 log(1+theta) + theta/(1+theta)
  const double dw = austenite_energy(f, m) - martensite_energy(f, m);
  const double g = theta - 2.0 * std::log1p(theta) + theta / (1.0 + theta);
  return dw * g + quad;
}

double heat_capacity(const Mat3& f, double theta, const MaterialModel& m) {
  check_det(f, "heat_capacity");
  if (m.kind == MaterialKind::SimpleNeoHookean) return m.c1;
  const double dw = austenite_energy(f, m) - martensite_energy(f, m);
  const double cap = m.c1 - theta * austenite_fraction_d2(theta) * dw;
  if (!(cap > 0.0))
    fail(ErrorCode::NonPositiveCapacity, "heat_capacity: nonpositive value");
  return cap;
}

double dissipation_density(const Mat3& f1, const Mat3& f2, double theta, const MaterialModel& m) {
  (void)theta;
  if (m.dissipation_variant == DissipationVariant::V1) {
    check_det(f1, "dissipation_density");
    check_det(f2, "dissipation_density");
    const Mat3 dc = f2.transpose() * f2 - f1.transpose() * f1;
    return visc_form(m.nu_visc, dc, dc);
  }
  const Mat3 df = f2 - f1;
  const Mat3 cd = df.transpose() * f1 + f1.transpose() * df;
  return visc_form(m.nu_visc, cd, cd);
}

Mat3 dissipation_dF2(const Mat3& f1, const Mat3& f2, double theta, const MaterialModel& m) {
  (void)theta;
  if (m.dissipation_variant == DissipationVariant::V1) {
    check_det(f1, "dissipation_dF2");
    check_det(f2, "dissipation_dF2");
    const Mat3 dc = f2.transpose() * f2 - f1.transpose() * f1;
    return 4.0 * m.nu_visc * f2 * dc;
  }
  const Mat3 df = f2 - f1;
  const Mat3 cd = df.transpose() * f1 + f1.transpose() * df;
  return 4.0 * m.nu_visc * f1 * cd;
}

Mat3 dissipation_dF2_diff(const Mat3& f1, const Mat3& f2, const Mat3& w, double theta,
                          const MaterialModel& m) {
  (void)theta;
  if (m.dissipation_variant == DissipationVariant::V1) {
    const Mat3 dc = f2.transpose() * f2 - f1.transpose() * f1;
    const Mat3 ddc = w.transpose() * f2 + f2.transpose() * w;
    return 4.0 * m.nu_visc * (w * dc + f2 * ddc);
  }
  const Mat3 dcd = w.transpose() * f1 + f1.transpose() * w;
  return 4.0 * m.nu_visc * f1 * dcd;
}

double xi_rate(const Mat3& f, const Mat3& fdot, double theta, const MaterialModel& m) {
  (void)theta;
  check_det(f, "xi_rate");
  const Mat3 cdot = fdot.transpose() * f + f.transpose() * fdot;
  return visc_form(m.nu_visc, cdot, cdot);
}

Mat3 viscous_stress(const Mat3& f, const Mat3& fdot, double theta, const MaterialModel& m) {
  (void)theta;
  check_det(f, "viscous_stress");
  const Mat3 cdot = fdot.transpose() * f + f.transpose() * fdot;
  return 2.0 * f * visc_apply(m.nu_visc, cdot);
}

double heat_source_h_tau(const Mat3& f_k, const Mat3& f_km1, double theta_km1, double tau,
                         const MaterialModel& m) {
  check_det(f_k, "heat_source_h_tau");
  check_det(f_km1, "heat_source_h_tau");
  if (!(tau > 0.0)) fail(ErrorCode::ValidationError, "heat_source_h_tau: tau <= 0");
  if (m.heat_source_variant == HeatSourceVariant::Vh1) {
    MaterialModel v1 = m;
    v1.dissipation_variant = DissipationVariant::V1;
    const double d2 = dissipation_density(f_km1, f_k, theta_km1, v1);
    const Mat3 dcw = 0.5 * f_km1.inverse() * coupling_stress(f_km1, theta_km1, m);
    const Mat3 dc = f_k.transpose() * f_k - f_km1.transpose() * f_km1;
    return d2 / (tau * tau) + ddot(dcw, dc) / tau;
  }
  const double xi = xi_rate(f_km1, Mat3(f_k - f_km1), theta_km1, m);
  const double cpl = ddot(Mat3(coupling_stress(f_km1, theta_km1, m)), Mat3(f_k - f_km1));
  return xi / (tau * tau) + cpl / tau;
}

Mat3 conductivity_pullback(const Mat3& f, double theta, const MaterialModel& m) {
  (void)theta;
  check_det(f, "conductivity_pullback");
  const Mat3 finv = f.inverse();
  return sym(Mat3(m.k_cond * f.determinant() * finv * finv.transpose()));
}

}  // namespace tve
