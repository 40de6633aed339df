#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "tve/errors.hpp"

namespace tve {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

template <class M>
M sym(const M& a) {
  return 0.5 * (a + a.transpose());
}

template <class M>
double ddot(const M& a, const M& b) {
  return a.cwiseProduct(b).sum();
}

template <class M>
bool is_symmetric(const M& a, double rel_tol = 1e-12) {
  return (a - M(a.transpose())).norm() <= rel_tol * std::max(a.norm(), 1e-300);
}

template <class M>
bool is_rotation(const M& q, double tol = 1e-10) {
  return (q.transpose() * q - M::Identity()).norm() <= tol &&
         std::abs(q.determinant() - 1.0) <= tol;
}

// Closed-form symmetric eigensolve; valid for 2x2 and 3x3 only.
template <class M>
double min_eigenvalue(const M& a) {
  Eigen::SelfAdjointEigenSolver<M> es;
  es.computeDirect(M(sym(a)));
  return es.eigenvalues()(0);
}

template <class M>
bool is_spd(const M& a, double sym_tol = 1e-12) {
  return is_symmetric(a, sym_tol) && min_eigenvalue(a) > 1e-14 * a.trace();
}

// Principal square root of an SPD matrix.
template <class M>
M spd_sqrt(const M& c) {
  if (!is_symmetric(c)) fail(ErrorCode::NotSpd, "spd_sqrt: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<M> es;
  es.computeDirect(M(sym(c)));
  if (!(es.eigenvalues()(0) > 1e-14 * c.trace()))
    fail(ErrorCode::NotSpd, "spd_sqrt: smallest eigenvalue <= 0");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

template <class M>
struct PolarFactors {
  M rotation;  // proper rotation
  M stretch;   // SPD right stretch
};

// F = Q U with Q in SO(d), U = sqrt(F^T F).
template <class M>
PolarFactors<M> polar_decompose(const M& f) {
  const int d = int(f.rows());
  const double scale = std::pow(f.norm() / std::sqrt(double(d)), d);
  if (!(f.determinant() > 1e-12 * scale))
    fail(ErrorCode::NonInvertible, "polar_decompose: det(F) below tolerance");
  M u = spd_sqrt<M>(M(f.transpose() * f));
  M q = f * u.inverse();
  return {q, u};
}

// Action of the isotropic fourth-order viscosity tensor on a strain rate.
template <class M>
M visc_apply(double nu, const M& cdot) {
  return nu * sym(cdot);
}

// Induced bilinear form: symmetric in its two arguments.
template <class M>
double visc_form(double nu, const M& a, const M& b) {
  return ddot(M(visc_apply(nu, a)), M(sym(b)));
}

// Embeds a 2x2 in-plane gradient as [[F2, 0], [0, 1]].
Mat3 lift_plane_strain(const Mat2& f2);

}  // namespace tve
