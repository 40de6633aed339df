#include <doctest.h>

#include "tve/oracles.hpp"
#include "tve/tensor.hpp"

using namespace tve;

TEST_CASE("polar decomposition on simple inputs") {
  auto [q1, u1] = polar_decompose<Mat2>(Mat2::Identity());
  CHECK((q1 - Mat2::Identity()).norm() < 1e-14);
  CHECK((u1 - Mat2::Identity()).norm() < 1e-14);

  Mat2 rot;
  rot << 0, -1, 1, 0;
  auto [q2, u2] = polar_decompose(rot);
  CHECK((q2 - rot).norm() < 1e-12);
  CHECK((u2 - Mat2::Identity()).norm() < 1e-12);

  const Mat2 d = Vec2(2, 3).asDiagonal();
  auto [q3, u3] = polar_decompose(d);
  CHECK((q3 - Mat2::Identity()).norm() < 1e-12);
  CHECK((u3 - d).norm() < 1e-12);
}

TEST_CASE("polar decomposition property sweep") {
  RandomSampler rs(7);
  int tested = 0;
  while (tested < 10000) {
    // Random factors with singular values wide enough to cover det in [0.1, 10].
    const Vec2 s(rs.uniform(0.3, 3.2), rs.uniform(0.3, 3.2));
    const Mat2 f = rs.rotation2() * s.asDiagonal() * rs.rotation2();
    if (f.determinant() < 0.1 || f.determinant() > 10.0) continue;
    ++tested;
    auto [q, u] = polar_decompose(f);
    CHECK((q * u - f).norm() <= 1e-10 * f.norm());
    CHECK(is_rotation(q));
    CHECK(is_spd(u));
  }
  for (int i = 0; i < 2000; ++i) {
    const Mat3 f = rs.gl3();
    auto [q, u] = polar_decompose(f);
    CHECK((q * u - f).norm() <= 1e-10 * f.norm());
    CHECK(is_rotation(q));
    CHECK(is_spd(u));
  }
}

TEST_CASE("polar decomposition rejects noninvertible input") {
  Mat2 f;
  f << 1, 0, 0, 0;
  CHECK_THROWS_WITH_AS(polar_decompose(f), doctest::Contains("tolerance"), Error);
  Mat2 flipped;
  flipped << -1, 0, 0, 1;
  CHECK_THROWS_AS(polar_decompose(flipped), Error);
}

TEST_CASE("spd square root") {
  const Mat2 c = Vec2(4, 9).asDiagonal();
  CHECK((spd_sqrt(c) - Mat2(Vec2(2, 3).asDiagonal())).norm() < 1e-14);
  CHECK((spd_sqrt<Mat3>(Mat3::Identity()) - Mat3::Identity()).norm() < 1e-14);

  RandomSampler rs(11);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 c3 = rs.spd3(0.05, 9.0);
    const Mat3 r = spd_sqrt(c3);
    CHECK((r * r - c3).norm() <= 1e-10 * c3.norm());
    CHECK(is_spd(r));
  }
  // Root of a known square reproduces the factor.
  const Mat2 q = rs.rotation2();
  const Mat2 root = q.transpose() * Vec2(2, 1).asDiagonal() * q;
  CHECK((spd_sqrt<Mat2>(root * root) - root).norm() < 1e-12);

  Mat2 bad;
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(spd_sqrt(bad), Error);
  Mat2 asym;
  asym << 1, 1, 0, 1;
  CHECK_THROWS_AS(spd_sqrt(asym), Error);
}

TEST_CASE("matrix root inequality with equality witness") {
  const OracleReport rep = matrix_lemma_suite();
  CHECK(rep.pass);
  CHECK(rep.max_violation <= 1e-12);

  const Mat2 a = 2.0 * Mat2::Identity();
  const Mat2 d = Mat2::Identity();
  CHECK((a - d).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK((a * a - d * d).norm() / 3.0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  // Strict inequality for a generic non-commuting pair.
  RandomSampler rs(3);
  const Mat3 a3 = rs.spd3();
  const Mat3 d3 = rs.spd3();
  const double lhs = (a3 - d3).norm();
  const double rhs = (a3 * a3 - d3 * d3).norm() / (min_eigenvalue(d3) + min_eigenvalue(a3));
  CHECK(lhs < rhs);
}

TEST_CASE("viscosity tensor action and bilinear form") {
  CHECK((visc_apply<Mat3>(1.0, Mat3::Identity()) - Mat3::Identity()).norm() < 1e-15);
  const Mat2 d = Vec2(1, -1).asDiagonal();
  CHECK((visc_apply(2.0, d) - Mat2(Vec2(2, -2).asDiagonal())).norm() < 1e-15);

  RandomSampler rs(5);
  const double nu = 1.7;
  for (int i = 0; i < 100; ++i) {
    const Mat3 a = rs.symmetric3();
    const Mat3 b = rs.symmetric3();
    CHECK(visc_form(nu, a, a) == doctest::Approx(nu * a.squaredNorm()).epsilon(1e-13));
    CHECK(visc_form(nu, a, b) == doctest::Approx(visc_form(nu, b, a)).epsilon(1e-13));
  }
}

TEST_CASE("plane strain lift") {
  CHECK((lift_plane_strain(Mat2::Identity()) - Mat3::Identity()).norm() < 1e-15);
  const Mat2 d = Vec2(2, 3).asDiagonal();
  Mat3 expect = Vec3(2, 3, 1).asDiagonal();
  CHECK((lift_plane_strain(d) - expect).norm() < 1e-15);

  RandomSampler rs(13);
  for (int i = 0; i < 100; ++i) {
    const Mat2 f2 = rs.gl2();
    const Mat3 f = lift_plane_strain(f2);
    CHECK(f.determinant() == doctest::Approx(f2.determinant()).epsilon(1e-14));
    CHECK(f.squaredNorm() == doctest::Approx(f2.squaredNorm() + 1.0).epsilon(1e-14));
  }
}
