#pragma once

#include <random>

#include "tve/experiments.hpp"

namespace tve {

struct OracleReport {
  std::string name;
  long samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Seeded sampling helpers shared by the verification suites and the tests.
class RandomSampler {
 public:
  explicit RandomSampler(unsigned seed = 20240) : rng_(seed) {}

  double uniform(double lo, double hi);
  Mat2 rotation2();
  Mat3 rotation3();
  // Q1 * diag(s) * Q2 with singular values in [0.5, 2].
  Mat2 gl2();
  Mat3 gl3();
  Mat3 gl3_lifted();  // plane-strain lift of gl2()
  Mat2 spd2(double eig_lo = 0.2, double eig_hi = 3.0);
  Mat3 spd3(double eig_lo = 0.2, double eig_hi = 3.0);
  Mat3 symmetric3(double scale = 1.0);

 private:
  std::mt19937_64 rng_;
};

// Central finite differences of analytic derivatives for every density.
OracleReport fd_gradient_suite(const MaterialModel& m, unsigned seed = 11);
// Matrix root inequality, including the exact equality witness.
OracleReport matrix_lemma_suite(unsigned seed = 22);
// Algebraic identities and the legacy frame-indifference violation witness.
OracleReport identity_suite(unsigned seed = 33);
// Discrete internal-energy balance and step-size self-convergence.
OracleReport balance_and_convergence_suite();

std::vector<OracleReport> run_all_oracles();

}  // namespace tve
