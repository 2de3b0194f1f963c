#pragma once

#include "steerkit/steering.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <random>

namespace steerkit::testing {

inline std::mt19937_64 rng_for(std::uint64_t test_seed) { return derived_rng(0x5eed, test_seed); }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Order-d unitary U diag(omega^{labels}) U^dagger with random labels.
inline CMatrix random_observable_matrix(int dim, int d, std::mt19937_64& rng) {
  const CMatrix u = random_unitary(dim, rng);
  Ket phases(dim);
  for (int i = 0; i < dim; ++i) phases(i) = omega_power(d, uniform_int(rng, 0, d - 1));
  return u * phases.asDiagonal() * u.adjoint();
}

inline QuditObservable random_observable(int dim, int d, std::mt19937_64& rng) {
  return QuditObservable(random_observable_matrix(dim, d, rng), d);
}

inline Scenario random_scenario(int d, int n, int bob_dim, std::mt19937_64& rng) {
  std::vector<QuditObservable> alice, bob;
  for (int i = 0; i < n; ++i) {
    alice.push_back(random_observable(d, d, rng));
    bob.push_back(random_observable(bob_dim, d, rng));
  }
  return Scenario(std::move(alice), std::move(bob), random_ket(d * bob_dim, rng));
}

// Bob side conjugated by w, state rotated by (1 (x) w).
inline Scenario rotate_bob(const Scenario& s, const CMatrix& w) {
  std::vector<QuditObservable> bob;
  for (const auto& b : s.bob()) bob.emplace_back(w * b.matrix() * w.adjoint(), s.d());
  return Scenario(s.alice(), std::move(bob),
                  apply_local(CMatrix::Identity(s.d(), s.d()), w, s.state()));
}

// Ideal scenario with Bob enlarged to dim d + junk.rows(), acting as `junk` there.
inline Scenario embed_with_junk(const Scenario& s, const CMatrix& junk) {
  const int d = s.d();
  const int big_d = s.bob_dim() + static_cast<int>(junk.rows());
  std::vector<QuditObservable> bob;
  for (const auto& b : s.bob()) {
    CMatrix m = CMatrix::Zero(big_d, big_d);
    m.topLeftCorner(s.bob_dim(), s.bob_dim()) = b.matrix();
    m.bottomRightCorner(junk.rows(), junk.cols()) = junk;
    bob.emplace_back(std::move(m), d);
  }
  CMatrix coeffs = CMatrix::Zero(d, big_d);
  coeffs.leftCols(s.bob_dim()) = coefficient_matrix(s.state(), d);
  return Scenario(s.alice(), std::move(bob), from_coefficient_matrix(coeffs));
}

inline ::testing::AssertionResult matrices_near(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return ::testing::AssertionFailure() << "shape " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
                                         << b.cols();
  const double dist = (a - b).norm();
  if (dist <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "HS distance " << dist << " exceeds " << tol;
}

}  // namespace steerkit::testing
