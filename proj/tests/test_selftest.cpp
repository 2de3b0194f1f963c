#include "support.hpp"

#include "steerkit/incompat.hpp"
#include "steerkit/selftest.hpp"

#include <cmath>

using namespace steerkit;
using steerkit::testing::embed_with_junk;
using steerkit::testing::matrices_near;
using steerkit::testing::rng_for;
using steerkit::testing::rotate_bob;

namespace {

std::vector<QuditObservable> pauli_pair(int d) {
  auto [x, z] = generalized_pauli(d);
  return {x, z};
}

std::vector<QuditObservable> mub_triple_3() {
  return {mub_observable(3, 0), mub_observable(3, 1), generalized_pauli(3).second};
}

// lambda1 (|00> + |11>) + lambda2 (|22> + |33>).
Ket block_state(double l1, double l2) {
  CMatrix c = CMatrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = l1;
  c(2, 2) = c(3, 3) = l2;
  return from_coefficient_matrix(c);
}

Scenario weaker_scenario(double l1, double l2) {
  const Scenario ideal = ideal_realization(builtin_example("weaker_d4_pair"));
  return Scenario(ideal.alice(), ideal.bob(), block_state(l1, l2));
}

CMatrix projector_01() {
  CMatrix p = CMatrix::Zero(4, 4);
  p(0, 0) = p(1, 1) = 1;
  return p;
}

}  // namespace

TEST(StabilizerResiduals, IdealMubScenarioIsExact) {
  EXPECT_LT(stabilizer_residuals(ideal_realization(mub_triple_3())).maxCoeff(), 1e-10);
}

TEST(StabilizerResiduals, IdentityForSecondBobObservable) {
  const Scenario ideal = ideal_realization(pauli_pair(3));
  const Scenario s(ideal.alice(), {ideal.bob()[0], QuditObservable(CMatrix::Identity(3, 3), 3)}, ideal.state());
  const Eigen::MatrixXd r = stabilizer_residuals(s);
  const CMatrix z = generalized_pauli(3).second.matrix();
  const double oracle = (apply_local(z, CMatrix::Identity(3, 3), ideal.state()) - ideal.state()).norm();
  EXPECT_NEAR(r(1, 0), oracle, 1e-12);
  EXPECT_GT(r(1, 0), 0.1);
  EXPECT_LT(r(0, 0), 1e-12);
}

TEST(StabilizerResiduals, NormExpansionIdentity) {
  auto rng = rng_for(51);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 3;
    const Scenario s = steerkit::testing::random_scenario(d, 2, d + trial % 2, rng);
    const Eigen::MatrixXd r = stabilizer_residuals(s);
    for (int i = 0; i < 2; ++i)
      for (int k = 1; k < d; ++k) {
        const double re = local_expectation(s.alice()[static_cast<std::size_t>(i)].power(k),
                                            s.bob()[static_cast<std::size_t>(i)].power(k), s.state())
                              .real();
        EXPECT_NEAR(r(i, k - 1) * r(i, k - 1), 2 * (1 - re), 1e-10);
      }
  }
}

TEST(ExtractPA, Examples) {
  EXPECT_TRUE(matrices_near(extract_PA(schmidt_decompose(maximally_entangled(3), 3)), CMatrix::Identity(3, 3), 1e-12));

  Ket product = Ket::Zero(4);
  product(0) = 1;
  const CMatrix pa = extract_PA(schmidt_decompose(product, 2));
  CMatrix expected = CMatrix::Zero(2, 2);
  expected(0, 0) = std::sqrt(2.0);
  EXPECT_TRUE(matrices_near(pa, expected, 1e-12));
  EXPECT_EQ(numerical_rank(pa, 1e-8), 1);

  const double l2 = std::sqrt(0.5 - 0.36);
  const CMatrix pa20 = extract_PA(schmidt_decompose(block_state(0.6, l2), 4));
  CMatrix expected20 = CMatrix::Zero(4, 4);
  expected20(0, 0) = expected20(1, 1) = 2 * 0.6;
  expected20(2, 2) = expected20(3, 3) = 2 * l2;
  EXPECT_TRUE(matrices_near(pa20, expected20, 1e-12));
  EXPECT_NEAR((pa20 * pa20).trace().real(), 4.0, 1e-12);
}

TEST(BobBlocks, FullSupport) {
  const Scenario s = ideal_realization(pauli_pair(3));
  const BobBlocks b = bob_blocks(s);
  EXPECT_EQ(b.support_rank, 3);
  EXPECT_TRUE(matrices_near(b.support_projector, CMatrix::Identity(3, 3), 1e-10));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(matrices_near(b.compressed[i], s.bob()[i].matrix(), 1e-10));
}

TEST(BobBlocks, JunkBlockSeparates) {
  const Scenario ideal = ideal_realization(pauli_pair(2));
  const CMatrix junk = (CMatrix(2, 2) << 0, 1, 1, 0).finished();
  const Scenario s = embed_with_junk(ideal, junk);
  const BobBlocks b = bob_blocks(s);
  EXPECT_EQ(b.support_rank, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(b.upper_residuals[i], 1e-10);
    EXPECT_LT(b.lower_residuals[i], 1e-10);
    EXPECT_TRUE(matrices_near(b.compressed[i].topLeftCorner(2, 2), ideal.alice()[i].matrix().conjugate(), 1e-10));
    EXPECT_LT(b.order_residuals[i], 1e-8);
  }
}

TEST(ReferenceUnitary, IdentityOnPhiPlus) {
  const SchmidtForm s = schmidt_decompose(maximally_entangled(3), 3);
  const CMatrix ub = construct_reference_unitary(s);
  EXPECT_LT((apply_local(CMatrix::Identity(3, 3), ub, maximally_entangled(3)) - maximally_entangled(3)).norm(), 1e-12);
}

TEST(ReferenceUnitary, UndoesRandomBobRotation) {
  auto rng = rng_for(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const CMatrix v = random_unitary(d, rng);
    const Ket rotated = apply_local(CMatrix::Identity(d, d), v, maximally_entangled(d));
    const CMatrix ub = construct_reference_unitary(schmidt_decompose(rotated, d));
    EXPECT_TRUE(matrices_near(ub.adjoint() * ub, CMatrix::Identity(d, d), 1e-12));
    EXPECT_LT((apply_local(CMatrix::Identity(d, d), ub, rotated) - maximally_entangled(d)).norm(), 1e-9);
    EXPECT_TRUE(matrices_near(ub, v.adjoint(), 1e-9));
  }
}

TEST(ReferenceUnitary, DegenerateCoefficientsGivePAForm) {
  // (1 (x) U_B) psi = (P_A (x) 1) phi+ for a state with a degenerate Schmidt spectrum.
  auto rng = rng_for(53);
  const Ket base = block_state(0.6, std::sqrt(0.14));
  const CMatrix w = random_unitary(6, rng);
  CMatrix coeffs = CMatrix::Zero(4, 6);
  coeffs.leftCols(4) = coefficient_matrix(base, 4);
  const Ket psi = apply_local(CMatrix::Identity(4, 4), w, from_coefficient_matrix(coeffs));
  const SchmidtForm s = schmidt_decompose(psi, 4);
  const CMatrix ub = construct_reference_unitary(s);
  const Ket lhs = apply_local(CMatrix::Identity(4, 4), ub, psi);
  const Ket rhs = apply_local(extract_PA(s), CMatrix::Identity(6, 6), maximally_entangled(4, 6));
  EXPECT_LT((lhs - rhs).norm(), 1e-9);
}

TEST(ReferenceUnitary, RankDeficientThrows) {
  Ket product = Ket::Zero(4);
  product(0) = 1;
  EXPECT_THROW(construct_reference_unitary(schmidt_decompose(product, 2)), std::domain_error);
}

TEST(TransposeTrick, RandomMatrices) {
  auto rng = rng_for(54);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    const CMatrix r = random_matrix(d, d, rng), q = random_matrix(d, d, rng);
    const Ket phi = maximally_entangled(d);
    EXPECT_LT((apply_local(r, q, phi) - apply_local(r * q.transpose(), CMatrix::Identity(d, d), phi)).norm(), 1e-10);
  }
}

TEST(Certify, IdealQutritPaulis) {
  const CertificationReport r = certify(ideal_realization(pauli_pair(3)), 1e-8);
  EXPECT_EQ(r.verdict, Verdict::certified);
  EXPECT_LT(r.state_error, 1e-9);
  for (double e : r.observable_errors) EXPECT_LT(e, 1e-9);
  EXPECT_EQ(r.schmidt_rank, 3);
  EXPECT_FALSE(r.partial.has_value());
}

TEST(Certify, MismatchedBobFails) {
  auto rng = rng_for(55);
  const Scenario ideal = ideal_realization(pauli_pair(2));
  const CMatrix v = random_unitary(2, rng);
  std::vector<QuditObservable> bob;
  for (const auto& b : ideal.bob()) bob.emplace_back(v * b.matrix() * v.adjoint(), 2);
  const Scenario s(ideal.alice(), std::move(bob), ideal.state());
  const CertificationReport r = certify(s, 1e-8);
  EXPECT_EQ(r.verdict, Verdict::failed);
  EXPECT_GT(r.max_stabilizer_residual, 1e-3);
}

TEST(Certify, WeakerPairIsDemotedToPartial) {
  const CertificationReport r = certify(ideal_realization(builtin_example("weaker_d4_pair")), 1e-8);
  EXPECT_FALSE(r.genuinely_incompatible);
  EXPECT_EQ(r.verdict, Verdict::partial);
  ASSERT_TRUE(r.partial.has_value());
  EXPECT_NEAR(r.violation, quantum_max(2, 4), 1e-12);
}

TEST(Certify, CommonEigenvectorFails) {
  const auto z = generalized_pauli(3).second;
  const CertificationReport r = certify(ideal_realization(std::vector<QuditObservable>{z, z}), 1e-8);
  EXPECT_TRUE(r.shares_common_eigenvector);
  EXPECT_EQ(r.verdict, Verdict::failed);
}

TEST(Certify, RejectsNonPositiveTolerance) {
  EXPECT_THROW(certify(ideal_realization(pauli_pair(2)), 0.0), std::invalid_argument);
}

TEST(Certify, IdealGenuinelyIncompatibleSetsAreCertified) {
  auto rng = rng_for(56);
  for (int d : {2, 3, 4, 5})
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<QuditObservable> alice = pauli_pair(d);
      if (trial > 0) alice.push_back(steerkit::testing::random_observable(d, d, rng));
      const CMatrix u = random_unitary(d, rng);
      std::vector<QuditObservable> rotated;
      for (const auto& a : alice) rotated.emplace_back(u * a.matrix() * u.adjoint(), d);
      const Scenario s = ideal_realization(rotated);
      const CertificationReport r = certify(s, 1e-8);
      EXPECT_EQ(r.verdict, Verdict::certified) << "d=" << d;
      EXPECT_LT(r.max_stabilizer_residual, 1e-8);
      EXPECT_LT(r.pa_identity_residual, 1e-8);
      EXPECT_LT(r.state_error, 1e-8);
      for (double e : r.observable_errors) EXPECT_LT(e, 1e-8);
    }
}

TEST(Certify, InvariantUnderBobBasisChangeAndJunk) {
  auto rng = rng_for(57);
  for (int d : {2, 3, 4}) {
    const Scenario ideal = ideal_realization(pauli_pair(d));
    const CMatrix junk = steerkit::testing::random_observable_matrix(d, d, rng);
    const Scenario embedded = embed_with_junk(ideal, junk);
    const Scenario rotated = rotate_bob(embedded, random_unitary(2 * d, rng));
    const CertificationReport a = certify(ideal, 1e-8), b = certify(rotated, 1e-8);
    EXPECT_EQ(b.verdict, Verdict::certified);
    EXPECT_EQ(a.verdict, b.verdict);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(a.observable_errors[i], b.observable_errors[i], 1e-9);
    EXPECT_LT(b.state_error, 1e-8);
  }
}

TEST(PartialCertify, BothBlocksAtPhiPlus) {
  // lambda1 = lambda2 = 1/2 is |phi_4^+>: P_A = 1 has a single level.
  const PartialReport r = partial_certify(weaker_scenario(0.5, 0.5), 1e-8);
  EXPECT_EQ(r.verdict, Verdict::partial);
  ASSERT_EQ(r.blocks.size(), 2u);
  for (const auto& b : r.blocks) EXPECT_TRUE(b.certified);
  EXPECT_EQ(r.pa_levels.size(), 1u);
}

TEST(PartialCertify, UnequalWeightsGiveTwoLevels) {
  const double l1 = std::cos(0.4) / std::sqrt(2.0), l2 = std::sin(0.4) / std::sqrt(2.0);
  const PartialReport r = partial_certify(weaker_scenario(l1, l2), 1e-8);
  EXPECT_EQ(r.verdict, Verdict::partial);
  EXPECT_EQ(r.commutant_dim, 2);
  ASSERT_EQ(r.pa_levels.size(), 2u);
  EXPECT_NEAR(r.pa_levels[0], 2 * l2, 1e-10);
  EXPECT_NEAR(r.pa_levels[1], 2 * l1, 1e-10);
  for (const auto& b : r.blocks) {
    EXPECT_TRUE(b.certified);
    EXPECT_LT(b.state_residual, 1e-8);
    for (double e : b.observable_errors) EXPECT_LT(e, 1e-8);
  }
}

TEST(PartialCertify, VanishingSecondBlock) {
  const PartialReport r = partial_certify(weaker_scenario(1 / std::sqrt(2.0), 0.0), 1e-8);
  EXPECT_EQ(r.verdict, Verdict::partial);
  EXPECT_EQ(r.pa_rank, 2);
  int certified = 0;
  const auto alice = builtin_example("weaker_d4_pair");
  const CMatrix pi2 = projector_01();
  for (const auto& b : r.blocks) {
    if (!b.certified) continue;
    ++certified;
    EXPECT_TRUE(matrices_near(b.projector, pi2, 1e-8));
    for (std::size_t i = 0; i < alice.size(); ++i)
      EXPECT_TRUE(matrices_near(b.observables[i], pi2 * alice[i].matrix().conjugate() * pi2, 1e-8));
  }
  EXPECT_EQ(certified, 1);
}

TEST(PartialCertify, PhiPlusIsMaximalButOnlyPartial) {
  const Scenario s = ideal_realization(builtin_example("weaker_d4_pair"));
  EXPECT_NEAR(steering_value(s), quantum_max(2, 4), 1e-12);
  const CertificationReport r = certify(s, 1e-8);
  EXPECT_LT(r.pa_identity_residual, 1e-10);
  EXPECT_EQ(r.verdict, Verdict::partial);
}

TEST(PartialCertify, RejectsOtherRegimes) {
  EXPECT_THROW(partial_certify(ideal_realization(pauli_pair(2)), 1e-8), std::invalid_argument);
  const auto z = generalized_pauli(2).second;
  EXPECT_THROW(partial_certify(ideal_realization(std::vector<QuditObservable>{z, z}), 1e-8), std::invalid_argument);
}

TEST(Verdict, StringRoundTrip) {
  for (Verdict v : {Verdict::certified, Verdict::partial, Verdict::failed})
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  EXPECT_THROW(verdict_from_string("maybe"), std::invalid_argument);
}
