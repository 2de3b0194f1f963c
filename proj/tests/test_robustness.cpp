#include "support.hpp"

#include "steerkit/robustness.hpp"
#include "steerkit/selftest.hpp"

#include <cmath>

using namespace steerkit;
using steerkit::testing::matrices_near;
using steerkit::testing::rng_for;

namespace {

Scenario ideal_family(int d, int l) { return ideal_realization(theorem2_alice(d, l)); }

bool all_pass(const RobustnessReport& r) { return r.all_bounds_pass && r.all_intermediate_pass; }

}  // namespace

TEST(AnalyticBounds, Examples) {
  for (int d : {2, 3, 7}) {
    const RobustnessBounds b = analytic_bounds(d, 0.0);
    EXPECT_EQ(b.state_bound, 0.0);
    EXPECT_EQ(b.observable_bound, 0.0);
  }
  const RobustnessBounds b2 = analytic_bounds(2, 0.02);
  EXPECT_NEAR(b2.state_bound, 0.2 + 2 * std::sqrt(2.0) * std::pow(0.04, 0.25), 1e-12);
  EXPECT_NEAR(b2.state_bound, 1.46491, 1e-5);
  EXPECT_NEAR(b2.observable_bound, std::sqrt(2.0) * 0.2 * (1 + 4 * std::sqrt(2.0) * 0.2), 1e-12);
  EXPECT_NEAR(b2.observable_bound, 0.60284, 1e-5);
  EXPECT_NEAR(analytic_bounds(3, 0.01).state_bound, std::sqrt(0.02) + 2 * std::sqrt(3.0) * std::pow(0.02, 0.25), 1e-12);
  EXPECT_NEAR(analytic_bounds(3, 0.01).state_bound, 1.44413, 1e-5);
  EXPECT_THROW(analytic_bounds(2, -1e-3), std::invalid_argument);
  EXPECT_THROW(analytic_bounds(1, 0.1), std::invalid_argument);
}

TEST(AnalyticBounds, MonotoneInEpsilon) {
  for (int d : {2, 3, 5}) {
    RobustnessBounds prev = analytic_bounds(d, 0.0);
    for (int i = 1; i < 100; ++i) {
      const RobustnessBounds cur = analytic_bounds(d, 0.5 * i / 99.0);
      EXPECT_GE(cur.state_bound, prev.state_bound);
      EXPECT_GE(cur.observable_bound, prev.observable_bound);
      prev = cur;
    }
  }
}

TEST(ZBasis, PhiPlus) {
  for (int d : {2, 3, 5}) {
    const ZBasisDecomposition z = decompose_state_zbasis(maximally_entangled(d), d);
    for (int i = 0; i < d; ++i) {
      EXPECT_NEAR(z.alphas(i), 1 / std::sqrt(static_cast<double>(d)), 1e-14);
      ASSERT_TRUE(z.conditional[static_cast<std::size_t>(i)].has_value());
      EXPECT_LT((*z.conditional[static_cast<std::size_t>(i)] - Ket::Unit(d, i)).norm(), 1e-14);
    }
  }
}

TEST(ZBasis, ProductStateFlagsUndefinedBlock) {
  Ket psi = Ket::Zero(4);
  psi(0) = 1;
  const ZBasisDecomposition z = decompose_state_zbasis(psi, 2);
  EXPECT_EQ(z.alphas(0), 1.0);
  EXPECT_EQ(z.alphas(1), 0.0);
  EXPECT_FALSE(z.conditional[1].has_value());
}

TEST(ZBasis, JunkDirectionOracle) {
  const double theta = 0.3;
  CMatrix c = CMatrix::Zero(2, 3);
  c(0, 0) = c(1, 1) = std::cos(theta) / std::sqrt(2.0);
  c(0, 2) = std::sin(theta);  // |0>|junk>, junk = |2>
  const ZBasisDecomposition z = decompose_state_zbasis(from_coefficient_matrix(c), 2);
  EXPECT_NEAR(z.alphas(0), std::sqrt(std::pow(std::cos(theta), 2) / 2 + std::pow(std::sin(theta), 2)), 1e-14);
  EXPECT_NEAR(z.alphas(1), std::cos(theta) / std::sqrt(2.0), 1e-14);
}

TEST(ZBasis, ReconstructsRandomStates) {
  auto rng = rng_for(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 3, big_d = d + trial % 3;
    const Ket psi = random_ket(d * big_d, rng);
    const ZBasisDecomposition z = decompose_state_zbasis(psi, d);
    EXPECT_NEAR(z.alphas.squaredNorm(), 1.0, 1e-9);
    Ket rebuilt = Ket::Zero(d * big_d);
    for (int i = 0; i < d; ++i) {
      EXPECT_GE(z.alphas(i), 0.0);
      rebuilt.segment(i * big_d, big_d) = z.alphas(i) * *z.conditional[static_cast<std::size_t>(i)];
    }
    EXPECT_LT((rebuilt - psi).norm(), 1e-9);
  }
}

TEST(AlignmentUnitary, IdealQubitIsIdentity) {
  const Scenario s = ideal_family(2, 0);
  const CMatrix ub = alignment_unitary(s.bob()[1], decompose_state_zbasis(s.state(), 2));
  EXPECT_TRUE(matrices_near(ub, CMatrix::Identity(2, 2), 1e-12));
}

TEST(AlignmentUnitary, UndoesBobRotation) {
  auto rng = rng_for(62);
  const Scenario ideal = ideal_family(3, 0);
  const CMatrix w = random_unitary(3, rng);
  const Scenario s = steerkit::testing::rotate_bob(ideal, w);
  const CMatrix ub = alignment_unitary(s.bob()[1], decompose_state_zbasis(s.state(), 3));
  EXPECT_TRUE(matrices_near(ub, w.adjoint(), 1e-10));
  const CMatrix z_conj = generalized_pauli(3).second.matrix().conjugate();
  EXPECT_TRUE(matrices_near(ub * s.bob()[1].matrix() * ub.adjoint(), z_conj, 1e-10));
}

TEST(AlignmentUnitary, PerturbedQubitOverlapsStayLarge) {
  const Scenario s = perturb(ideal_family(2, 0), NoiseSpec{0.05, 0.0, 0});
  const RobustnessReport r = verify_theorem2(s, 0);
  EXPECT_TRUE(matrices_near(r.ub.adjoint() * r.ub, CMatrix::Identity(s.bob_dim(), s.bob_dim()), 1e-10));
  int seen = 0;
  for (const auto& c : r.checks)
    if (c.name == "aligned_overlap") {
      ++seen;
      EXPECT_TRUE(c.pass) << "j=" << c.k;
      EXPECT_NEAR(c.bound, 1 - 2 * 2 * std::sqrt(2 * r.epsilon), 1e-12);
    }
  EXPECT_EQ(seen, 2);
}

TEST(AlignmentUnitary, ReportsMissingIndices) {
  Ket psi = Ket::Zero(4);
  psi(0) = 1;
  const auto z = generalized_pauli(2).second;
  try {
    alignment_unitary(z, decompose_state_zbasis(psi, 2));
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    EXPECT_EQ(e.indices(), std::vector<int>{1});
  }
  // b_0 = |1> lies in the omega^1 eigenspace of Z, not omega^0.
  Ket swapped = Ket::Zero(4);
  swapped(1) = 1;
  try {
    alignment_unitary(z, decompose_state_zbasis(swapped, 2));
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    EXPECT_EQ(e.indices(), (std::vector<int>{0, 1}));
  }
}

TEST(RobustFamily, QubitOddPowerIsPhaseRepaired) {
  const auto alice = theorem2_alice(2, 1);
  const CMatrix y = (CMatrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished();
  EXPECT_TRUE(matrices_near(alice[0].matrix(), y, 1e-15));
  // Odd d uses X Z^l exactly.
  const auto [x, z] = generalized_pauli(3);
  EXPECT_TRUE(matrices_near(theorem2_alice(3, 2)[0].matrix(), x.matrix() * z.power(2), 1e-15));
  EXPECT_THROW(theorem2_alice(3, 3), std::invalid_argument);
}

TEST(Perturb, ZeroNoiseIsIdentity) {
  const Scenario ideal = ideal_family(3, 1);
  const Scenario same = perturb(ideal, NoiseSpec{0.0, 0.0, 5});
  EXPECT_EQ(same.bob_dim(), ideal.bob_dim());
  EXPECT_EQ((same.state() - ideal.state()).norm(), 0.0);
  EXPECT_NEAR(verify_theorem2(same, 1).epsilon, 0.0, 1e-12);
}

TEST(Perturb, SeededAndReproducible) {
  const Scenario ideal = ideal_family(2, 0);
  const Scenario a = perturb(ideal, NoiseSpec{0.1, 0.0, 7}), b = perturb(ideal, NoiseSpec{0.1, 0.0, 7});
  const double ea = quantum_max(2, 2) - steering_value(a), eb = quantum_max(2, 2) - steering_value(b);
  EXPECT_GT(ea, 0.0);
  EXPECT_EQ(ea, eb);
  EXPECT_EQ(a.bob_dim(), 4);
  const Scenario c = perturb(ideal, NoiseSpec{0.1, 0.0, 8});
  EXPECT_NE((a.state() - c.state()).norm(), 0.0);
}

TEST(Perturb, ObservableNoiseKeepsValidObservables) {
  const Scenario s = perturb(ideal_family(3, 0), NoiseSpec{0.0, 0.05, 2});
  EXPECT_EQ(s.bob_dim(), 3);
  for (const auto& b : s.bob()) EXPECT_TRUE(validate_observable(b.matrix(), 3).passes);
}

TEST(Perturb, EpsilonIsContinuousInTheta) {
  const Scenario ideal = ideal_family(2, 0);
  double prev = 1.0;
  for (double theta : {1e-2, 1e-3, 1e-4}) {
    const double eps = quantum_max(2, 2) - steering_value(perturb(ideal, NoiseSpec{theta, 0.0, 7}));
    EXPECT_LT(eps, prev);
    EXPECT_GE(eps, -1e-12);
    prev = eps;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(Perturb, InvalidSpec) {
  const Scenario ideal = ideal_family(2, 0);
  EXPECT_THROW(perturb(ideal, NoiseSpec{-0.1, 0.0, 0}), std::invalid_argument);
  EXPECT_THROW(perturb(ideal, NoiseSpec{2.0, 0.0, 0}), std::invalid_argument);
  EXPECT_THROW(perturb(ideal, NoiseSpec{0.1, -1.0, 0}), std::invalid_argument);
}

TEST(ProofChain, IdealScenario) {
  for (int d : {2, 3, 5})
    for (int l : {0, 1}) {
      const RobustnessReport r = verify_theorem2(ideal_family(d, l), l);
      EXPECT_NEAR(r.epsilon, 0.0, 1e-12);
      EXPECT_LT(r.max_state_distance, 1e-9);
      EXPECT_LT(r.max_observable_distance_sq, 1e-9);
      EXPECT_TRUE(all_pass(r)) << "d=" << d << " l=" << l;
    }
}

TEST(ProofChain, NoisyQubitPoint) {
  const Scenario s = perturb(ideal_family(2, 0), NoiseSpec{0.05, 0.02, 3});
  const RobustnessReport r = verify_theorem2(s, 0);
  EXPECT_GT(r.epsilon, 0.0);
  EXPECT_TRUE(r.all_bounds_pass);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " i=" << c.i << " k=" << c.k;
}

TEST(ProofChain, QutritSweep) {
  const Scenario ideal = ideal_family(3, 1);
  for (int i = 1; i <= 10; ++i) {
    const RobustnessReport r = verify_theorem2(perturb(ideal, NoiseSpec{0.01 * i, 0.0, 11}), 1);
    EXPECT_TRUE(all_pass(r)) << "theta=" << 0.01 * i;
  }
}

TEST(ProofChain, WrongFamilyRejected) {
  EXPECT_THROW(verify_theorem2(ideal_family(3, 1), 0), std::invalid_argument);
  const auto [x, z] = generalized_pauli(3);
  EXPECT_THROW(verify_theorem2(ideal_realization(std::vector<QuditObservable>{z, x}), 0), std::invalid_argument);
}

TEST(ProofChain, TriangleChainAndStateIdentity) {
  for (int d : {2, 3}) {
    const Scenario s = perturb(ideal_family(d, 1), NoiseSpec{0.04, 0.01, 4});
    const RobustnessReport r = verify_theorem2(s, 1);
    for (const auto& c : r.checks)
      if (c.name == "triangle_chain") {
        EXPECT_GE(c.margin, -1e-10);
      }
    // ||M||_2^2 = d ||(1 (x) M) phi+||^2 for the compressed observable differences.
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < d; ++k) {
        const CMatrix m = (r.ub * s.bob()[static_cast<std::size_t>(i)].power(k) * r.ub.adjoint()).topLeftCorner(d, d) -
                          s.alice()[static_cast<std::size_t>(i)].power(k).conjugate();
        const double via_state = d * apply_local(CMatrix::Identity(d, d), m, maximally_entangled(d)).squaredNorm();
        EXPECT_NEAR(m.squaredNorm(), via_state, 1e-10);
        EXPECT_NEAR(r.observable_distances_sq(i, k), m.squaredNorm(), 1e-12);
      }
  }
}

TEST(ProofChain, ReducesToExactCaseAtZeroEpsilon) {
  auto rng = rng_for(63);
  const Scenario s = steerkit::testing::rotate_bob(ideal_family(3, 0), random_unitary(3, rng));
  const RobustnessReport r = verify_theorem2(s, 0);
  const CertificationReport c = certify(s, 1e-8);
  EXPECT_LT(r.aligned_state_distance, 1e-9);
  EXPECT_LT(c.state_error, 1e-9);
}

TEST(NormExpansion, UnitVectors) {
  auto rng = rng_for(64);
  for (int trial = 0; trial < 200; ++trial) {
    const Ket u = random_ket(5, rng), v = random_ket(5, rng);
    EXPECT_NEAR((u - v).squaredNorm(), 2 * (1 - u.dot(v).real()), 1e-12);
  }
}

TEST(ParseGrid, Syntax) {
  EXPECT_EQ(parse_grid("0.5"), std::vector<double>{0.5});
  const auto g = parse_grid("0:0.1:5");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[4], 0.4);
  EXPECT_EQ(parse_grid("0.1:0:1"), std::vector<double>{0.1});
  for (const char* bad : {"0.1:0:5", "", "a", "0:1", "0:1:0", "0:1:x", "0:1:2:3", "0:1:2.5", "nan"})
    EXPECT_THROW(parse_grid(bad), std::invalid_argument) << bad;
}

TEST(RunSweep, OrderedAndDeterministic) {
  const std::vector<double> thetas{0.0, 0.05}, deltas{0.0, 0.02, 0.04};
  const auto a = run_sweep(2, 0, thetas, deltas, 7), b = run_sweep(2, 0, thetas, deltas, 7);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t p = 0; p < a.size(); ++p) {
    EXPECT_EQ(a[p].index, static_cast<int>(p));
    EXPECT_EQ(a[p].theta, thetas[p / 3]);
    EXPECT_EQ(a[p].delta, deltas[p % 3]);
    EXPECT_EQ(a[p].epsilon, b[p].epsilon);
    EXPECT_EQ(a[p].max_state_distance, b[p].max_state_distance);
    EXPECT_TRUE(a[p].error.empty());
    EXPECT_TRUE(a[p].all_bounds_pass && a[p].all_intermediate_pass);
  }
}
