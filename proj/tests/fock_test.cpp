#include "zeno/fock.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace zeno;

namespace {

CMatrix random_hermitian(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return 0.5 * (m + CMatrix(m.adjoint()));
}

CVector random_state(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(dist(rng), dist(rng));
  return normalized(v);
}

}  // namespace

TEST(ModeSpace, RejectsTooSmallCutoff) {
  EXPECT_THROW(ModeSpace(1), std::invalid_argument);
  EXPECT_THROW(ModeSpace(0), std::invalid_argument);
  EXPECT_NO_THROW(ModeSpace(2));
}

TEST(LadderOps, Cutoff2Annihilation) {
  const LadderOps ops = ladder_ops(ModeSpace(2));
  EXPECT_EQ(ops.annihilation(0, 0), Complex(0.0));
  EXPECT_EQ(ops.annihilation(0, 1), Complex(1.0));
  EXPECT_EQ(ops.annihilation(1, 0), Complex(0.0));
  EXPECT_EQ(ops.annihilation(1, 1), Complex(0.0));
}

TEST(LadderOps, Cutoff3Entries) {
  const LadderOps ops = ladder_ops(ModeSpace(3));
  EXPECT_DOUBLE_EQ(ops.annihilation(0, 1).real(), 1.0);
  EXPECT_NEAR(ops.annihilation(1, 2).real(), 1.41421356, 1e-8);
  EXPECT_EQ(max_abs(ops.creation - ops.annihilation.adjoint()), 0.0);
}

TEST(LadderOps, NumberOperatorIsExactlyDiagonal) {
  const LadderOps ops = ladder_ops(ModeSpace(4));
  for (int k = 0; k < 4; ++k)
    EXPECT_EQ(ops.number(k, k), Complex(static_cast<double>(k)));
  // the explicit diagonal is exact; the operator product only up to
  // sqrt(k)*sqrt(k) roundoff
  EXPECT_LE(max_abs(ops.number - ops.creation * ops.annihilation), 1e-14);
}

TEST(HermitianPropagator, ZeroGeneratorGivesIdentity) {
  const CMatrix u = hermitian_propagator(CMatrix::Zero(5, 5), 1.7);
  EXPECT_LE(max_abs(u - CMatrix::Identity(5, 5)), 1e-14);
}

TEST(HermitianPropagator, PauliXQuarterTurn) {
  CMatrix h(2, 2);
  h << 0.0, 1.0, 1.0, 0.0;
  const CMatrix u = hermitian_propagator(h, std::numbers::pi / 2.0);
  CMatrix want(2, 2);
  want << 0.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 0.0;
  EXPECT_LE(max_abs(u - want), 1e-12);
}

TEST(HermitianPropagator, RejectsNonHermitianWithDiagnostic) {
  CMatrix h(2, 2);
  h << 0.0, 1.0, 0.0, 0.0;
  try {
    hermitian_propagator(h, 1.0);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("Hermitian"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("defect"), std::string::npos);
  }
}

TEST(HermitianPropagator, UnitarityAcrossCutoffs) {
  for (int dim : {2, 8, 16, 64}) {
    const CMatrix u =
        hermitian_propagator(random_hermitian(dim, 17u + dim), 0.9);
    EXPECT_LE(unitarity_defect(u), kUnitarityTol) << "dim " << dim;
  }
}

TEST(HermitianPropagator, GroupComposition) {
  const CMatrix h = random_hermitian(12, 99);
  const CMatrix u = hermitian_propagator(h, 0.31) * hermitian_propagator(h, 0.47);
  EXPECT_LE(max_abs(u - hermitian_propagator(h, 0.78)), 1e-10);
}

TEST(KerrUnitary, ZeroStrengthIsIdentity) {
  const CMatrix u = kerr_unitary(0.0, ModeSpace(3), ModeSpace(4));
  EXPECT_LE(max_abs(u - CMatrix::Identity(12, 12)), 1e-15);
}

TEST(KerrUnitary, FullTurnIsIdentity) {
  const CMatrix u =
      kerr_unitary(2.0 * std::numbers::pi, ModeSpace(4), ModeSpace(4));
  EXPECT_LE(max_abs(u - CMatrix::Identity(16, 16)), 1e-12);
}

TEST(KerrUnitary, PhaseEntryMatchesProduct) {
  const ModeSpace a(4), b(3);
  const CMatrix u = kerr_unitary(0.2, a, b);
  const int flat = 2 * b.dim() + 1;  // j=2, m=1
  EXPECT_LE(std::abs(u(flat, flat) - std::exp(Complex(0.0, 0.4))), 1e-15);
  EXPECT_LE(unitarity_defect(u), 1e-14);
}

TEST(KerrUnitary, CommutesWithNumberOperatorsExactly) {
  const ModeSpace a(4), b(5);
  const CMatrix u = kerr_unitary(0.7, a, b);
  const CMatrix na =
      kron(ladder_ops(a).number, CMatrix::Identity(b.dim(), b.dim()));
  const CMatrix nb =
      kron(CMatrix::Identity(a.dim(), a.dim()), ladder_ops(b).number);
  EXPECT_EQ(max_abs(u * na - na * u), 0.0);
  EXPECT_EQ(max_abs(u * nb - nb * u), 0.0);
}

TEST(Fidelity, KnownOverlaps) {
  CVector u(2), v(2), w(2);
  u << 1.0, 0.0;
  v << 0.0, 1.0;
  w << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  EXPECT_NEAR(fidelity(u, u), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(u, v), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(u, w), 0.5, 1e-15);
}

TEST(Fidelity, RejectsZeroNorm) {
  CVector u(2), z = CVector::Zero(2);
  u << 1.0, 0.0;
  EXPECT_THROW(fidelity(u, z), std::invalid_argument);
  EXPECT_THROW(fidelity(z, u), std::invalid_argument);
}

TEST(Normalized, UnitNormWithinTolerance) {
  CVector v(3);
  v << Complex(1.0, 2.0), Complex(-0.5, 0.0), Complex(0.0, 3.0);
  EXPECT_LE(std::abs(normalized(v).norm() - 1.0), 1e-12);
  EXPECT_THROW(normalized(CVector::Zero(3)), std::invalid_argument);
}

TEST(JointState, FlattenUsesSignalMajorOrder) {
  JointState s(3, 4);
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m < 4; ++m) s.amps(j, m) = Complex(j, m);
  const CVector flat = s.flattened();
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m < 4; ++m) EXPECT_EQ(flat(j * 4 + m), Complex(j, m));
  const JointState back = JointState::from_flat(flat, 3, 4);
  EXPECT_EQ(max_abs(back.amps - s.amps), 0.0);
}

TEST(JointState, ProductStateMarginals) {
  const CVector a = random_state(3, 5), b = random_state(4, 6);
  const JointState s = JointState::product(a, b);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  const RVector ma = s.signal_marginal(), mb = s.probe_marginal();
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(ma(j), std::norm(a(j)), 1e-12);
  for (int m = 0; m < 4; ++m) EXPECT_NEAR(mb(m), std::norm(b(m)), 1e-12);
}

TEST(JointState, NormConservedThroughUnitaryPipeline) {
  const ModeSpace a(6), b(5);
  const JointState s = JointState::product(random_state(6, 7), random_state(5, 8));
  CVector flat = s.flattened();
  const CMatrix u1 = kron(hermitian_propagator(random_hermitian(6, 21), 0.4),
                          CMatrix::Identity(5, 5));
  const CMatrix u2 = kerr_unitary(0.9, a, b);
  for (int round = 0; round < 4; ++round) flat = u2 * (u1 * flat);
  EXPECT_LE(std::abs(flat.norm() - 1.0), 1e-10);
}
