#include "grape/models.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace grape {
namespace {

TEST(BuildModel, IdealTwoQubitDriftGivesIswapAtHalfInverseJ) {
  const ControlModel m = build_model(ModelKind::Ideal2, {.J = 1.0});
  EXPECT_LT(max_abs(expm_hermitian(m.drift, 0.5) - iswap_matrix()), 1e-12);
}

TEST(BuildModel, DriftScalesWithJ) {
  // With J in MHz and time in microseconds the iSWAP takes 1/(2J).
  const ControlModel m = build_model(ModelKind::Real2, {.J = 21.0});
  EXPECT_LT(max_abs(expm_hermitian(m.drift, 0.5 / 21.0) - iswap_matrix()), 1e-12);
}

TEST(BuildModel, RealisticDefaultsCarryPublishedBounds) {
  const ControlModel m = build_model(ModelKind::Real2, {.J = 21.0});
  ASSERT_EQ(m.channel_count(), 3);
  EXPECT_EQ(m.channels[0].bound.value(), 1000.0);
  EXPECT_EQ(m.channels[1].bound.value(), 1000.0);
  EXPECT_EQ(m.channels[2].bound.value(), 50.0);
  EXPECT_EQ(m.J, 21.0);
}

TEST(BuildModel, ChannelCountsPerKind) {
  EXPECT_EQ(build_model(ModelKind::Ideal2).channel_count(), 4);
  EXPECT_EQ(build_model(ModelKind::Ideal3).channel_count(), 6);
  EXPECT_EQ(build_model(ModelKind::Real2).channel_count(), 3);
  EXPECT_EQ(build_model(ModelKind::Real3).channel_count(), 5);
  for (const auto& c : build_model(ModelKind::Ideal3).channels) EXPECT_FALSE(c.bound.has_value());
}

TEST(BuildModel, ThreeQubitDriftConservesExcitationNumber) {
  const ControlModel m = build_model(ModelKind::Ideal3, {.J = 3.7});
  ComplexMatrix total_z = ComplexMatrix::Zero(8, 8);
  for (int q = 1; q <= 3; ++q) total_z += embed_pauli(PauliAxis::Z, q, 3);
  EXPECT_LT(max_abs(m.drift * total_z - total_z * m.drift), 1e-12);
}

TEST(BuildModel, OperatorsHermitianAndDriftTraceless) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto kind : {ModelKind::Ideal2, ModelKind::Ideal3, ModelKind::Real2, ModelKind::Real3}) {
    const ControlModel m = build_model(kind);
    EXPECT_TRUE(is_hermitian(m.drift)) << to_string(kind);
    EXPECT_NEAR(std::abs(m.drift.trace()), 0.0, 1e-12);
    for (const auto& c : m.channels) EXPECT_TRUE(is_hermitian(c.op)) << c.label;
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> a(m.channel_count());
      for (int j = 0; j < m.channel_count(); ++j)
        a[j] = u(rng) * m.channels[j].bound.value_or(m.J);
      EXPECT_LE(hermiticity_error(m.hamiltonian(a)), 1e-12 * 1e3);
    }
  }
}

TEST(BuildModel, RealisticTwoQubitHamiltonianIsRealSymmetric) {
  const ControlModel m = build_model(ModelKind::Real2);
  const ComplexMatrix h = m.hamiltonian(std::vector<double>{0.0, 0.0, 17.0});
  EXPECT_EQ(h.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(max_abs(h - h.transpose()), 0.0);
}

TEST(BuildModel, ChannelOperatorsCarryPiPrefactor) {
  const ControlModel m = build_model(ModelKind::Ideal2, {.J = 1.0});
  EXPECT_LT(max_abs(m.channels[0].op - kPi * embed_pauli(PauliAxis::X, 1, 2)), 1e-15);
  EXPECT_EQ(m.channels[0].label, "Ox1");
  EXPECT_EQ(m.channels[3].label, "Oy2");
}

TEST(BuildModel, RejectsBadInput) {
  EXPECT_THROW(build_model("ideal4"), std::invalid_argument);
  EXPECT_THROW(build_model(ModelKind::Ideal2, {.J = 0.0}), std::invalid_argument);
  EXPECT_THROW(build_model(ModelKind::Ideal2, {.J = -1.0}), std::invalid_argument);
}

TEST(TimeUnits, InverseJInNanoseconds) {
  EXPECT_NEAR(tau_to_ns(1.0, 21.0), 47.619, 1e-3);
  EXPECT_NEAR(ns_to_tau(tau_to_ns(1.4, 21.0), 21.0), 1.4, 1e-14);
}

TEST(GateTarget, IswapMatchesCouplingEvolution) {
  const GateTarget g = gate_target("iswap12", 2);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 1;
  expected(1, 2) = -kI;
  expected(2, 1) = -kI;
  expected(3, 3) = 1;
  EXPECT_EQ(max_abs(g.matrix - expected), 0.0);
  EXPECT_EQ(g.acting_pair, (std::pair{1, 2}));
}

TEST(GateTarget, CnotWithQubitOneControl) {
  const ComplexMatrix c = gate_target("cnot12", 2).matrix;
  EXPECT_EQ(c(0, 0), cplx(1));
  EXPECT_EQ(c(1, 1), cplx(1));
  EXPECT_EQ(c(3, 2), cplx(1));
  EXPECT_EQ(c(2, 3), cplx(1));
  EXPECT_EQ(max_abs(c * c - ComplexMatrix::Identity(4, 4)), 0.0);
}

TEST(GateTarget, IndirectIswapEqualsSwapConjugation) {
  // Brute-force oracle: SWAP_12 . iSWAP_23 . SWAP_12 built from Kronecker products.
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix swap12 = kron(swap_matrix(), id2);
  const ComplexMatrix iswap23 = kron(id2, iswap_matrix());
  const ComplexMatrix oracle = swap12 * iswap23 * swap12;
  EXPECT_LT(max_abs(gate_target("iswap13", 3).matrix - oracle), 1e-15);
}

TEST(GateTarget, IndirectGatesAreIdentityOnMediator) {
  std::mt19937_64 rng(4);
  for (const char* name : {"iswap13", "cnot13", "swap13"}) {
    const GateTarget g = gate_target(name, 3);
    EXPECT_TRUE(is_unitary(g.matrix, 1e-12));
    const ComplexMatrix on_mediator = embed(testing::random_unitary(rng, 2), 2, 3);
    EXPECT_LT(max_abs(g.matrix * on_mediator - on_mediator * g.matrix), 1e-12) << name;
  }
}

TEST(GateTarget, DirectGateEmbedsWithIdentityOnThirdQubit) {
  const ComplexMatrix g = gate_target("cnot12", 3).matrix;
  EXPECT_LT(max_abs(g - kron(cnot_matrix(), ComplexMatrix::Identity(2, 2))), 1e-15);
}

TEST(GateTarget, RejectsMismatches) {
  EXPECT_THROW(gate_target("iswap13", 2), std::invalid_argument);
  EXPECT_THROW(gate_target("toffoli", 3), std::invalid_argument);
  EXPECT_THROW(gate_target("cnot23", 3), std::invalid_argument);
  EXPECT_THROW(gate_target("", 3), std::invalid_argument);
}

}  // namespace
}  // namespace grape
