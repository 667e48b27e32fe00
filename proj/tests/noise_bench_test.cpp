#include <gtest/gtest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <random>

#include "dfsaqc/dfs_code.hpp"
#include "dfsaqc/noise_bench.hpp"

using namespace dfsaqc;
using C = std::complex<double>;

namespace {

State sector_superposition(int n, std::uint64_t seed) {
  const SpaceMap map = dfs_basis(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(map.dfs_indices().size()));
  for (auto& a : v) a = C(g(rng), g(rng));
  return embed(State::normalized(Space::dfs(n), v), Space::full(n), map);
}

// (|uu> + |dd>)/sqrt(2): Z_t = +2 and -2 components
State cross_sector_pair() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return State(Space::full(2), v);
}

Operator symmetric_system(int n) {
  Operator H = xxx_pairs(n, 1.0);
  for (int l = 1; l <= n / 2; ++l) H = H + (0.3 * l) * logical_op(LogicalAxis::X, l, n);
  return H;
}

Operator zero_op(int n) { return Operator(Space::full(n), CMatrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n)); }

}  // namespace

TEST(Bath, CouplingAndGroundState) {
  const SpinBath b{2, 0.7, 0.3};
  EXPECT_LT(max_abs_diff(bath_coupling(b).dense(), (0.7 * total_z(2)).dense()), 1e-15);
  const CVector g = bath_ground_state(b);
  EXPECT_NEAR(g.norm(), 1.0, 1e-14);
  EXPECT_NEAR(g.dot(bath_hamiltonian(b).apply(g)).real(), -0.6, 1e-12);
}

TEST(Bath, JointHamiltonianMatchesKroneckerForm) {
  const SpinBath b{1, 0.8, 0.3};
  const Operator hs = symmetric_system(2);
  const CMatrix id_s = CMatrix::Identity(4, 4), id_b = CMatrix::Identity(2, 2);
  const CMatrix ref = Eigen::kroneckerProduct(hs.dense(), id_b).eval() +
                      Eigen::kroneckerProduct(id_s, bath_hamiltonian(b).dense()).eval() +
                      Eigen::kroneckerProduct(total_z(2).dense(), bath_coupling(b).dense()).eval();
  EXPECT_LT(max_abs_diff(joint_hamiltonian(hs, b).dense(), ref), 1e-14);
}

TEST(Bath, Guards) {
  EXPECT_THROW(validate_bath(SpinBath{5, 1, 0.3}, 2), DimensionError);
  EXPECT_THROW(validate_bath(SpinBath{4, 1, 0.3}, 10), DimensionError);
  EXPECT_NO_THROW(validate_bath(SpinBath{4, 1, 0.3}, 8));
  StochasticBath st;
  st.ensemble = 99;
  EXPECT_THROW(validate_bath(st, 4), std::invalid_argument);
  st.ensemble = 100;
  EXPECT_NO_THROW(validate_bath(st, 4));
  st.dt = 0;
  EXPECT_THROW(validate_bath(st, 4), std::invalid_argument);
}

TEST(Helpers, PurityAndFidelity) {
  EXPECT_NEAR(purity(CMatrix::Identity(4, 4) / 4.0), 0.25, 1e-15);
  const CVector psi = cross_sector_pair().amplitudes();
  const CMatrix rho = psi * psi.adjoint();
  EXPECT_NEAR(purity(rho), 1.0, 1e-15);
  EXPECT_NEAR(state_fidelity(rho, psi), 1.0, 1e-15);
}

TEST(JointEvolve, SectorStateStaysPureUnderSpinBath) {
  for (int n : {2, 4, 6}) {
    for (int m : {1, 2}) {
      const Operator H = symmetric_system(n);
      const State psi = sector_superposition(n, 10 + static_cast<std::uint64_t>(n));
      const double t = 2.5;
      const BathRun run = joint_evolve(H, SpinBath{m, 1.0, 0.3}, psi, t);
      const State closed = closed_evolve(constant_protocol(H, t), psi);
      EXPECT_NEAR(purity(run.rho), 1.0, 1e-10) << n << " " << m;
      EXPECT_NEAR(state_fidelity(run.rho, closed.amplitudes()), 1.0, 1e-10);
      EXPECT_LT(run.max_purity_loss, 1e-10);
      EXPECT_TRUE(run.symmetric);
    }
  }
}

TEST(JointEvolve, CrossSectorSuperpositionDecoheres) {
  const BathRun run = joint_evolve(zero_op(2), SpinBath{1, 1.0, 0.3}, cross_sector_pair(), 2.0);
  EXPECT_LT(purity(run.rho), 0.9);
  EXPECT_GT(run.max_purity_loss, 0.1);
}

TEST(JointEvolve, CrossSectorPurityMatchesTwoLevelBathFormula) {
  // the sectors Z_t = +-2 drive the bath spin with H_pm = +-2g Z + h X; the
  // coherence is <chi|U_-^dagger U_+|chi> and purity = (1 + |c|^2)/2
  const double g = 1.0, h = 0.3;
  const CMatrix X = pauli(Pauli::X, 0, 1).dense(), Z = pauli(Pauli::Z, 0, 1).dense();
  const CVector chi = bath_ground_state(SpinBath{1, g, h});
  for (double t : {1.0, 2.0, 3.0, 5.0}) {
    const CMatrix up = expm_hermitian(Operator(Space::full(1), CMatrix(2 * g * Z + h * X)), t);
    const CMatrix um = expm_hermitian(Operator(Space::full(1), CMatrix(-2 * g * Z + h * X)), t);
    const C c = (um * chi).dot(up * chi);
    const BathRun run = joint_evolve(zero_op(2), SpinBath{1, g, h}, cross_sector_pair(), t);
    EXPECT_NEAR(purity(run.rho), (1 + std::norm(c)) / 2, 1e-10) << t;
  }
}

TEST(JointEvolve, DecoupledBathEqualsClosedEvolution) {
  // holds for any system Hamiltonian, symmetric or not
  const Operator H = xxx_pairs(2, 1.0) + 0.7 * pauli(Pauli::X, 0, 2);
  const State psi = cross_sector_pair();
  const BathRun run = joint_evolve(H, SpinBath{2, 0.0, 0.3}, psi, 1.9);
  const CVector closed = closed_evolve(constant_protocol(H, 1.9), psi).amplitudes();
  EXPECT_LT(max_abs_diff(run.rho, (closed * closed.adjoint()).eval()), 1e-12);
  EXPECT_FALSE(run.symmetric);
}

TEST(JointEvolve, StochasticBathLeavesSectorStateIntact) {
  StochasticBath st;
  st.ensemble = 200;
  const Operator H = symmetric_system(4);
  const State psi = sector_superposition(4, 3);
  const BathRun run = joint_evolve(H, st, psi, 3.0);
  const State closed = closed_evolve(constant_protocol(H, 3.0), psi);
  EXPECT_NEAR(state_fidelity(run.rho, closed.amplitudes()), 1.0, 3.0 / std::sqrt(200.0));
  EXPECT_NEAR(purity(run.rho), 1.0, 1e-10);
}

TEST(JointEvolve, StochasticBathDephasesCrossSectorState) {
  StochasticBath st;
  st.amplitude = 1.0;
  st.ensemble = 300;
  const BathRun run = joint_evolve(zero_op(2), st, cross_sector_pair(), 4.0);
  EXPECT_LT(purity(run.rho), 0.9);
}

TEST(JointEvolve, StochasticAverageIsReproducibleForFixedSeed) {
  StochasticBath st;
  st.ensemble = 120;
  const BathRun a = joint_evolve(zero_op(2), st, cross_sector_pair(), 2.0);
  const BathRun b = joint_evolve(zero_op(2), st, cross_sector_pair(), 2.0);
  EXPECT_EQ(max_abs_diff(a.rho, b.rho), 0.0);
  st.seed = 8;
  const BathRun c = joint_evolve(zero_op(2), st, cross_sector_pair(), 2.0);
  EXPECT_GT(max_abs_diff(a.rho, c.rho), 0.0);
}

TEST(JointEvolveProperty, TraceAndPositivity) {
  const Operator broken = symmetric_system(4) + 0.5 * pauli(Pauli::X, 0, 4);
  const BathModel baths[] = {SpinBath{2, 1.0, 0.3}, StochasticBath{}};
  for (const auto& bath : baths) {
    const BathRun run = joint_evolve(broken, bath, sector_superposition(4, 1), 4.0);
    EXPECT_NEAR(run.min_trace, 1.0, 1e-12);
    EXPECT_NEAR(run.max_trace, 1.0, 1e-12);
    EXPECT_GE(run.min_eigenvalue, -1e-12);
    EXPECT_NEAR(run.rho.trace().real(), 1.0, 1e-12);
    EXPECT_LT(max_abs_diff(run.rho, run.rho.adjoint().eval()), 1e-13);
  }
}

TEST(JointEvolveProperty, ProtocolSegmentsCompose) {
  const Operator H = symmetric_system(4);
  const State psi = sector_superposition(4, 2);
  const CVector a = closed_evolve(constant_protocol(H, 2.0, 1), psi).amplitudes();
  const CVector b = closed_evolve(constant_protocol(H, 2.0, 17), psi).amplitudes();
  EXPECT_LT((a - b).norm(), 1e-12);
  EXPECT_THROW(constant_protocol(H, 1.0, 0), std::invalid_argument);
}

TEST(SectorChannel, IsIdentityOnTheZeroSector) {
  for (int n : {2, 4}) {
    for (int m : {1, 3}) EXPECT_LT(sector_channel_deviation(n, SpinBath{m, 1.0, 0.3}, 2.7), 1e-10) << n << m;
  }
}

TEST(Factorization, HoldsForSymmetricSystem) {
  EXPECT_LT(factorization_deviation(symmetric_system(4), SpinBath{1, 1.0, 0.3}, 3.0), 1e-9);
  EXPECT_LT(factorization_deviation(xxx_pairs(4, 1.0), SpinBath{2, 0.6, 0.3}, 5.0), 1e-9);
}

TEST(Factorization, FailsWhenSymmetryIsBroken) {
  const Operator broken = symmetric_system(4) + 0.5 * pauli(Pauli::X, 0, 4);
  EXPECT_GT(factorization_deviation(broken, SpinBath{1, 1.0, 0.3}, 3.0), 1e-3);
}

TEST(Protection, ContinuousGroverIsImmuneToSpinBath) {
  for (int n : {4, 6}) {
    const auto r = protection_report(ProtectedProtocol::ContinuousGrover, SpinBath{1, 1.0, 0.3}, n);
    EXPECT_LT(std::abs(r.difference), 1e-8) << n;
    EXPECT_TRUE(r.symmetric);
    EXPECT_LT(r.max_purity_loss, 1e-10);
    EXPECT_GT(r.fidelity_without_bath, 0.9);
    EXPECT_NEAR(r.difference, r.fidelity_with_bath - r.fidelity_without_bath, 1e-15);
  }
}

TEST(Protection, StrayFieldExposesTheStateToDephasing) {
  ProtectionOptions opt;
  opt.stray_field = 0.5;
  const auto r = protection_report(ProtectedProtocol::ContinuousGrover, SpinBath{1, 1.0, 0.3}, 4, opt);
  EXPECT_FALSE(r.symmetric);
  EXPECT_GT(std::abs(r.difference), 1e-3);
  EXPECT_GT(r.max_purity_loss, 1e-3);
}

TEST(Protection, TrotterizedAqcIsImmune) {
  const auto r = protection_report(ProtectedProtocol::TrotterizedAqc, SpinBath{2, 1.0, 0.3}, 4);
  EXPECT_LT(std::abs(r.difference), 1e-8);
  EXPECT_TRUE(r.symmetric);
  const auto s = protection_report(ProtectedProtocol::TrotterizedAqc, StochasticBath{}, 4);
  EXPECT_LT(std::abs(s.difference), 3.0 / std::sqrt(200.0));
}

TEST(Protection, ArgumentChecks) {
  EXPECT_THROW(protection_report(ProtectedProtocol::ContinuousGrover, SpinBath{}, 5), std::invalid_argument);
  EXPECT_EQ(parse_protected_protocol(to_string(ProtectedProtocol::TrotterizedAqc)), ProtectedProtocol::TrotterizedAqc);
  EXPECT_THROW(parse_protected_protocol("lindblad"), std::invalid_argument);
}
