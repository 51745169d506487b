#include "qzeno/channels.hpp"
#include "qzeno/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

using namespace qzeno;
using qzeno::testing::random_state;

namespace {

const double kPi = std::numbers::pi;

WeightOperator plus_state() {
    ComplexMatrix m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return WeightOperator(m);
}

} // namespace

// ---------------------------------------------------------------------------
// evolve_unitary

TEST(EvolveUnitary, ZeroDurationIsIdentity) {
    Rng rng(1);
    const auto s = random_state(rng, 3);
    const auto h = HamiltonianSpec(qzeno::testing::random_hermitian(rng, 3));
    EXPECT_EQ(max_abs(evolve_unitary(s, h, 0.0).matrix() - s.matrix()), 0.0);
}

TEST(EvolveUnitary, HalfPeriodRabiFlip) {
    const double omega = 2.0;
    const auto out = evolve_unitary(WeightOperator::basis_state(2, 0), HamiltonianSpec::rabi(omega), kPi / omega);
    EXPECT_LE(max_abs(out.matrix() - basis_op(2, 1, 1)), 1e-14);
}

TEST(EvolveUnitary, RabiPopulationMatchesClosedForm) {
    const double omega = 1.3;
    const auto h = HamiltonianSpec::rabi(omega);
    const auto s0 = WeightOperator::basis_state(2, 0);
    EXPECT_NEAR(evolve_unitary(s0, h, (kPi / 2) / omega).matrix()(0, 0).real(), 0.5, 1e-14);
    for (double t : {0.1, 0.7, 1.9, 4.2}) {
        const double expected = std::pow(std::cos(omega * t / 2.0), 2);
        EXPECT_NEAR(evolve_unitary(s0, h, t).matrix()(0, 0).real(), expected, 1e-13) << "t=" << t;
    }
}

TEST(EvolveUnitary, PropagatorIsUnitary) {
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        const auto h = HamiltonianSpec(qzeno::testing::random_hermitian(rng, 5));
        const ComplexMatrix u = h.propagator(0.37 * (i + 1));
        EXPECT_LE(max_abs(u.adjoint() * u - identity(5)), 1e-10);
    }
}

TEST(EvolveUnitary, PreservesTraceAndSpectrum) {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_state(rng, 4, 2.5);
        const auto h = HamiltonianSpec(qzeno::testing::random_hermitian(rng, 4));
        const auto out = evolve_unitary(s, h, 0.9);
        EXPECT_NEAR(out.trace(), s.trace(), 1e-12);
        const RealVector before = hermitian_eigenvalues(s.matrix());
        const RealVector after = hermitian_eigenvalues(out.matrix());
        EXPECT_LE((before - after).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(EvolveUnitary, RejectsNonHermitianAndNegativeTime) {
    EXPECT_THROW(HamiltonianSpec(basis_op(2, 0, 1)), ValidationError);
    EXPECT_THROW((void)evolve_unitary(WeightOperator(identity(2)), HamiltonianSpec::rabi(1.0), -0.1),
                 PreconditionError);
    EXPECT_THROW((void)evolve_unitary(WeightOperator(identity(3)), HamiltonianSpec::rabi(1.0), 0.1), DimensionError);
}

TEST(HamiltonianSpec, PresetsAndSpectralWidth) {
    EXPECT_NEAR(HamiltonianSpec::rabi(3.0).spectral_width(), 3.0, 1e-14);
    const auto c = HamiltonianSpec::coupling(4, 0, 2, 2.0);
    EXPECT_EQ(c.matrix()(0, 2), Complex(1.0, 0.0));
    EXPECT_EQ(c.matrix()(2, 0), Complex(1.0, 0.0));
    const auto r1 = HamiltonianSpec::random(5, 4);
    const auto r2 = HamiltonianSpec::random(5, 4);
    EXPECT_EQ(r1.matrix(), r2.matrix());
    EXPECT_NE(HamiltonianSpec::random(6, 4).matrix(), r1.matrix());
}

// ---------------------------------------------------------------------------
// apply_dephasing

TEST(ApplyDephasing, FullDecoherenceOfEqualSuperposition) {
    const auto ch = DephasingChannel::computational(2, 1.0);
    const auto out = apply_dephasing(plus_state(), ch, 701.0);
    EXPECT_EQ(max_abs(out.matrix() - 0.5 * identity(2)), 0.0);
}

TEST(ApplyDephasing, ZeroRateLeavesStateUnchanged) {
    Rng rng(4);
    const auto s = random_state(rng, 3);
    const auto out = apply_dephasing(s, DephasingChannel::computational(3, 0.0), 10.0);
    EXPECT_EQ(max_abs(out.matrix() - s.matrix()), 0.0);
}

TEST(ApplyDephasing, UnitExponentDefinition) {
    const auto out = apply_dephasing(plus_state(), DephasingChannel::computational(2, 2.0), 0.5);
    EXPECT_NEAR(out.matrix()(0, 1).real(), 0.5 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(out.matrix()(0, 1).real(), 0.18394, 1e-5);
    EXPECT_EQ(out.matrix()(0, 0).real(), 0.5);
}

TEST(ApplyDephasing, RotatedPointerBasisKeepsPointerDiagonal) {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const ComplexMatrix u = qzeno::testing::random_unitary(rng, 4);
        const DephasingChannel ch(u, 0.8);
        const auto s = random_state(rng, 4);
        const auto out = apply_dephasing(s, ch, 1.1);
        const ComplexMatrix before = u.adjoint() * s.matrix() * u;
        const ComplexMatrix after = u.adjoint() * out.matrix() * u;
        const double f = std::exp(-0.88);
        for (Eigen::Index r = 0; r < 4; ++r)
            for (Eigen::Index c = 0; c < 4; ++c) {
                const Complex expected = r == c ? before(r, c) : before(r, c) * f;
                EXPECT_NEAR(std::abs(after(r, c) - expected), 0.0, 1e-12);
            }
        EXPECT_NEAR(out.trace(), s.trace(), 1e-12);
        EXPECT_GE(hermitian_eigenvalues(out.matrix()).minCoeff(), -1e-10);
    }
}

TEST(ApplyDephasing, CoherencesAreMonotone) {
    Rng rng(6);
    const auto ch = DephasingChannel::computational(4, 0.5);
    auto s = random_state(rng, 4);
    for (int step = 0; step < 10; ++step) {
        const auto next = apply_dephasing(s, ch, 0.2);
        for (Eigen::Index r = 0; r < 4; ++r)
            for (Eigen::Index c = 0; c < 4; ++c)
                if (r != c) EXPECT_LE(std::abs(next.matrix()(r, c)), std::abs(s.matrix()(r, c)));
        s = next;
    }
}

TEST(ApplyDephasing, CompositionLaw) {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const DephasingChannel ch(qzeno::testing::random_unitary(rng, 3), 1.7);
        const auto s = random_state(rng, 3);
        const auto two_step = apply_dephasing(apply_dephasing(s, ch, 0.3), ch, 0.45);
        const auto one_step = apply_dephasing(s, ch, 0.75);
        EXPECT_LE(max_abs(two_step.matrix() - one_step.matrix()), 1e-12);
    }
}

TEST(ApplyDephasing, CommutesWithPointerDiagonalHamiltonian) {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        RealVector e(4);
        for (int k = 0; k < 4; ++k) e(k) = qzeno::testing::gauss(rng);
        const HamiltonianSpec h(e.cast<Complex>().asDiagonal().toDenseMatrix());
        const auto ch = DephasingChannel::computational(4, 1.3);
        const auto s = random_state(rng, 4);
        const auto a = apply_dephasing(evolve_unitary(s, h, 0.6), ch, 0.6);
        const auto b = evolve_unitary(apply_dephasing(s, ch, 0.6), h, 0.6);
        EXPECT_LE(max_abs(a.matrix() - b.matrix()), 1e-10);
    }
}

TEST(DephasingChannel, RejectsInvalidConfiguration) {
    EXPECT_THROW(DephasingChannel(identity(2), -1.0), ValidationError);
    EXPECT_THROW(DephasingChannel(2.0 * identity(2), 1.0), ValidationError);
    EXPECT_THROW((void)apply_dephasing(WeightOperator(identity(2)), DephasingChannel::computational(2, 1.0), -1.0),
                 PreconditionError);
}

// ---------------------------------------------------------------------------
// release_branch_mixture

TEST(ReleaseBranchMixture, TwoTerminalsUniform) {
    const auto m = release_branch_mixture({2, 0.5});
    ASSERT_EQ(m.dim(), 4u);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(m.weights()(i), 0.25);
    EXPECT_LE(max_abs(m.to_weight_operator().matrix() - 0.25 * identity(4)), 0.0);
}

TEST(ReleaseBranchMixture, SingleBernoulliOrdering) {
    const auto m = release_branch_mixture({1, 0.9});
    EXPECT_NEAR(m.weights()(0), 0.1, 1e-15); // no release
    EXPECT_NEAR(m.weights()(1), 0.9, 1e-15);
}

TEST(ReleaseBranchMixture, ThreeTerminalsMatchEnumeration) {
    const auto m = release_branch_mixture({3, 0.25});
    const auto oracle = qzeno::testing::enumerate_release_weights(3, 0.25);
    const double by_class[] = {0.421875, 0.140625, 0.046875, 0.015625};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(m.weights()(static_cast<Eigen::Index>(i)), oracle[i], 1e-15);
        EXPECT_NEAR(oracle[i], by_class[std::popcount(i)], 1e-15);
    }
}

TEST(ReleaseBranchMixture, AllPatternsPopulatedAndNormalized) {
    for (std::size_t n = 1; n <= 12; ++n) {
        const auto m = release_branch_mixture({n, 0.3});
        EXPECT_NEAR(m.trace(), 1.0, 1e-12);
        EXPECT_EQ((m.weights().array() > 0.0).count(), static_cast<Eigen::Index>(1) << n);
    }
}

TEST(ReleaseBranchMixture, DenseFormIsStrictlyDiagonal) {
    const auto s = release_branch_mixture({4, 0.7}).to_weight_operator();
    ComplexMatrix off = s.matrix();
    off.diagonal().setZero();
    EXPECT_EQ(max_abs(off), 0.0);
    EXPECT_TRUE(validate_weight_operator(s.matrix()).passed);
}

TEST(ReleaseBranchMixture, CapacityLimits) {
    EXPECT_THROW((void)release_branch_mixture({21, 0.5}), CapacityError);
    EXPECT_THROW((void)release_branch_mixture({0, 0.5}), CapacityError);
    EXPECT_THROW((void)release_branch_mixture({3, 1.5}), ValidationError);
    EXPECT_THROW((void)release_branch_mixture({13, 0.5}).to_weight_operator(), CapacityError);
    EXPECT_NO_THROW((void)release_branch_mixture({20, 0.5}));
}
