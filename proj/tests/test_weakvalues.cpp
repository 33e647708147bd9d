#include <gtest/gtest.h>

#include "cfpe/weakvalues.hpp"
#include "support.hpp"

namespace cfpe {
namespace {

using testing::random_basis;
using testing::random_hermitian;
using testing::random_operator;
using testing::random_scalar;
using testing::random_state;

TEST(ArmWeakValues, ClaimConsistentQuadruple) {
    const ArmWeakValues w = arm_weak_values(protocol_ensemble(PostSelection::ClaimConsistent));
    EXPECT_LE(std::abs(w.projector_i - 1.0), 1e-12);
    EXPECT_LE(std::abs(w.energy_i - 0.5), 1e-12);
    EXPECT_LE(std::abs(w.projector_ii - 0.0), 1e-12);
    EXPECT_LE(std::abs(w.energy_ii - 1.0), 1e-12);
}

TEST(ArmWeakValues, LiteralFlipsArmTwoEnergy) {
    const ArmWeakValues w = arm_weak_values(protocol_ensemble(PostSelection::Literal));
    EXPECT_LE(std::abs(w.projector_i - 1.0), 1e-12);
    EXPECT_LE(std::abs(w.energy_i - 0.5), 1e-12);
    EXPECT_LE(std::abs(w.projector_ii), 1e-12);
    EXPECT_LE(std::abs(w.energy_ii + 1.0), 1e-12);
}

TEST(ArmWeakValues, IndependentOfTruncation) {
    for (std::size_t d = 2; d <= 6; ++d) {
        const ArmWeakValues w = arm_weak_values(protocol_ensemble(PostSelection::ClaimConsistent, d));
        EXPECT_LE(std::abs(w.energy_ii - 1.0), 1e-12) << "d=" << d;
    }
}

TEST(SelfCanceling, PairSumsToArmTwoProjector) {
    for (auto conv : {PostSelection::Literal, PostSelection::ClaimConsistent}) {
        const auto e = protocol_ensemble(conv);
        const auto [w0, w1] = self_canceling_pair(e);
        EXPECT_LE(std::abs(w0.value + w1.value), 1e-12);
        EXPECT_GT(std::abs(w0.value), 0.5);  // each term is non-trivial
    }
}

TEST(Orderings, PreApostIsTheConjugate) {
    for (int trial = 0; trial < 200; ++trial) {
        const BasisSpec b = random_basis();
        const StateVector pre = random_state(b), post = random_state(b);
        const Operator a = random_hermitian(b);
        const Complex w = weak_value(a, pre, post).value;
        const Complex w_rev = weak_value(a, pre, post, WeakValueOrdering::PreApost).value;
        EXPECT_LT(std::abs(w - std::conj(w_rev)), 1e-10 * (1.0 + std::abs(w)));
    }
    EXPECT_EQ(parse_ordering("pre-a-post"), WeakValueOrdering::PreApost);
    EXPECT_THROW(parse_ordering("sideways"), ParameterError);
}

TEST(Properties, NormalizationInvariance) {
    for (int trial = 0; trial < 300; ++trial) {
        const BasisSpec b = random_basis();
        const StateVector pre = random_state(b), post = random_state(b);
        const Operator a = random_operator(b);
        const Complex w = weak_value(a, pre, post).value;
        const Complex scaled = weak_value(a, pre * random_scalar(), post * random_scalar()).value;
        EXPECT_LT(std::abs(w - scaled), 1e-9 * (1.0 + std::abs(w)));
    }
}

TEST(Properties, LinearInTheObservable) {
    for (int trial = 0; trial < 300; ++trial) {
        const BasisSpec b = random_basis();
        const StateVector pre = random_state(b), post = random_state(b);
        const Operator a = random_operator(b), c = random_operator(b);
        const Complex alpha = random_scalar(), beta = random_scalar();
        const Complex lhs = weak_value(alpha * a + beta * c, pre, post).value;
        const Complex rhs = alpha * weak_value(a, pre, post).value + beta * weak_value(c, pre, post).value;
        EXPECT_LT(std::abs(lhs - rhs), 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST(Properties, IdentityAndProjectorCompleteness) {
    for (int trial = 0; trial < 100; ++trial) {
        const BasisSpec b = random_basis();
        const StateVector pre = random_state(b), post = random_state(b);
        EXPECT_LT(std::abs(weak_value(Operator::identity(b), pre, post).value - 1.0), 1e-10);
        const std::string first = b.factors()[0].name;
        const std::size_t d = b.factors()[0].dim;
        Complex sum = 0.0;
        for (std::size_t k = 0; k < d; ++k) sum += weak_value(embed(fock::projector(d, k), first, b), pre, post).value;
        EXPECT_LT(std::abs(sum - 1.0), 1e-10);
    }
}

TEST(Orthogonal, EnsembleIsRejected) {
    const BasisSpec b{{"q", 2}};
    const StateVector up = StateVector::basis_state(b, {0});
    const StateVector down = StateVector::basis_state(b, {1});
    EXPECT_THROW(weak_value(Operator::identity(b), up, down), OrthogonalEnsembleError);
    EXPECT_TRUE(PrePostEnsemble(up, down).is_orthogonal());
    // Relative check: a tiny but non-orthogonal overlap is accepted.
    const StateVector tilted = normalize(down + up * Complex(1e-6));
    EXPECT_NO_THROW(weak_value(Operator::identity(b), up, tilted));
}

TEST(PhaseShift, ArmOnePhaseUsesTheEnergyWeakValue) {
    const auto e = protocol_ensemble(PostSelection::ClaimConsistent);
    const double g = 0.37;
    const PhaseShiftedState s = phase_shift_evolution(e, g);
    EXPECT_LT(std::abs(s.energy_weak_value - 0.5), 1e-12);
    EXPECT_LT(std::abs(s.arm_i_phase - std::polar(1.0, -g * 0.5)), 1e-12);
    EXPECT_DOUBLE_EQ(s.prefactor, 0.5);
    EXPECT_NEAR(s.normalized.norm(), 1.0, 1e-14);
    // Arm II components are untouched; arm I picks up the phase.
    const StateVector& pre = e.pre();
    const Complex ratio = s.state.amplitude({0, 0}) / s.state.amplitude({1, 0});
    EXPECT_LT(std::abs(ratio - s.arm_i_phase * pre.amplitude({0, 0}) / pre.amplitude({1, 0})), 1e-12);
}

}  // namespace
}  // namespace cfpe
