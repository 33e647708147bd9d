#pragma once

// Weak values of observables between pre- and post-selected states.

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <utility>

#include "cfpe/hilbert.hpp"
#include "cfpe/protocol.hpp"

namespace cfpe {

// |overlap| at or below this is treated as an orthogonal ensemble.
inline constexpr double kOrthogonalityTolerance = 1e-12;

// PostApre: <post|A|pre> / <post|pre>   (standard ordering, the default)
// PreApost: <pre|A|post> / <pre|post>   (the reversed ordering)
// For Hermitian A the two are complex conjugates.
enum class WeakValueOrdering { PostApre, PreApost };

inline std::string_view to_string(WeakValueOrdering o) {
    return o == WeakValueOrdering::PostApre ? "post-a-pre" : "pre-a-post";
}

inline WeakValueOrdering parse_ordering(std::string_view s) {
    if (s == "post-a-pre") return WeakValueOrdering::PostApre;
    if (s == "pre-a-post") return WeakValueOrdering::PreApost;
    throw ParameterError("unknown weak-value ordering '" + std::string(s) + "'");
}

class PrePostEnsemble {
public:
    // Both states are normalized on construction.
    PrePostEnsemble(const StateVector& pre, const StateVector& post)
        : pre_(normalize(pre)), post_(normalize(post)), overlap_(inner(post_, pre_)) {}

    const StateVector& pre() const { return pre_; }
    const StateVector& post() const { return post_; }
    const BasisSpec& basis() const { return pre_.basis(); }

    // <post|pre>
    Complex overlap() const { return overlap_; }

    double postselection_probability() const { return std::norm(overlap_); }

    bool is_orthogonal(double tol = kOrthogonalityTolerance) const {
        return std::abs(overlap_) <= tol;
    }

private:
    StateVector pre_;
    StateVector post_;
    Complex overlap_;
};

inline PrePostEnsemble protocol_ensemble(PostSelection conv = PostSelection::ClaimConsistent,
                                         std::size_t fock_dim = 2) {
    return PrePostEnsemble(build_pre(fock_dim).state, build_post(conv, fock_dim).state);
}

struct WeakValueResult {
    Complex value;
    Complex numerator;
    Complex overlap;
    WeakValueOrdering ordering = WeakValueOrdering::PostApre;
};

// Unnormalized form: the result does not depend on the scale of either state.
inline WeakValueResult weak_value(const Operator& a, const StateVector& pre, const StateVector& post,
                                  WeakValueOrdering ordering = WeakValueOrdering::PostApre,
                                  double tol = kOrthogonalityTolerance) {
    const bool standard = ordering == WeakValueOrdering::PostApre;
    const StateVector& bra = standard ? post : pre;
    const StateVector& ket = standard ? pre : post;
    const Complex overlap = inner(bra, ket);
    // Relative to the norms so the check is scale-free.
    if (std::abs(overlap) <= tol * bra.norm() * ket.norm()) {
        throw OrthogonalEnsembleError("pre- and post-selected states are orthogonal; weak value undefined");
    }
    const Complex numerator = matrix_element(bra, a, ket);
    return WeakValueResult{numerator / overlap, numerator, overlap, ordering};
}

inline WeakValueResult weak_value(const Operator& a, const PrePostEnsemble& e,
                                  WeakValueOrdering ordering = WeakValueOrdering::PostApre,
                                  double tol = kOrthogonalityTolerance) {
    return weak_value(a, e.pre(), e.post(), ordering, tol);
}

// Weak values of Pi_II Pi_0 and Pi_II Pi_1; they sum to the weak value of Pi_II.
inline std::pair<WeakValueResult, WeakValueResult> self_canceling_pair(
    const PrePostEnsemble& e, WeakValueOrdering ordering = WeakValueOrdering::PostApre) {
    const auto& basis = e.basis();
    const Operator pi_ii = arm_projector(Arm::II, basis);
    return {weak_value(pi_ii * number_projector(0, basis), e, ordering),
            weak_value(pi_ii * number_projector(1, basis), e, ordering)};
}

// The four arm observables Pi_I, H_I, Pi_II, H_II.
struct ArmWeakValues {
    Complex projector_i;
    Complex energy_i;
    Complex projector_ii;
    Complex energy_ii;
};

inline ArmWeakValues arm_weak_values(const PrePostEnsemble& e,
                                     WeakValueOrdering ordering = WeakValueOrdering::PostApre) {
    const auto& b = e.basis();
    return ArmWeakValues{weak_value(arm_projector(Arm::I, b), e, ordering).value,
                         weak_value(arm_hamiltonian(Arm::I, b), e, ordering).value,
                         weak_value(arm_projector(Arm::II, b), e, ordering).value,
                         weak_value(arm_hamiltonian(Arm::II, b), e, ordering).value};
}

// Linearized von Neumann phase: the arm-I component of the pre-selected state
// picks up exp(-i g H^w_I), and the whole state carries the prefactor 1/2.
// `state` keeps that prefactor; `normalized` is the same ray at unit norm.
struct PhaseShiftedState {
    StateVector state;
    StateVector normalized;
    double prefactor = 0.5;
    Complex arm_i_phase;
    Complex energy_weak_value;
};

inline PhaseShiftedState phase_shift_evolution(const PrePostEnsemble& e, double g,
                                               WeakValueOrdering ordering = WeakValueOrdering::PostApre) {
    const auto& basis = e.basis();
    const Complex h_w = weak_value(arm_hamiltonian(Arm::I, basis), e, ordering).value;
    const Complex phase = std::exp(Complex(0.0, -g) * h_w);
    const Operator pi_i = arm_projector(Arm::I, basis);
    const Operator pi_ii = arm_projector(Arm::II, basis);
    const StateVector shifted = phase * apply(pi_i, e.pre()) + apply(pi_ii, e.pre());
    constexpr double prefactor = 0.5;
    return PhaseShiftedState{shifted * Complex(prefactor), normalize(shifted), prefactor, phase, h_w};
}

}  // namespace cfpe
