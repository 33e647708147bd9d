#pragma once

// Modified Mach-Zehnder protocol: pre/post-selected states, arm and photon-number
// projectors, the single-mode field Hamiltonian, and the optical elements.
//
// Path factor levels: 0 = arm I, 1 = arm II. Units have hbar = omega = 1.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>

#include "cfpe/hilbert.hpp"

namespace cfpe {

enum class Arm { I = 0, II = 1 };

// Literal: the post-selected state with its original arm-II signs.
// ClaimConsistent: arm-II amplitudes sign-flipped, which reproduces the stated
// arm weak values (Pi_I, H_I, Pi_II, H_II) = (1, 1/2, 0, 1).
enum class PostSelection { Literal, ClaimConsistent };

inline std::string_view to_string(Arm arm) { return arm == Arm::I ? "I" : "II"; }

inline std::string_view to_string(PostSelection c) {
    return c == PostSelection::Literal ? "literal" : "claim-consistent";
}

inline PostSelection parse_post_selection(std::string_view s) {
    if (s == "literal") return PostSelection::Literal;
    if (s == "claim-consistent") return PostSelection::ClaimConsistent;
    throw ParameterError("unknown post-selection convention '" + std::string(s) + "'");
}

// A normalized state together with the norm of the form it was built from, so
// the unnormalized form stays recoverable.
struct PreparedState {
    StateVector state;
    double scale = 1.0;

    StateVector unnormalized() const { return state * Complex(scale); }
};

inline void require_fock_dim(std::size_t fock_dim) {
    if (fock_dim < 2) {
        throw ParameterError("fock_dim must be at least 2, got " + std::to_string(fock_dim));
    }
}

inline BasisSpec protocol_basis(std::size_t fock_dim) {
    require_fock_dim(fock_dim);
    return BasisSpec{{std::string(kPathFactor), 2}, {std::string(kPhotonFactor), fock_dim}};
}

namespace detail {

// Arm I carries |0>; arm II carries first_ii |0> + second_ii |1>.
inline PreparedState arm_superposition(std::size_t fock_dim, double first_ii, double second_ii) {
    const BasisSpec basis = protocol_basis(fock_dim);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    v(static_cast<Eigen::Index>(basis.index({0, 0}))) = 1.0;
    v(static_cast<Eigen::Index>(basis.index({1, 0}))) = first_ii;
    v(static_cast<Eigen::Index>(basis.index({1, 1}))) = second_ii;
    StateVector raw(basis, std::move(v));
    const double scale = raw.norm();
    return PreparedState{normalize(raw), scale};
}

}  // namespace detail

// |0>|I> + (|0> + |1>)|II>, normalized.
inline PreparedState build_pre(std::size_t fock_dim = 2) {
    return detail::arm_superposition(fock_dim, 1.0, 1.0);
}

inline PreparedState build_post(PostSelection conv = PostSelection::ClaimConsistent,
                                std::size_t fock_dim = 2) {
    return conv == PostSelection::Literal ? detail::arm_superposition(fock_dim, 1.0, -1.0)
                                          : detail::arm_superposition(fock_dim, -1.0, 1.0);
}

inline Operator arm_projector(Arm arm, const BasisSpec& basis) {
    const auto dim = basis.factor_dim(kPathFactor);
    return embed(fock::projector(dim, static_cast<std::size_t>(arm)), kPathFactor, basis);
}

// a^dagger a + 1/2 on the photon factor.
inline Operator field_hamiltonian(const BasisSpec& basis) {
    const auto d = basis.factor_dim(kPhotonFactor);
    CMatrix h = fock::number(d);
    h.diagonal().array() += 0.5;
    return embed(h, kPhotonFactor, basis);
}

// Energy localized in one arm: Pi_arm H.
inline Operator arm_hamiltonian(Arm arm, const BasisSpec& basis) {
    return arm_projector(arm, basis) * field_hamiltonian(basis);
}

inline Operator number_projector(std::size_t n, const BasisSpec& basis) {
    const auto d = basis.factor_dim(kPhotonFactor);
    return embed(fock::projector(d, n), kPhotonFactor, basis);
}

// Rotation by `angle` between the arms with relative phase `phase`:
//   [[cos, -e^{-i phase} sin], [e^{i phase} sin, cos]] on the path factor.
inline Operator beam_splitter(double angle, double phase, const BasisSpec& basis) {
    const auto d = basis.factor_dim(kPathFactor);
    if (d != 2) throw StructuralError("beam splitter needs a two-level path factor");
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Complex e = std::polar(1.0, phase);
    CMatrix m(2, 2);
    m << c, -std::conj(e) * s, e * s, c;
    return embed(m, kPathFactor, basis);
}

// Phase `phase` on arm II.
inline Operator phase_shifter(double phase, const BasisSpec& basis) {
    const auto d = basis.factor_dim(kPathFactor);
    if (d != 2) throw StructuralError("phase shifter needs a two-level path factor");
    CMatrix m = CMatrix::Identity(2, 2);
    m(1, 1) = std::polar(1.0, phase);
    return embed(m, kPathFactor, basis);
}

struct MziConfig {
    double bs1_angle = std::numbers::pi / 4.0;
    double bs2_angle = std::numbers::pi / 4.0;
    double phase_shift = 0.0;
    std::size_t fock_dim = 2;

    void validate() const {
        require_fock_dim(fock_dim);
        if (!std::isfinite(bs1_angle) || !std::isfinite(bs2_angle) || !std::isfinite(phase_shift)) {
            throw ParameterError("MZI angles must be finite");
        }
    }
};

// Balanced interferometer whose source state is mapped onto the pre-selected
// state by the first beam splitter.
inline MziConfig balanced_mzi(std::size_t fock_dim = 2) {
    return MziConfig{std::numbers::pi / 4.0, std::numbers::pi / 4.0, 0.0, fock_dim};
}

// The input that the first beam splitter turns into build_pre(fock_dim).
inline StateVector mzi_source_state(const MziConfig& cfg) {
    cfg.validate();
    const auto pre = build_pre(cfg.fock_dim).state;
    return apply(adjoint(beam_splitter(cfg.bs1_angle, 0.0, pre.basis())), pre);
}

inline StateVector mzi_first_stage(const MziConfig& cfg, const StateVector& source) {
    cfg.validate();
    return apply(beam_splitter(cfg.bs1_angle, 0.0, source.basis()), source);
}

struct PortProbabilities {
    double d1 = 0.0;  // exits along the arm-I output port
    double d2 = 0.0;
};

// Phase shifter then second beam splitter, followed by detection at D1/D2.
// Probabilities are relative to the squared norm of `inside`.
inline PortProbabilities mzi_output_ports(const MziConfig& cfg, const StateVector& inside) {
    cfg.validate();
    const auto& basis = inside.basis();
    const StateVector out =
        apply(beam_splitter(cfg.bs2_angle, 0.0, basis) * phase_shifter(cfg.phase_shift, basis), inside);
    const double total = out.squared_norm();
    if (total == 0.0) throw DegenerateInputError("interferometer input is the zero vector");
    const double d1 = apply(arm_projector(Arm::I, basis), out).squared_norm();
    const double d2 = apply(arm_projector(Arm::II, basis), out).squared_norm();
    return {d1 / total, d2 / total};
}

}  // namespace cfpe
