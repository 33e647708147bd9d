#pragma once

// Photoelectric interaction in the arm-II cavity.
//
// Photon and electron modes each couple through
//   kappa [a e^{i p.r} + a^dagger e^{-i p.r}],  kappa = sqrt(2 pi / (L^3 omega)) (eps . p),
// with the spatial phase evaluated at a single point r. The joint emission
// process (photon regenerated, electron emitted) is driven by the product of
// the two single-mode couplings, whose |0,0> <-> |1,1> element is
// kappa_eff = kappa * kappa_e.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "cfpe/hilbert.hpp"

namespace cfpe {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct CavityConfig {
    double length = 1.0;
    double omega = 1.0;
    Vec3 photon_momentum{1.0, 0.0, 0.0};
    Vec3 polarization{1.0, 0.0, 0.0};
    Vec3 electron_momentum{1.0, 0.0, 0.0};
    Vec3 electron_polarization{1.0, 0.0, 0.0};
    Vec3 eval_position{0.0, 0.0, 0.0};

    void validate() const {
        if (!(length > 0.0) || !std::isfinite(length)) throw ParameterError("cavity length must be positive");
        if (!(omega > 0.0) || !std::isfinite(omega)) throw ParameterError("cavity omega must be positive");
        for (const Vec3* v : {&photon_momentum, &polarization, &electron_momentum, &electron_polarization,
                              &eval_position}) {
            for (double c : *v) {
                if (!std::isfinite(c)) throw ParameterError("cavity vectors must be finite");
            }
        }
        if (std::abs(std::sqrt(dot(polarization, polarization)) - 1.0) > 1e-12 ||
            std::abs(std::sqrt(dot(electron_polarization, electron_polarization)) - 1.0) > 1e-12) {
            throw ParameterError("polarization vectors must have unit norm");
        }
    }

    double prefactor() const { return std::sqrt(2.0 * std::numbers::pi / (length * length * length * omega)); }
    double kappa() const { return prefactor() * dot(polarization, photon_momentum); }
    double kappa_electron() const { return prefactor() * dot(electron_polarization, electron_momentum); }
    double kappa_eff() const { return kappa() * kappa_electron(); }
};

// eps . p == 0 makes the photon coupling vanish identically.
inline bool coupling_is_degenerate(const CavityConfig& c) { return c.kappa() == 0.0; }

inline BasisSpec cavity_basis(std::size_t fock_dim = 2) {
    if (fock_dim < 2) throw ParameterError("cavity fock_dim must be at least 2");
    return BasisSpec{{std::string(kPhotonFactor), fock_dim}, {std::string(kElectronFactor), fock_dim}};
}

struct CavityState {
    std::string mode_label;
    StateVector occupation;
};

inline std::string mode_label(const CavityConfig& c) {
    std::ostringstream out;
    out << "p=(" << c.photon_momentum[0] << "," << c.photon_momentum[1] << "," << c.photon_momentum[2]
        << ") eps=(" << c.polarization[0] << "," << c.polarization[1] << "," << c.polarization[2] << ")";
    return out.str();
}

namespace detail {

inline CMatrix mode_coupling(std::size_t dim, double kappa, const Vec3& momentum, const Vec3& position) {
    const Complex phase = std::polar(1.0, dot(momentum, position));
    return kappa * (fock::annihilation(dim) * phase + fock::creation(dim) * std::conj(phase));
}

}  // namespace detail

// Empty cavity mode at the left end: photon 0 (and electron 0 when present).
inline CavityState build_left_state(const CavityConfig& c, const BasisSpec& basis) {
    c.validate();
    basis.require(kPhotonFactor);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    v(0) = 1.0;  // all-zero occupation
    return CavityState{mode_label(c), StateVector(basis, std::move(v))};
}

inline Operator build_h_int(const CavityConfig& c, const BasisSpec& basis) {
    c.validate();
    const auto d = basis.factor_dim(kPhotonFactor);
    return embed(detail::mode_coupling(d, c.kappa(), c.photon_momentum, c.eval_position), kPhotonFactor, basis);
}

inline Operator build_h_int_electron(const CavityConfig& c, const BasisSpec& basis) {
    c.validate();
    const auto d = basis.factor_dim(kElectronFactor);
    return embed(detail::mode_coupling(d, c.kappa_electron(), c.electron_momentum, c.eval_position),
                 kElectronFactor, basis);
}

// H_int H^e_int: the two factors commute, so the product is Hermitian.
inline Operator build_emission_coupling(const CavityConfig& c, const BasisSpec& basis) {
    return build_h_int(c, basis) * build_h_int_electron(c, basis);
}

// Literal:            H_int |L>, the bare map from the left to the right state (not unitary).
// FirstOrderUnitary:  (1 - i H dt)|L> with H the emission coupling.
// Exact:              exp(-i H dt)|L>.
enum class InteractionMode { Literal, FirstOrderUnitary, Exact };

struct InteractionResult {
    // Full post-interaction state, normalized.
    CavityState evolved;
    // Normalized photon-occupation-1 branch (the right-end state); empty when
    // that branch has zero weight.
    std::optional<CavityState> transitioned;
    // Raw amplitude on |photon 1, electron e'> where e' = e + 1 except in
    // Literal mode, which leaves the electron untouched.
    Complex amplitude;
    double transition_probability = 0.0;
};

inline InteractionResult apply_interaction(const CavityState& s, const CavityConfig& c, InteractionMode mode,
                                           double dt = 0.0) {
    c.validate();
    const BasisSpec& basis = s.occupation.basis();
    const std::size_t photon = basis.require(kPhotonFactor);
    const auto electron_pos = basis.position(kElectronFactor);
    if (mode != InteractionMode::Literal && !electron_pos) {
        throw StructuralError("unitary interaction modes need an electron factor");
    }
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw ParameterError("interaction dt must be non-negative");

    // Left-state form: a single occupation basis state with no photon.
    const StateVector s_norm = normalize(s.occupation);
    Eigen::Index source = 0;
    s_norm.amplitudes().cwiseAbs().maxCoeff(&source);
    const Complex source_phase = s_norm[static_cast<std::size_t>(source)];
    auto occ = basis.digits(static_cast<std::size_t>(source));
    if (std::abs(std::abs(source_phase) - 1.0) > kDefaultTolerance || occ[photon] != 0) {
        throw ParameterError("interaction requires a left state with photon occupation 0");
    }

    StateVector out;
    switch (mode) {
        case InteractionMode::Literal:
            out = apply(build_h_int(c, basis), s_norm);
            break;
        case InteractionMode::FirstOrderUnitary:
            out = s_norm - apply(build_emission_coupling(c, basis), s_norm) * Complex(0.0, dt);
            break;
        case InteractionMode::Exact:
            out = apply(evolve(build_emission_coupling(c, basis), dt), s_norm);
            break;
    }
    if (out.norm() == 0.0) {
        throw DegenerateInputError("interaction maps the left state to zero (eps . p = 0)");
    }

    Complex amplitude = 0.0;
    occ[photon] = 1;
    if (mode != InteractionMode::Literal) occ[*electron_pos] += 1;
    if (!electron_pos || occ[*electron_pos] < basis.factors()[*electron_pos].dim) {
        amplitude = out[basis.index(occ)] * std::conj(source_phase);
    }

    const Operator one_photon = embed(fock::projector(basis.factor_dim(kPhotonFactor), 1), kPhotonFactor, basis);
    const StateVector branch = apply(one_photon, out);
    std::optional<CavityState> right;
    if (branch.norm() > 0.0) right = CavityState{s.mode_label, normalize(branch)};
    return InteractionResult{CavityState{s.mode_label, normalize(out)}, std::move(right), amplitude,
                             std::norm(amplitude)};
}

// |<photon 1, electron 1| exp(-i H dt) |L>|^2 with H the emission coupling.
inline double emission_probability(const CavityConfig& c, double dt, std::size_t fock_dim = 2) {
    c.validate();
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw ParameterError("emission dt must be non-negative");
    const BasisSpec basis = cavity_basis(fock_dim);
    const StateVector left = build_left_state(c, basis).occupation;
    const StateVector out = apply(evolve(build_emission_coupling(c, basis), dt), left);
    return std::norm(out.amplitude({1, 1}));
}

}  // namespace cfpe
