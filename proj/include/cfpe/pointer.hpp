#pragma once

// Von Neumann measurement pointer on a uniform periodic position grid.
//
// The coupling exp(-i g A (x) P) is applied exactly: A is diagonalized and each
// eigencomponent translates the pointer wavefunction by g * eigenvalue, done in
// the momentum representation (FFT, multiply by exp(-i k shift), inverse FFT).

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cfpe/hilbert.hpp"

namespace cfpe {

struct PointerConfig {
    double grid_min = -8.0;
    double grid_max = 8.0;
    std::size_t samples = 256;
    double sigma = 1.0;
    double coupling_g = 0.01;

    double spacing() const { return (grid_max - grid_min) / static_cast<double>(samples); }

    void validate() const {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("pointer sigma must be positive");
        if (samples < 16) throw ParameterError("pointer grid needs at least 16 samples");
        if (!std::isfinite(grid_min) || !std::isfinite(grid_max) || !std::isfinite(coupling_g)) {
            throw ParameterError("pointer grid bounds and coupling must be finite");
        }
        if (grid_min > -6.0 * sigma || grid_max < 6.0 * sigma) {
            throw ParameterError("pointer grid must span at least +/-6 sigma around 0");
        }
    }
};

struct PointerReadout {
    double mean = 0.0;
    double variance = 0.0;
    double postselection_probability = 0.0;
};

// System (x) pointer state: row = system basis index, column = grid sample.
// Normalized so that sum |amp|^2 * dx = 1.
struct JointState {
    BasisSpec system;
    PointerConfig pointer;
    CMatrix amplitudes;

    double squared_norm() const { return amplitudes.squaredNorm() * pointer.spacing(); }
};

namespace detail {

inline std::vector<double> pointer_positions(const PointerConfig& p) {
    std::vector<double> x(p.samples);
    const double dx = p.spacing();
    for (std::size_t j = 0; j < p.samples; ++j) x[j] = p.grid_min + dx * static_cast<double>(j);
    return x;
}

// FFT angular wavenumbers in standard order (0, +, ..., -).
inline std::vector<double> pointer_wavenumbers(const PointerConfig& p) {
    const std::size_t n = p.samples;
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * p.spacing());
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto signed_j = j < (n + 1) / 2 ? static_cast<double>(j)
                                              : static_cast<double>(j) - static_cast<double>(n);
        k[j] = dk * signed_j;
    }
    return k;
}

// Real Gaussian with |phi|^2 of variance sigma^2, normalized on the grid.
inline std::vector<Complex> initial_pointer(const PointerConfig& p) {
    const auto x = pointer_positions(p);
    std::vector<Complex> phi(p.samples);
    double total = 0.0;
    for (std::size_t j = 0; j < p.samples; ++j) {
        const double v = std::exp(-x[j] * x[j] / (4.0 * p.sigma * p.sigma));
        phi[j] = v;
        total += v * v;
    }
    const double scale = 1.0 / std::sqrt(total * p.spacing());
    for (auto& v : phi) v *= scale;
    return phi;
}

}  // namespace detail

// Throws NumericQualityError when the grid cannot carry a Gaussian translated by
// up to `max_shift` without wrap-around or spectral aliasing.
inline void check_pointer_resolution(const PointerConfig& p, double min_shift, double max_shift) {
    constexpr double kSpectralTail = 1e-8;  // |phi(k_nyquist)| / |phi(0)|
    constexpr double kEdgeDensity = 1e-6;   // |phi(edge)|^2 / |phi(center)|^2
    const double k_nyquist = std::numbers::pi / p.spacing();
    if (std::exp(-k_nyquist * k_nyquist * p.sigma * p.sigma) > kSpectralTail) {
        throw NumericQualityError("pointer grid too coarse: spacing " + std::to_string(p.spacing()) +
                                  " aliases a Gaussian of width " + std::to_string(p.sigma));
    }
    const double margin = std::min(p.grid_max - max_shift, min_shift - p.grid_min);
    if (margin <= 0.0 || std::exp(-margin * margin / (2.0 * p.sigma * p.sigma)) > kEdgeDensity) {
        throw NumericQualityError("pointer grid too narrow for a shift of " +
                                  std::to_string(std::max(std::abs(min_shift), std::abs(max_shift))));
    }
}

inline JointState von_neumann_couple(const StateVector& system, const Operator& a, const PointerConfig& p) {
    p.validate();
    detail::require_same_basis(a.basis(), system.basis(), "von_neumann_couple");
    if (!is_hermitian(a)) throw ParameterError("von Neumann coupling requires a Hermitian observable");
    const StateVector s = normalize(system);

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.matrix());
    const auto& lambda = eig.eigenvalues();
    const CMatrix& v = eig.eigenvectors();
    const double shift_a = p.coupling_g * lambda.minCoeff();
    const double shift_b = p.coupling_g * lambda.maxCoeff();
    check_pointer_resolution(p, std::min({0.0, shift_a, shift_b}), std::max({0.0, shift_a, shift_b}));

    const CVector weights = v.adjoint() * s.amplitudes();
    const auto k = detail::pointer_wavenumbers(p);
    const auto phi0 = detail::initial_pointer(p);

    Eigen::FFT<double> fft;
    std::vector<Complex> spectrum;
    fft.fwd(spectrum, phi0);

    const auto n = static_cast<Eigen::Index>(p.samples);
    CMatrix joint = CMatrix::Zero(v.rows(), n);
    std::vector<Complex> shifted_spec(p.samples);
    std::vector<Complex> shifted;
    for (Eigen::Index e = 0; e < lambda.size(); ++e) {
        if (weights(e) == Complex(0.0)) continue;
        const double shift = p.coupling_g * lambda(e);
        for (std::size_t j = 0; j < p.samples; ++j) {
            shifted_spec[j] = spectrum[j] * std::polar(1.0, -k[j] * shift);
        }
        fft.inv(shifted, shifted_spec);
        Eigen::Map<const Eigen::RowVectorXcd> row(shifted.data(), n);
        joint.noalias() += (v.col(e) * weights(e)) * row;
    }
    return JointState{s.basis(), p, std::move(joint)};
}

inline PointerReadout pointer_readout(const JointState& joint, const StateVector& post) {
    detail::require_same_basis(joint.system, post.basis(), "pointer_readout");
    const StateVector bra = normalize(post);
    const Eigen::RowVectorXcd psi = bra.amplitudes().adjoint() * joint.amplitudes;
    const auto x = detail::pointer_positions(joint.pointer);
    const double dx = joint.pointer.spacing();
    double prob = 0.0;
    double first = 0.0;
    double second = 0.0;
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
        const double w = std::norm(psi(j)) * dx;
        const double xj = x[static_cast<std::size_t>(j)];
        prob += w;
        first += w * xj;
        second += w * xj * xj;
    }
    if (prob < 1e-14) {
        throw OrthogonalEnsembleError("post-selection probability " + std::to_string(prob) +
                                      " too small for a pointer readout");
    }
    const double mean = first / prob;
    return PointerReadout{mean, std::max(0.0, second / prob - mean * mean), prob};
}

// Closed form for the same experiment on an unbounded line: the post-selected
// pointer is sum_k w_k phi0(x - g lambda_k) with w_k = <post|v_k><v_k|pre>, and
// the overlaps of translated Gaussians are known exactly.
inline PointerReadout analytic_pointer_readout(const StateVector& pre, const Operator& a,
                                               const StateVector& post, double sigma, double g) {
    if (!is_hermitian(a)) throw ParameterError("analytic readout requires a Hermitian observable");
    const StateVector s = normalize(pre);
    const StateVector f = normalize(post);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.matrix());
    const CMatrix& v = eig.eigenvectors();
    const CVector w = (f.amplitudes().adjoint() * v).transpose().cwiseProduct(v.adjoint() * s.amplitudes());
    const auto& lambda = eig.eigenvalues();

    Complex norm = 0.0;
    Complex first = 0.0;
    Complex second = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            const double u = g * lambda(i);
            const double t = g * lambda(j);
            const double m = 0.5 * (u + t);
            const double overlap = std::exp(-(u - t) * (u - t) / (8.0 * sigma * sigma));
            const Complex c = std::conj(w(i)) * w(j) * overlap;
            norm += c;
            first += c * m;
            second += c * (sigma * sigma + m * m);
        }
    }
    if (norm.real() < 1e-14) throw OrthogonalEnsembleError("post-selection probability vanishes");
    const double mean = first.real() / norm.real();
    return PointerReadout{mean, std::max(0.0, second.real() / norm.real() - mean * mean), norm.real()};
}

}  // namespace cfpe
