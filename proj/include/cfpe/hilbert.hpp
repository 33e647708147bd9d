#pragma once

// Labeled tensor-product Hilbert spaces with dense complex states and operators.
//
// Index convention: the first factor is the most significant digit, so the
// amplitude vector of tensor(a, b) is the Kronecker product a (x) b.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfpe/errors.hpp"

namespace cfpe {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTolerance = 1e-10;

// Canonical factor names; builders emit factors in this order.
inline constexpr std::string_view kPathFactor = "path";
inline constexpr std::string_view kPhotonFactor = "photon";
inline constexpr std::string_view kElectronFactor = "electron";

struct Factor {
    std::string name;
    std::size_t dim = 0;

    friend bool operator==(const Factor&, const Factor&) = default;
};

class BasisSpec {
public:
    BasisSpec() = default;

    BasisSpec(std::initializer_list<Factor> factors)
        : BasisSpec(std::vector<Factor>(factors)) {}

    explicit BasisSpec(std::vector<Factor> factors) : factors_(std::move(factors)) {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factors_[i].dim == 0) {
                throw ParameterError("factor '" + factors_[i].name + "' has zero dimension");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (factors_[j].name == factors_[i].name) {
                    throw StructuralError("duplicate factor name '" + factors_[i].name + "'");
                }
            }
        }
    }

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t rank() const { return factors_.size(); }

    std::size_t dimension() const {
        std::size_t d = 1;
        for (const auto& f : factors_) d *= f.dim;
        return d;
    }

    std::optional<std::size_t> position(std::string_view name) const {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factors_[i].name == name) return i;
        }
        return std::nullopt;
    }

    bool contains(std::string_view name) const { return position(name).has_value(); }

    std::size_t require(std::string_view name) const {
        auto pos = position(name);
        if (!pos) throw StructuralError("basis has no factor named '" + std::string(name) + "'");
        return *pos;
    }

    std::size_t factor_dim(std::string_view name) const { return factors_[require(name)].dim; }

    // Flat index of a product basis state given one occupation per factor.
    std::size_t index(std::span<const std::size_t> occupation) const {
        if (occupation.size() != factors_.size()) {
            throw StructuralError("occupation list length does not match basis rank");
        }
        std::size_t idx = 0;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (occupation[i] >= factors_[i].dim) {
                throw ParameterError("occupation " + std::to_string(occupation[i]) +
                                     " out of range for factor '" + factors_[i].name + "'");
            }
            idx = idx * factors_[i].dim + occupation[i];
        }
        return idx;
    }

    std::size_t index(std::initializer_list<std::size_t> occupation) const {
        return index(std::span<const std::size_t>(occupation.begin(), occupation.size()));
    }

    std::vector<std::size_t> digits(std::size_t flat) const {
        std::vector<std::size_t> out(factors_.size());
        for (std::size_t i = factors_.size(); i-- > 0;) {
            out[i] = flat % factors_[i].dim;
            flat /= factors_[i].dim;
        }
        return out;
    }

    BasisSpec concat(const BasisSpec& other) const {
        std::vector<Factor> joined = factors_;
        joined.insert(joined.end(), other.factors_.begin(), other.factors_.end());
        return BasisSpec(std::move(joined));
    }

    friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

private:
    std::vector<Factor> factors_;
};

inline std::string describe(const BasisSpec& basis) {
    std::string out = "[";
    for (std::size_t i = 0; i < basis.rank(); ++i) {
        if (i) out += ", ";
        out += basis.factors()[i].name + ":" + std::to_string(basis.factors()[i].dim);
    }
    return out + "]";
}

namespace detail {

inline void require_same_basis(const BasisSpec& a, const BasisSpec& b, const char* what) {
    if (!(a == b)) {
        throw StructuralError(std::string(what) + ": basis mismatch " + describe(a) + " vs " +
                              describe(b));
    }
}

}  // namespace detail

class StateVector {
public:
    StateVector() = default;

    StateVector(BasisSpec basis, CVector amplitudes)
        : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amps_.size()) != basis_.dimension()) {
            throw StructuralError("amplitude vector length " + std::to_string(amps_.size()) +
                                  " does not match basis dimension " +
                                  std::to_string(basis_.dimension()));
        }
        if (!amps_.allFinite()) throw ParameterError("state has non-finite amplitudes");
    }

    static StateVector zero(BasisSpec basis) {
        const auto n = static_cast<Eigen::Index>(basis.dimension());
        return StateVector(std::move(basis), CVector::Zero(n));
    }

    static StateVector basis_state(BasisSpec basis, std::initializer_list<std::size_t> occupation) {
        CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
        v(static_cast<Eigen::Index>(basis.index(occupation))) = 1.0;
        return StateVector(std::move(basis), std::move(v));
    }

    const BasisSpec& basis() const { return basis_; }
    const CVector& amplitudes() const { return amps_; }
    std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }

    Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    Complex amplitude(std::initializer_list<std::size_t> occupation) const {
        return amps_(static_cast<Eigen::Index>(basis_.index(occupation)));
    }

    double squared_norm() const { return amps_.squaredNorm(); }
    double norm() const { return amps_.norm(); }

    StateVector& operator+=(const StateVector& o) {
        detail::require_same_basis(basis_, o.basis_, "state addition");
        amps_ += o.amps_;
        return *this;
    }
    StateVector& operator-=(const StateVector& o) {
        detail::require_same_basis(basis_, o.basis_, "state subtraction");
        amps_ -= o.amps_;
        return *this;
    }
    StateVector& operator*=(Complex s) {
        amps_ *= s;
        return *this;
    }

    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(Complex s, StateVector a) { return a *= s; }
    friend StateVector operator*(StateVector a, Complex s) { return a *= s; }

private:
    BasisSpec basis_;
    CVector amps_;
};

class Operator {
public:
    Operator() = default;

    Operator(BasisSpec basis, CMatrix matrix) : basis_(std::move(basis)), m_(std::move(matrix)) {
        const auto n = static_cast<Eigen::Index>(basis_.dimension());
        if (m_.rows() != n || m_.cols() != n) {
            throw StructuralError("operator matrix is " + std::to_string(m_.rows()) + "x" +
                                  std::to_string(m_.cols()) + ", basis dimension is " +
                                  std::to_string(n));
        }
    }

    static Operator identity(BasisSpec basis) {
        const auto n = static_cast<Eigen::Index>(basis.dimension());
        return Operator(std::move(basis), CMatrix::Identity(n, n));
    }

    static Operator zero(BasisSpec basis) {
        const auto n = static_cast<Eigen::Index>(basis.dimension());
        return Operator(std::move(basis), CMatrix::Zero(n, n));
    }

    const BasisSpec& basis() const { return basis_; }
    const CMatrix& matrix() const { return m_; }

    Complex element(std::size_t row, std::size_t col) const {
        return m_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    Operator& operator+=(const Operator& o) {
        detail::require_same_basis(basis_, o.basis_, "operator addition");
        m_ += o.m_;
        return *this;
    }
    Operator& operator-=(const Operator& o) {
        detail::require_same_basis(basis_, o.basis_, "operator subtraction");
        m_ -= o.m_;
        return *this;
    }
    Operator& operator*=(Complex s) {
        m_ *= s;
        return *this;
    }

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(Complex s, Operator a) { return a *= s; }
    friend Operator operator*(Operator a, Complex s) { return a *= s; }

    // Composition: (a * b)|psi> = a(b|psi>).
    friend Operator operator*(const Operator& a, const Operator& b) {
        detail::require_same_basis(a.basis_, b.basis_, "operator product");
        return Operator(a.basis_, a.m_ * b.m_);
    }

    friend bool operator==(const Operator& a, const Operator& b) {
        return a.basis_ == b.basis_ && a.m_ == b.m_;
    }

private:
    BasisSpec basis_;
    CMatrix m_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    BasisSpec basis = a.basis().concat(b.basis());
    CVector v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
    return StateVector(std::move(basis), std::move(v));
}

inline Operator tensor(const Operator& a, const Operator& b) {
    BasisSpec basis = a.basis().concat(b.basis());
    CMatrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
    return Operator(std::move(basis), std::move(m));
}

// <a|b>, conjugate-linear in a.
inline Complex inner(const StateVector& a, const StateVector& b) {
    detail::require_same_basis(a.basis(), b.basis(), "inner");
    return a.amplitudes().dot(b.amplitudes());
}

inline StateVector apply(const Operator& op, const StateVector& s) {
    detail::require_same_basis(op.basis(), s.basis(), "apply");
    return StateVector(s.basis(), op.matrix() * s.amplitudes());
}

// <a|op|b>
inline Complex matrix_element(const StateVector& a, const Operator& op, const StateVector& b) {
    return inner(a, apply(op, b));
}

inline Operator adjoint(const Operator& op) { return Operator(op.basis(), op.matrix().adjoint()); }

inline bool is_hermitian(const Operator& op, double tol = kDefaultTolerance) {
    return (op.matrix() - op.matrix().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const Operator& op, double tol = kDefaultTolerance) {
    const auto n = op.matrix().rows();
    return (op.matrix().adjoint() * op.matrix() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <=
           tol;
}

inline StateVector normalize(const StateVector& s) {
    const double n = s.norm();
    if (n == 0.0) throw DegenerateInputError("cannot normalize the zero vector");
    return StateVector(s.basis(), s.amplitudes() / n);
}

// Embeds a single-factor matrix as local (x) identity on the named factor.
inline Operator embed(const CMatrix& local, std::string_view factor, const BasisSpec& basis) {
    const std::size_t pos = basis.require(factor);
    const auto d = static_cast<Eigen::Index>(basis.factors()[pos].dim);
    if (local.rows() != d || local.cols() != d) {
        throw StructuralError("local operator size does not match factor '" + std::string(factor) +
                              "'");
    }
    std::size_t before = 1;
    std::size_t after = 1;
    for (std::size_t i = 0; i < basis.rank(); ++i) {
        if (i < pos) before *= basis.factors()[i].dim;
        if (i > pos) after *= basis.factors()[i].dim;
    }
    const auto b = static_cast<Eigen::Index>(before);
    const auto a = static_cast<Eigen::Index>(after);
    CMatrix left = Eigen::kroneckerProduct(CMatrix::Identity(b, b), local);
    CMatrix full = Eigen::kroneckerProduct(left, CMatrix::Identity(a, a));
    return Operator(basis, std::move(full));
}

// Contracts the factors of `joint` named in `bra.basis()` against <bra|, leaving
// a state on the remaining factors (in their original order).
inline StateVector project_onto(const StateVector& joint, const StateVector& bra) {
    const BasisSpec& jb = joint.basis();
    std::vector<std::size_t> bra_pos;
    for (const auto& f : bra.basis().factors()) {
        const std::size_t p = jb.require(f.name);
        if (jb.factors()[p].dim != f.dim) {
            throw StructuralError("factor '" + f.name + "' has different dimension in bra");
        }
        bra_pos.push_back(p);
    }
    std::vector<Factor> rest;
    std::vector<std::size_t> rest_pos;
    for (std::size_t i = 0; i < jb.rank(); ++i) {
        if (std::find(bra_pos.begin(), bra_pos.end(), i) == bra_pos.end()) {
            rest.push_back(jb.factors()[i]);
            rest_pos.push_back(i);
        }
    }
    BasisSpec rest_basis(std::move(rest));
    CVector out = CVector::Zero(static_cast<Eigen::Index>(rest_basis.dimension()));
    std::vector<std::size_t> bra_occ(bra_pos.size());
    std::vector<std::size_t> rest_occ(rest_pos.size());
    for (std::size_t flat = 0; flat < jb.dimension(); ++flat) {
        const auto occ = jb.digits(flat);
        for (std::size_t k = 0; k < bra_pos.size(); ++k) bra_occ[k] = occ[bra_pos[k]];
        for (std::size_t k = 0; k < rest_pos.size(); ++k) rest_occ[k] = occ[rest_pos[k]];
        const auto bi = static_cast<Eigen::Index>(bra.basis().index(bra_occ));
        const auto ri = static_cast<Eigen::Index>(rest_basis.index(rest_occ));
        out(ri) += std::conj(bra.amplitudes()(bi)) * joint.amplitudes()(static_cast<Eigen::Index>(flat));
    }
    return StateVector(std::move(rest_basis), std::move(out));
}

// exp(-i H t) for Hermitian H, through its spectral decomposition.
inline Operator evolve(const Operator& hamiltonian, double t) {
    if (!is_hermitian(hamiltonian)) throw ParameterError("evolve requires a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hamiltonian.matrix());
    const CMatrix& v = eig.eigenvectors();
    CVector phases = (eig.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
    return Operator(hamiltonian.basis(), v * phases.asDiagonal() * v.adjoint());
}

// Single-mode building blocks on a Fock space truncated at `dim` levels.
namespace fock {

inline CMatrix annihilation(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix a = CMatrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline CMatrix creation(std::size_t dim) { return annihilation(dim).adjoint(); }

inline CMatrix number(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix n = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

inline CMatrix projector(std::size_t dim, std::size_t level) {
    if (level >= dim) {
        throw ParameterError("level " + std::to_string(level) + " outside truncation " +
                             std::to_string(dim));
    }
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix p = CMatrix::Zero(d, d);
    p(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
    return p;
}

}  // namespace fock

}  // namespace cfpe
