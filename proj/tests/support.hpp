#pragma once

// Random generators for property tests.

#include <random>
#include <string>
#include <vector>

#include "cfpe/hilbert.hpp"

namespace cfpe::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20240611);
    return engine;
}

inline CVector random_vector(Eigen::Index n) {
    std::normal_distribution<double> normal;
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(rng()), normal(rng()));
    return v;
}

inline CMatrix random_matrix(Eigen::Index n) {
    std::normal_distribution<double> normal;
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(normal(rng()), normal(rng()));
    }
    return m;
}

inline Complex random_scalar() {
    std::normal_distribution<double> normal;
    Complex z(normal(rng()), normal(rng()));
    while (std::abs(z) < 1e-3) z = Complex(normal(rng()), normal(rng()));
    return z;
}

// 1 to 3 factors, each of dimension 2 or 3.
inline BasisSpec random_basis() {
    std::uniform_int_distribution<int> rank(1, 3);
    std::uniform_int_distribution<std::size_t> dim(2, 3);
    std::vector<Factor> factors;
    const int r = rank(rng());
    for (int i = 0; i < r; ++i) factors.push_back({"f" + std::to_string(i), dim(rng())});
    return BasisSpec(std::move(factors));
}

inline StateVector random_state(const BasisSpec& b) {
    return normalize(StateVector(b, random_vector(static_cast<Eigen::Index>(b.dimension()))));
}

inline Operator random_operator(const BasisSpec& b) {
    return Operator(b, random_matrix(static_cast<Eigen::Index>(b.dimension())));
}

inline Operator random_hermitian(const BasisSpec& b) {
    const CMatrix m = random_matrix(static_cast<Eigen::Index>(b.dimension()));
    return Operator(b, (m + m.adjoint()) * 0.5);
}

}  // namespace cfpe::testing
