// Two-qubit nonlocal invariants: the Cartan coordinates (c1, c2, c3) of the
// canonical form exp(-i c1 XX - i c2 YY - i c3 ZZ), folded into the half
// Weyl chamber 0 ≤ c3 ≤ c2 ≤ c1 ≤ π/4 (gates with ±c3 identified).
//
// Extraction: conjugate into the magic basis, where the local group acts by
// real orthogonal matrices, and read the coordinates off the eigenvalue
// phases of m = VᵀV. Only eigenvalues enter (m is unitary, hence normal, so
// its spectrum is well conditioned even when degenerate); every labeling,
// branch and determinant-root ambiguity lands in the orbit of the folding
// group {coordinate permutations, sign flips, π/2 shifts}, so folding the
// raw solution canonicalizes it.

#pragma once

#include "duforge/core.hpp"
#include "duforge/maps.hpp"
#include "duforge/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace duforge {

inline constexpr double kPi = 3.14159265358979323846;

struct CartanCoords {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

namespace detail {

// Magic-basis change (Makhlin convention): columns are Bell-type states.
inline Eigen::Matrix4cd magic_basis() {
    Eigen::Matrix4cd Q = Eigen::Matrix4cd::Zero();
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    Q(0, 0) = s;
    Q(0, 3) = i * s;
    Q(1, 1) = i * s;
    Q(1, 2) = s;
    Q(2, 1) = i * s;
    Q(2, 2) = -s;
    Q(3, 0) = s;
    Q(3, 3) = -i * s;
    return Q;
}

// Bell basis columns: Φ+, Φ-, Ψ+, Ψ- (joint eigenbasis of XX, YY, ZZ).
inline Eigen::Matrix4cd bell_basis() {
    Eigen::Matrix4cd B = Eigen::Matrix4cd::Zero();
    const double s = 1.0 / std::sqrt(2.0);
    B(0, 0) = s;
    B(3, 0) = s;
    B(0, 1) = s;
    B(3, 1) = -s;
    B(1, 2) = s;
    B(2, 2) = s;
    B(1, 3) = s;
    B(2, 3) = -s;
    return B;
}

inline double fold_half_chamber(double c) {
    c = std::fmod(c, kPi / 2.0);
    if (c < 0.0) c += kPi / 2.0;
    if (c > kPi / 4.0) c = kPi / 2.0 - c;
    return c == 0.0 ? 0.0 : c;  // normalize -0.0
}

}  // namespace detail

inline CartanCoords cartan_coords(const BipartiteUnitary& U) {
    if (U.d != 2) throw dimension_error("cartan_coords: defined for d = 2 only");
    const Eigen::Matrix4cd Q = detail::magic_basis();
    Eigen::Matrix4cd Us = U.matrix;
    Us *= std::pow(Us.determinant(), -0.25);  // any quartic root branch works
    const Eigen::Matrix4cd V = Q.adjoint() * Us * Q;
    const Eigen::Matrix4cd m = V.transpose() * V;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m, /*computeEigenvectors=*/false);
    const Eigen::Vector4cd ev = es.eigenvalues();

    // three of the four phases determine (c1, c2, c3) up to folding
    double v[3];
    for (int a = 0; a < 3; ++a) v[a] = -std::arg(ev(a)) / 2.0;
    double c[3] = {(v[0] + v[2]) / 2.0, (v[1] + v[2]) / 2.0, (v[0] + v[1]) / 2.0};
    for (double& x : c) x = detail::fold_half_chamber(x);
    std::sort(c, c + 3, std::greater<double>());
    return {c[0], c[1], c[2]};
}

// The canonical representative exp(-i c1 XX - i c2 YY - i c3 ZZ), assembled
// directly in the Bell eigenbasis (no matrix exponential needed).
inline BipartiteUnitary canonical_gate(const CartanCoords& c) {
    const Eigen::Matrix4cd B = detail::bell_basis();
    const std::array<double, 4> phase = {
        c.c1 - c.c2 + c.c3,    // Φ+
        -c.c1 + c.c2 + c.c3,   // Φ-
        c.c1 + c.c2 - c.c3,    // Ψ+
        -(c.c1 + c.c2 + c.c3)  // Ψ-
    };
    Eigen::Matrix4cd D = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) D(k, k) = std::exp(Complex(0.0, -phase[k]));
    Mat G = B * D * B.adjoint();
    return BipartiteUnitary(2, std::move(G));
}

inline BipartiteUnitary canonical_gate(double c1, double c2, double c3) {
    return canonical_gate(CartanCoords{c1, c2, c3});
}

// Coordinates of U_k = kind^k(U_0) for k = 0..n.
inline std::vector<CartanCoords> chamber_trajectory(const BipartiteUnitary& U0, MapKind kind,
                                                    int n) {
    if (U0.d != 2) throw dimension_error("chamber_trajectory: defined for d = 2 only");
    std::vector<CartanCoords> coords;
    coords.reserve(n + 1);
    BipartiteUnitary current = U0;
    coords.push_back(cartan_coords(current));
    for (int k = 0; k < n; ++k) {
        current = apply_map(current, kind);
        coords.push_back(cartan_coords(current));
    }
    return coords;
}

}  // namespace duforge
