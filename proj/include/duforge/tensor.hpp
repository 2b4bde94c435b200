// Bipartite operators on H_A ⊗ H_B with equal local dimension d, and the
// index reshuffles everything else is built on.
//
// Composite index convention, fixed globally: a basis label n of the joint
// space decomposes as n = d*i + j with i the A index and j the B index
// (A major, B minor). Row-vectorization is used throughout.

#pragma once

#include "duforge/core.hpp"

#include <array>
#include <utility>

namespace duforge {

// ---------------------------------------------------------------------------
// Domain types

// A unitary on H_A^d ⊗ H_B^d, stored dense as a d²×d² matrix.
struct BipartiteUnitary {
    int d = 0;
    Mat matrix;

    // HS tolerance on U†U - I, scaled by d².
    static constexpr double unitarity_tol_scale = 1e-10;

    BipartiteUnitary(int local_dim, Mat m) : d(local_dim), matrix(std::move(m)) {
        if (d < 2) throw dimension_error("local dimension must be >= 2");
        const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
        if (matrix.rows() != n || matrix.cols() != n)
            throw dimension_error("matrix order does not match d*d");
        if (!all_finite(matrix)) throw precondition_error("matrix has non-finite entries");
        const double defect = unitarity_defect(matrix);
        if (defect > unitarity_tol_scale * n)
            throw precondition_error("matrix is not unitary: defect " + std::to_string(defect));
    }

    Eigen::Index order() const { return matrix.rows(); }
};

// |U⟩ on (A, A', B, B'), amplitudes flat-indexed as ((a*d + a')*d + b)*d + b'.
struct FourPartyState {
    int d = 0;
    Vec amplitudes;

    FourPartyState(int local_dim, Vec amps) : d(local_dim), amplitudes(std::move(amps)) {
        if (d < 2) throw dimension_error("local dimension must be >= 2");
        const Eigen::Index n = static_cast<Eigen::Index>(d) * d * d * d;
        if (amplitudes.size() != n) throw dimension_error("amplitude count does not match d^4");
        if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
            throw precondition_error("state is not normalized");
    }
};

// ---------------------------------------------------------------------------
// Index reshuffles

// Realignment: R[(n,m),(α,β)] = U[(n,α),(m,β)]. Involutive, HS-preserving.
inline Mat realign(const Mat& U) {
    const int d = local_dim_of_order(U);
    Mat R(U.rows(), U.cols());
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    R(n * d + m, a * d + b) = U(n * d + a, m * d + b);
    return R;
}

// Partial transpose on A: T[(m,α),(n,β)] = U[(n,α),(m,β)]. Involutive.
inline Mat partial_transpose(const Mat& U) {
    const int d = local_dim_of_order(U);
    Mat T(U.rows(), U.cols());
    for (int m = 0; m < d; ++m)
        for (int a = 0; a < d; ++a)
            for (int n = 0; n < d; ++n)
                for (int b = 0; b < d; ++b)
                    T(m * d + a, n * d + b) = U(n * d + a, m * d + b);
    return T;
}

// ---------------------------------------------------------------------------
// Elementary constructions

inline BipartiteUnitary swap_gate(int d) {
    if (d < 2) throw dimension_error("swap_gate: d must be >= 2");
    Mat S = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            S(j * d + i, i * d + j) = 1.0;
    return BipartiteUnitary(d, std::move(S));
}

// |X⟩ = (X ⊗ I)|Φ+⟩ = Σ_ij X_ij |ij⟩ / √d, returned normalized. The norm
// before normalization is ‖X‖_HS/√d, which is 1 exactly when X is unitary.
inline Vec vectorize_operator(const Mat& X) {
    if (X.rows() != X.cols()) throw dimension_error("vectorize_operator: square input required");
    const int d = static_cast<int>(X.rows());
    Vec v(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            v(i * d + j) = X(i, j);
    const double nrm = v.norm();
    if (nrm < 1e-300) throw degenerate_input_error("vectorize_operator: zero matrix");
    return v / nrm;
}

// |U⟩ = (U_AB ⊗ I_{A'B'}) |Φ+⟩_{AA'} |Φ+⟩_{BB'}; amplitudes U[(a,b),(a',b')]/d.
inline FourPartyState ame_state(const BipartiteUnitary& U) {
    const int d = U.d;
    Vec amps(static_cast<Eigen::Index>(d) * d * d * d);
    for (int a = 0; a < d; ++a)
        for (int ap = 0; ap < d; ++ap)
            for (int b = 0; b < d; ++b)
                for (int bp = 0; bp < d; ++bp)
                    amps(((a * d + ap) * d + b) * d + bp) = U.matrix(a * d + b, ap * d + bp) / double(d);
    return FourPartyState(d, std::move(amps));
}

// Linear entropies 1 - tr(ρ²) of the three balanced bipartitions, in the
// order (AB|A'B', AA'|BB', A'B|AB'). Computed by explicit partial trace of
// the four-party amplitudes; this is deliberately independent of realign /
// partial_transpose so it can serve as a cross-check on those.
inline std::array<double, 3> bipartition_entropies(const FourPartyState& s) {
    const int d = s.d;
    const auto amp = [&](int a, int ap, int b, int bp) {
        return s.amplitudes(((a * d + ap) * d + b) * d + bp);
    };
    Mat M1(d * d, d * d), M2(d * d, d * d), M3(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int ap = 0; ap < d; ++ap)
            for (int b = 0; b < d; ++b)
                for (int bp = 0; bp < d; ++bp) {
                    const Complex v = amp(a, ap, b, bp);
                    M1(a * d + b, ap * d + bp) = v;   // AB | A'B'
                    M2(a * d + ap, b * d + bp) = v;   // AA' | BB'
                    M3(ap * d + b, a * d + bp) = v;   // A'B | AB'
                }
    const auto lin_entropy = [](const Mat& M) {
        Mat rho = M * M.adjoint();
        return 1.0 - rho.squaredNorm();
    };
    return {lin_entropy(M1), lin_entropy(M2), lin_entropy(M3)};
}

}  // namespace duforge
