// Haar-distributed unitaries (CUE) and Haar-random product states.

#pragma once

#include "duforge/core.hpp"
#include "duforge/rng.hpp"

#include <utility>

namespace duforge {

// Haar unitary of order N: complex Ginibre matrix, QR factorization, then
// the columns of Q are rescaled by the phases of diag(R). Plain QR is not
// Haar; the phase correction makes it exactly so.
inline Mat cue_sample(int N, StreamRng& rng) {
    if (N < 1) throw parameter_error("cue_sample: N must be >= 1");
    Mat A(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            A(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ();
    const Vec diag = qr.matrixQR().diagonal();
    for (int i = 0; i < N; ++i) {
        const double m = std::abs(diag(i));
        Q.col(i) *= (m > 0.0) ? diag(i) / m : Complex(1.0, 0.0);
    }
    return Q;
}

inline Mat cue_sample(int N, RngSeed seed) {
    StreamRng rng(seed);
    return cue_sample(N, rng);
}

// A pair of independent Haar-uniform unit vectors of length d (A drawn
// first, then B).
inline std::pair<Vec, Vec> haar_product_state(int d, StreamRng& rng) {
    if (d < 2) throw dimension_error("haar_product_state: d must be >= 2");
    Vec a(d), b(d);
    for (int i = 0; i < d; ++i) a(i) = rng.complex_normal();
    for (int i = 0; i < d; ++i) b(i) = rng.complex_normal();
    a /= a.norm();
    b /= b.norm();
    return {std::move(a), std::move(b)};
}

inline std::pair<Vec, Vec> haar_product_state(int d, RngSeed seed) {
    StreamRng rng(seed);
    return haar_product_state(d, rng);
}

}  // namespace duforge
