// Core aliases, error types and small matrix helpers shared by all of duforge.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace duforge {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Error types

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct degenerate_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a construction provably does not exist (MOLS for d = 2, 6).
struct existence_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small helpers

inline double hs_norm(const Mat& X) { return X.norm(); }

inline double unitarity_defect(const Mat& U) {
    return (U.adjoint() * U - Mat::Identity(U.cols(), U.cols())).norm();
}

inline bool all_finite(const Mat& X) {
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            if (!std::isfinite(X(i, j).real()) || !std::isfinite(X(i, j).imag()))
                return false;
    return true;
}

// Local dimension d for a square matrix of order d*d; throws if the order is
// not a perfect square (or the matrix is not square).
inline int local_dim_of_order(const Mat& X) {
    if (X.rows() != X.cols())
        throw dimension_error("expected a square matrix, got " + std::to_string(X.rows()) +
                              "x" + std::to_string(X.cols()));
    const auto n = X.rows();
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d < 2 || static_cast<Eigen::Index>(d) * d != n)
        throw dimension_error("matrix order " + std::to_string(n) +
                              " is not d*d for an integer d >= 2");
    return d;
}

inline Mat kron(const Mat& A, const Mat& B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

// HS distance minimized over a global phase on B; the optimal phase is the
// argument of tr(A†B). Pivot-based phase fixing (largest-modulus entry made
// real positive) is ill-defined when entries tie in modulus, e.g. for
// permutations and Fourier matrices, so comparisons use this instead.
inline double phase_aligned_distance(const Mat& A, const Mat& B) {
    const Complex overlap = A.cwiseProduct(B.conjugate()).sum();  // tr(B†A)
    const double mag = std::abs(overlap);
    if (mag < 1e-300) return (A - B).norm();
    return (A - B * (overlap / mag)).norm();
}

}  // namespace duforge
