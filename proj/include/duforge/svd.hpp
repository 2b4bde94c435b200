// Thin wrapper choosing an SVD backend by size: two-sided Jacobi for the
// smallest orders (most accurate), divide-and-conquer above, where Jacobi
// becomes several times slower at identical accuracy for our tolerances.
//
// Eigen 3.4's BDCSVD occasionally mis-deflates on small blocks and returns
// singular values that are off by ~1e-5 (observed on realigned unitaries of
// order 16). Singular values are unique, so a wrong set cannot reproduce
// the input; every divide-and-conquer result is therefore certified by
// reconstruction and recomputed with Jacobi when the certificate fails.

#pragma once

#include "duforge/core.hpp"

#include <vector>

namespace duforge {

struct SvdResult {
    Mat U;
    Mat V;
    Eigen::VectorXd sigma;  // descending
};

inline constexpr int kJacobiMaxOrder = 12;

namespace detail {

template <class Svd>
SvdResult svd_from(const Svd& svd) {
    return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

inline bool certified(const SvdResult& r, const Mat& M) {
    const double scale = std::max(1.0, r.sigma.size() ? r.sigma(0) : 0.0);
    const Mat recon = r.U * r.sigma.asDiagonal() * r.V.adjoint();
    return (recon - M).norm() <= 1e-11 * scale * std::sqrt(static_cast<double>(M.rows()));
}

}  // namespace detail

inline SvdResult svd_decompose(const Mat& M) {
    if (M.rows() <= kJacobiMaxOrder)
        return detail::svd_from(
            Eigen::JacobiSVD<Mat>(M, Eigen::ComputeThinU | Eigen::ComputeThinV));
    SvdResult r = detail::svd_from(
        Eigen::BDCSVD<Mat>(M, Eigen::ComputeThinU | Eigen::ComputeThinV));
    if (!detail::certified(r, M))
        r = detail::svd_from(
            Eigen::JacobiSVD<Mat>(M, Eigen::ComputeThinU | Eigen::ComputeThinV));
    return r;
}

inline Eigen::VectorXd singular_values(const Mat& M) { return svd_decompose(M).sigma; }

}  // namespace duforge
