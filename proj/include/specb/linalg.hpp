#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace specb {

// Rank-one update of a lower Cholesky factor: given L with L L^T = V, rewrite
// L in place so that L L^T = V + x x^T. O(n^2). Throws if the factor stops
// being positive definite, which cannot happen for a genuine rank-one
// addition and therefore signals a corrupted state.
inline void cholesky_rank_one_update(Eigen::MatrixXd& l, const Eigen::VectorXd& x) {
    const Eigen::Index n = l.rows();
    if (l.cols() != n || x.size() != n) {
        throw std::invalid_argument("cholesky_rank_one_update: dimension mismatch");
    }
    Eigen::VectorXd w = x;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lkk = l(k, k);
        if (!(lkk > 0.0)) {
            throw std::runtime_error("cholesky_rank_one_update: factor not positive definite");
        }
        const double r = std::hypot(lkk, w(k));
        const double c = r / lkk;
        const double s = w(k) / lkk;
        l(k, k) = r;
        for (Eigen::Index j = k + 1; j < n; ++j) {
            l(j, k) = (l(j, k) + s * w(j)) / c;
            w(j) = c * w(j) - s * l(j, k);
        }
    }
}

// Solves L^T u = z by back substitution, L lower triangular. The solution has
// covariance (L L^T)^{-1} when z is a standard normal vector.
inline Eigen::VectorXd solve_upper_from_lower(const Eigen::MatrixXd& l, const Eigen::VectorXd& z) {
    const Eigen::Index n = l.rows();
    Eigen::VectorXd u(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double acc = z(i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            acc -= l(j, i) * u(j);
        }
        const double lii = l(i, i);
        if (!(lii > 0.0)) {
            throw std::runtime_error("solve_upper_from_lower: factor not positive definite");
        }
        u(i) = acc / lii;
    }
    return u;
}

}  // namespace specb
