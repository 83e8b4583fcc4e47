#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace specb {

struct SymmetricEigenResult {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, matching eigenvalue order
    int sweeps = 0;
    double off_residual = 0.0;     // off-diagonal Frobenius norm at exit
};

inline double offdiag_frobenius(const Eigen::MatrixXd& a) {
    double s = 0.0;
    for (Eigen::Index p = 0; p < a.rows(); ++p) {
        for (Eigen::Index q = p + 1; q < a.cols(); ++q) {
            s += 2.0 * a(p, q) * a(p, q);
        }
    }
    return std::sqrt(s);
}

// Cyclic Jacobi for dense symmetric matrices. Sweeps all (p,q) pairs in a
// fixed order, so the result is deterministic for a given input. Eigenvalues
// come back sorted ascending (stable sort, so the ordering among equal
// eigenvalues is the sweep's own) and each eigenvector is sign-normalized:
// its first component larger than 1e-12 in magnitude is made positive.
inline SymmetricEigenResult jacobi_eigensolve(const Eigen::MatrixXd& matrix,
                                              double tol = 1e-12,
                                              int max_sweeps = 100) {
    const Eigen::Index n = matrix.rows();
    if (matrix.cols() != n) {
        throw std::invalid_argument("jacobi_eigensolve: matrix must be square");
    }
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, matrix.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("jacobi_eigensolve: matrix must be symmetric");
    }

    Eigen::MatrixXd a = matrix;
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);

    int sweep = 0;
    double off = offdiag_frobenius(a);
    while (off > tol && sweep < max_sweeps) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index r = p + 1; r < n; ++r) {
                const double apq = a(p, r);
                if (apq == 0.0) continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double arr = a(r, r);
                a(p, p) = app - t * apq;
                a(r, r) = arr + t * apq;
                a(p, r) = 0.0;
                a(r, p) = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (i != p && i != r) {
                        const double aip = a(i, p);
                        const double air = a(i, r);
                        a(i, p) = aip - s * (air + tau * aip);
                        a(p, i) = a(i, p);
                        a(i, r) = air + s * (aip - tau * air);
                        a(r, i) = a(i, r);
                    }
                    const double qip = q(i, p);
                    const double qir = q(i, r);
                    q(i, p) = qip - s * (qir + tau * qip);
                    q(i, r) = qir + s * (qip - tau * qir);
                }
            }
        }
        ++sweep;
        off = offdiag_frobenius(a);
    }
    if (off > tol) {
        throw std::runtime_error("jacobi_eigensolve: no convergence after " + std::to_string(max_sweeps) +
                                 " sweeps, off-diagonal residual = " + std::to_string(off));
    }

    // Stable ascending sort of the diagonal, columns permuted along.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

    SymmetricEigenResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.eigenvectors.col(k) = q.col(order[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(out.eigenvectors(i, k)) > 1e-12) {
                if (out.eigenvectors(i, k) < 0.0) out.eigenvectors.col(k) = -out.eigenvectors.col(k);
                break;
            }
        }
    }
    out.sweeps = sweep;
    out.off_residual = off;
    return out;
}

}  // namespace specb
