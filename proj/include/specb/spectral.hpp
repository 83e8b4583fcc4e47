#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "specb/jacobi.hpp"

namespace specb {

// Eigenpairs of a graph Laplacian plus the regularized eigenvalue matrix.
// Columns of q are eigenvectors in ascending eigenvalue order; the feature
// vector of arm v is the v-th ROW of q, which has unit norm because q is
// orthogonal.
struct SpectralBasis {
    Eigen::MatrixXd q;
    Eigen::VectorXd lap_eigenvalues;
    double lambda_reg = 0.0;
    Eigen::VectorXd reg_eigenvalues;  // lap_eigenvalues + lambda_reg

    int num_nodes() const { return static_cast<int>(q.rows()); }

    Eigen::VectorXd arm_feature(int v) const {
        if (v < 0 || v >= num_nodes()) {
            throw std::out_of_range("arm_feature: node index out of range");
        }
        return q.row(v).transpose();
    }

    // All noiseless payoffs at once: entry v is <x_v, alpha>.
    Eigen::VectorXd payoffs(const Eigen::VectorXd& alpha) const { return q * alpha; }

    // Mahalanobis norm sqrt(alpha^T Lambda alpha), the smoothness budget C.
    double norm_lambda(const Eigen::VectorXd& alpha) const {
        return std::sqrt((reg_eigenvalues.array() * alpha.array().square()).sum());
    }
};

inline SpectralBasis eigendecompose(const Eigen::MatrixXd& laplacian, double lambda_reg) {
    if (!(lambda_reg > 0.0)) throw std::invalid_argument("eigendecompose: lambda_reg must be > 0");
    SymmetricEigenResult eig = jacobi_eigensolve(laplacian);
    SpectralBasis basis;
    basis.q = std::move(eig.eigenvectors);
    basis.lap_eigenvalues = std::move(eig.eigenvalues);
    basis.lambda_reg = lambda_reg;
    basis.reg_eigenvalues = basis.lap_eigenvalues.array() + lambda_reg;
    return basis;
}

// Largest d in {1..N} with (d-1) * lambda_d <= T / ln(1 + T/lambda), where
// lambda_d is the d-th regularized eigenvalue (1-indexed) and lambda the
// smallest one. Natural log. d >= 1 always since the d = 1 term is zero.
inline int effective_dimension(const Eigen::VectorXd& reg_eigenvalues, double lambda_reg, int horizon) {
    if (horizon < 1) throw std::invalid_argument("effective_dimension: horizon must be >= 1");
    if (!(lambda_reg > 0.0)) throw std::invalid_argument("effective_dimension: lambda_reg must be > 0");
    const double t = static_cast<double>(horizon);
    const double threshold = t / std::log1p(t / lambda_reg);
    const int n = static_cast<int>(reg_eigenvalues.size());
    for (int d = n; d >= 2; --d) {
        if (static_cast<double>(d - 1) * reg_eigenvalues(d - 1) <= threshold) return d;
    }
    return 1;
}

inline int effective_dimension(const SpectralBasis& basis, int horizon) {
    return effective_dimension(basis.reg_eigenvalues, basis.lambda_reg, horizon);
}

}  // namespace specb
