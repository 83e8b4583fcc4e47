#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "specb/linalg.hpp"

using specb::cholesky_rank_one_update;
using specb::solve_upper_from_lower;

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = gauss(rng);
    return b * b.transpose() + Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_unit_scaled(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = gauss(rng);
    return x / (x.norm() + 1.0);  // norm strictly below 1
}

}  // namespace

TEST_CASE("cholesky rank-one update matches refactorization") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        Eigen::MatrixXd v = random_spd(n, rng);
        Eigen::MatrixXd l = v.llt().matrixL();
        const Eigen::VectorXd x = random_unit_scaled(n, rng);
        cholesky_rank_one_update(l, x);
        const Eigen::MatrixXd v_plus = v + x * x.transpose();
        REQUIRE((l * l.transpose() - v_plus).cwiseAbs().maxCoeff() < 1e-10);
        // factor stays lower triangular with positive diagonal
        for (int i = 0; i < n; ++i) {
            REQUIRE(l(i, i) > 0.0);
            for (int j = i + 1; j < n; ++j) REQUIRE(l(i, j) == 0.0);
        }
    }
}

TEST_CASE("repeated rank-one updates track the running Gram matrix") {
    std::mt19937_64 rng(12);
    const int n = 6;
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n) * 0.5;
    Eigen::MatrixXd l = v.llt().matrixL();
    for (int step = 0; step < 40; ++step) {
        const Eigen::VectorXd x = random_unit_scaled(n, rng);
        v += x * x.transpose();
        cholesky_rank_one_update(l, x);
    }
    REQUIRE((l * l.transpose() - v).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("cholesky update rejects a broken factor") {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(3, 3);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(3) * 0.1;
    REQUIRE_THROWS_AS(cholesky_rank_one_update(l, x), std::runtime_error);
}

TEST_CASE("solve_upper_from_lower solves L^T u = z") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const Eigen::MatrixXd v = random_spd(n, rng);
        const Eigen::MatrixXd l = v.llt().matrixL();
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = gauss(rng);
        const Eigen::VectorXd u = solve_upper_from_lower(l, z);
        REQUIRE((l.transpose() * u - z).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("L^{-T} z has covariance factor of the inverse") {
    // u = L^{-T} z implies u u^T averages to (L L^T)^{-1}; checked exactly via
    // the algebraic identity L^T (V^{-1}) L = I rather than Monte Carlo.
    std::mt19937_64 rng(14);
    const Eigen::MatrixXd v = random_spd(5, rng);
    const Eigen::MatrixXd l = v.llt().matrixL();
    const Eigen::MatrixXd vinv = v.inverse();
    REQUIRE((l.transpose() * vinv * l - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}
