#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "specb/bandit.hpp"
#include "specb/linalg.hpp"
#include "specb/spectral.hpp"

namespace specb {

enum class PolicyKind { SpectralUCB, SpectralTS, LinUCB, LinearTS };

inline bool is_spectral(PolicyKind k) {
    return k == PolicyKind::SpectralUCB || k == PolicyKind::SpectralTS;
}
inline bool is_thompson(PolicyKind k) {
    return k == PolicyKind::SpectralTS || k == PolicyKind::LinearTS;
}

inline const char* policy_token(PolicyKind k) {
    switch (k) {
        case PolicyKind::SpectralUCB: return "sucb";
        case PolicyKind::SpectralTS: return "sts";
        case PolicyKind::LinUCB: return "lucb";
        case PolicyKind::LinearTS: return "lts";
    }
    return "?";
}

inline const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::SpectralUCB: return "SpectralUCB";
        case PolicyKind::SpectralTS: return "SpectralTS";
        case PolicyKind::LinUCB: return "LinUCB";
        case PolicyKind::LinearTS: return "LinearTS";
    }
    return "?";
}

inline PolicyKind parse_policy(const std::string& token) {
    if (token == "sucb") return PolicyKind::SpectralUCB;
    if (token == "sts") return PolicyKind::SpectralTS;
    if (token == "lucb") return PolicyKind::LinUCB;
    if (token == "lts") return PolicyKind::LinearTS;
    throw std::invalid_argument("unknown policy token '" + token + "' (expected sucb|sts|lucb|lts)");
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::SpectralUCB;
    double delta = 0.001;       // confidence parameter
    double noise_bound = 0.01;  // R
    double norm_bound = 1.0;    // C, upper bound on ||alpha*||_Lambda
    double lambda_reg = 1.0;    // lambda
    int horizon = 200;          // T
    std::uint64_t rng_seed = 0; // posterior sampling stream (TS only)

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("PolicyConfig: delta must be in (0,1)");
        if (noise_bound < 0.0) throw std::invalid_argument("PolicyConfig: noise bound must be >= 0");
        if (norm_bound < 0.0) throw std::invalid_argument("PolicyConfig: norm bound must be >= 0");
        if (!(lambda_reg > 0.0)) throw std::invalid_argument("PolicyConfig: lambda must be > 0");
        if (horizon < 1) throw std::invalid_argument("PolicyConfig: horizon must be >= 1");
    }
};

// Regularized least-squares state shared by all four policies. The Gram
// matrix V_t = V_1 + sum x x^T is kept alongside its inverse (rank-one
// Sherman-Morrison maintenance) and its lower Cholesky factor (rank-one
// update), so both selection rules stay at their advertised per-step cost.
struct PolicyState {
    Eigen::MatrixXd v_matrix;
    Eigen::MatrixXd v_inverse;
    Eigen::MatrixXd chol_factor;   // lower triangular, L L^T = V
    Eigen::VectorXd response_acc;  // f = sum x r
    Eigen::VectorXd alpha_hat;     // V^{-1} f
    int step = 0;                  // pulls absorbed so far
    int dim_constant = 0;          // effective dimension d (spectral) or ambient D = N (linear)
};

// V_1 = Lambda for the spectral policies, lambda * I for the linear
// baselines; both are diagonal, so the initial inverse and Cholesky factor
// are too. The dimension constant is fixed here for the whole run.
inline PolicyState init_policy(const PolicyConfig& config, const SpectralBasis& basis) {
    config.validate();
    const int n = basis.num_nodes();
    Eigen::VectorXd diag = is_spectral(config.kind)
                               ? basis.reg_eigenvalues
                               : Eigen::VectorXd::Constant(n, config.lambda_reg);
    PolicyState s;
    s.v_matrix = diag.asDiagonal();
    s.v_inverse = diag.cwiseInverse().asDiagonal();
    s.chol_factor = diag.cwiseSqrt().asDiagonal();
    s.response_acc = Eigen::VectorXd::Zero(n);
    s.alpha_hat = Eigen::VectorXd::Zero(n);
    s.step = 0;
    s.dim_constant = is_spectral(config.kind) ? effective_dimension(basis, config.horizon) : n;
    return s;
}

// c_t = 2R sqrt(d ln(1 + t/lambda) + 2 ln(1/delta)) + C, natural logs.
inline double ucb_width(const PolicyConfig& config, int d, int t) {
    if (t < 1) throw std::invalid_argument("ucb_width: t must be >= 1");
    const double inside = static_cast<double>(d) * std::log1p(static_cast<double>(t) / config.lambda_reg) +
                          2.0 * std::log(1.0 / config.delta);
    return 2.0 * config.noise_bound * std::sqrt(inside) + config.norm_bound;
}

// v = R sqrt(6 d ln((lambda + T) / (delta lambda))) + C, natural log.
inline double ts_scale(const PolicyConfig& config, int d) {
    config.validate();
    const double t = static_cast<double>(config.horizon);
    const double inside = 6.0 * static_cast<double>(d) *
                          std::log((config.lambda_reg + t) / (config.delta * config.lambda_reg));
    return config.noise_bound * std::sqrt(inside) + config.norm_bound;
}

// argmax_v <x_v, alpha_hat> + c_t ||x_v||_{V^{-1}}, ties to the lowest index.
// The N Mahalanobis norms make this the O(N^3) step of the UCB policies.
inline int select_ucb(const PolicyState& state, const SpectralBasis& basis, double c_t) {
    const Eigen::VectorXd predicted = basis.q * state.alpha_hat;
    const Eigen::VectorXd width2 =
        (basis.q * state.v_inverse).cwiseProduct(basis.q).rowwise().sum();
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < basis.num_nodes(); ++v) {
        const double score = predicted(v) + c_t * std::sqrt(std::max(width2(v), 0.0));
        if (score > best_score) {
            best_score = score;
            best = v;
        }
    }
    return best;
}

// One posterior draw alpha~ = alpha_hat + v * L^{-T} z with z standard
// normal; covariance is v^2 V^{-1}. Back substitution keeps this O(N^2).
inline Eigen::VectorXd sample_posterior(const PolicyState& state, double v_scale, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(state.alpha_hat.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
    return state.alpha_hat + v_scale * solve_upper_from_lower(state.chol_factor, z);
}

// argmax_a <x_a, alpha~>, ties to the lowest index.
inline int select_ts(const PolicyState& state, const SpectralBasis& basis, double v_scale,
                     std::mt19937_64& rng) {
    const Eigen::VectorXd scores = basis.q * sample_posterior(state, v_scale, rng);
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < basis.num_nodes(); ++v) {
        if (scores(v) > best_score) {
            best_score = scores(v);
            best = v;
        }
    }
    return best;
}

// Absorbs one observation: V += x x^T with the inverse maintained through
// (V + xx^T)^{-1} = V^{-1} - (V^{-1}x)(V^{-1}x)^T / (1 + x^T V^{-1} x),
// the Cholesky factor through a rank-one update, f += r x, alpha_hat = V^{-1} f.
inline void update_state(PolicyState& state, const Eigen::VectorXd& x, double reward) {
    if (x.size() != state.alpha_hat.size()) throw std::invalid_argument("update_state: feature size mismatch");
    if (x.norm() > 1.0 + 1e-9) throw std::invalid_argument("update_state: feature norm must be <= 1");
    const Eigen::VectorXd vx = state.v_inverse * x;
    const double denom = 1.0 + x.dot(vx);
    if (!(denom > 0.0)) {
        throw std::runtime_error("update_state: rank-one denominator <= 0, state corrupted");
    }
    state.v_matrix.noalias() += x * x.transpose();
    state.v_inverse.noalias() -= (vx * vx.transpose()) / denom;
    cholesky_rank_one_update(state.chol_factor, x);
    state.response_acc.noalias() += reward * x;
    state.alpha_hat.noalias() = state.v_inverse * state.response_acc;
    ++state.step;
}

// Owns one policy's config, state and sampling stream; the harness drives a
// run as select() / observe() pairs.
class Policy {
  public:
    Policy(const PolicyConfig& config, const SpectralBasis& basis)
        : config_(config), basis_(&basis), state_(init_policy(config, basis)), rng_(config.rng_seed) {
        if (is_thompson(config.kind)) {
            v_scale_ = ts_scale(config_, state_.dim_constant);
        }
    }

    int select() {
        if (is_thompson(config_.kind)) {
            return select_ts(state_, *basis_, v_scale_, rng_);
        }
        const int t = state_.step + 1;
        return select_ucb(state_, *basis_, ucb_width(config_, state_.dim_constant, t));
    }

    void observe(int arm, double reward) {
        update_state(state_, basis_->arm_feature(arm), reward);
    }

    const PolicyConfig& config() const { return config_; }
    const PolicyState& state() const { return state_; }
    int dim_constant() const { return state_.dim_constant; }
    double posterior_scale() const { return v_scale_; }

  private:
    PolicyConfig config_;
    const SpectralBasis* basis_;
    PolicyState state_;
    std::mt19937_64 rng_;
    double v_scale_ = 0.0;
};

}  // namespace specb
