#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "specb/spectral.hpp"
#include "specb/util.hpp"

namespace specb {

// Draws a hidden weight vector supported on the k smoothest eigenvectors:
// i.i.d. standard-normal coefficients on indices 1..k, zeros elsewhere,
// rescaled so the largest absolute payoff over the nodes is exactly 1.
inline Eigen::VectorXd make_smooth_alpha(const SpectralBasis& basis, int k, std::uint64_t seed) {
    const int n = basis.num_nodes();
    if (k < 1 || k > n) throw std::invalid_argument("make_smooth_alpha: need 1 <= k <= N");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    double peak = 0.0;
    do {  // zero payoffs have probability zero; resample if it happens anyway
        for (int i = 0; i < k; ++i) alpha(i) = gauss(rng);
        peak = basis.payoffs(alpha).cwiseAbs().maxCoeff();
    } while (!(peak > 0.0));
    alpha /= peak;
    return alpha;
}

// The environment: answers noisy reward queries against a hidden payoff
// vector. Synthetic instances carry alpha* and normalize it so that
// max_v |<x_v, alpha*>| = 1; evaluation-mode instances take the per-node
// payoffs directly (ratings pipeline) and use them as-is.
class BanditInstance {
  public:
    BanditInstance(const SpectralBasis& basis, const Eigen::VectorXd& alpha_star,
                   double noise_level, std::uint64_t noise_seed)
        : noise_level_(noise_level), rng_(noise_seed) {
        if (noise_level < 0.0) throw std::invalid_argument("BanditInstance: noise level must be >= 0");
        if (alpha_star.size() != basis.num_nodes()) {
            throw std::invalid_argument("BanditInstance: alpha size mismatch");
        }
        alpha_star_ = alpha_star;
        mean_payoffs_ = basis.payoffs(alpha_star_);
        const double peak = mean_payoffs_.cwiseAbs().maxCoeff();
        if (!(peak > 0.0)) throw std::invalid_argument("BanditInstance: zero payoff vector");
        alpha_star_ /= peak;
        mean_payoffs_ /= peak;
        has_alpha_ = true;
        alpha_norm_lambda_ = basis.norm_lambda(alpha_star_);
        locate_best();
    }

    BanditInstance(const Eigen::VectorXd& mean_payoffs, double noise_level, std::uint64_t noise_seed)
        : mean_payoffs_(mean_payoffs), noise_level_(noise_level), rng_(noise_seed) {
        if (noise_level < 0.0) throw std::invalid_argument("BanditInstance: noise level must be >= 0");
        if (mean_payoffs_.size() == 0) throw std::invalid_argument("BanditInstance: empty payoff vector");
        locate_best();
    }

    int num_arms() const { return static_cast<int>(mean_payoffs_.size()); }

    double mean_payoff(int v) const {
        check_arm(v);
        return mean_payoffs_(v);
    }

    const Eigen::VectorXd& mean_payoffs() const { return mean_payoffs_; }

    // Noisy reward: <x_v, alpha*> + R * z with z standard normal from the
    // seeded stream. The stream advances once per pull regardless of arm, so
    // paired policies sharing a noise seed see the same epsilon sequence.
    double pull(int v) {
        check_arm(v);
        return mean_payoffs_(v) + noise_level_ * gauss_(rng_);
    }

    int best_arm() const { return best_arm_; }
    double best_value() const { return best_value_; }
    double noise_level() const { return noise_level_; }

    bool has_alpha_star() const { return has_alpha_; }
    const Eigen::VectorXd& alpha_star() const {
        if (!has_alpha_) throw std::logic_error("BanditInstance: no alpha* in evaluation mode");
        return alpha_star_;
    }
    // sqrt(alpha*^T Lambda alpha*), the exact smoothness budget C.
    double alpha_norm_lambda() const {
        if (!has_alpha_) throw std::logic_error("BanditInstance: no alpha* in evaluation mode");
        return alpha_norm_lambda_;
    }

  private:
    void check_arm(int v) const {
        if (v < 0 || v >= num_arms()) throw std::out_of_range("BanditInstance: arm index out of range");
    }
    void locate_best() {
        best_arm_ = 0;
        best_value_ = mean_payoffs_(0);
        for (int v = 1; v < num_arms(); ++v) {
            if (mean_payoffs_(v) > best_value_) {
                best_value_ = mean_payoffs_(v);
                best_arm_ = v;
            }
        }
    }

    Eigen::VectorXd mean_payoffs_;
    Eigen::VectorXd alpha_star_;
    bool has_alpha_ = false;
    double alpha_norm_lambda_ = std::numeric_limits<double>::quiet_NaN();
    double noise_level_ = 0.0;
    int best_arm_ = 0;
    double best_value_ = 0.0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

// Per-step and cumulative pseudo-regret plus wall-clock step timings.
// Pseudo-regret uses noiseless payoffs only; noise never enters here.
class RegretTrace {
  public:
    explicit RegretTrace(int horizon) : horizon_(horizon) {
        if (horizon < 1) throw std::invalid_argument("RegretTrace: horizon must be >= 1");
        per_step_.reserve(static_cast<std::size_t>(horizon));
        cumulative_.reserve(static_cast<std::size_t>(horizon));
        step_ms_.reserve(static_cast<std::size_t>(horizon));
    }

    void record(const BanditInstance& instance, int chosen, double elapsed_ms) {
        if (size() >= horizon_) throw std::runtime_error("RegretTrace: trace already at horizon");
        const double gap = instance.best_value() - instance.mean_payoff(chosen);
        per_step_.push_back(gap);
        cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + gap);
        step_ms_.push_back(elapsed_ms);
    }

    int horizon() const { return horizon_; }
    int size() const { return static_cast<int>(per_step_.size()); }
    bool complete() const { return size() == horizon_; }

    const std::vector<double>& per_step_regret() const { return per_step_; }
    const std::vector<double>& cumulative_regret() const { return cumulative_; }
    const std::vector<double>& step_ms() const { return step_ms_; }

    double final_cumulative_regret() const {
        return cumulative_.empty() ? 0.0 : cumulative_.back();
    }

    double mean_step_ms() const {
        if (step_ms_.empty()) return 0.0;
        double s = 0.0;
        for (double v : step_ms_) s += v;
        return s / static_cast<double>(step_ms_.size());
    }

    // CSV columns: t, inst_regret, cum_regret, step_ms
    void to_csv(std::ostream& os) const {
        os << "t,inst_regret,cum_regret,step_ms\n";
        for (std::size_t i = 0; i < per_step_.size(); ++i) {
            os << (i + 1) << "," << fmt_g(per_step_[i]) << "," << fmt_g(cumulative_[i]) << ","
               << fmt_g(step_ms_[i]) << "\n";
        }
    }

  private:
    int horizon_;
    std::vector<double> per_step_;
    std::vector<double> cumulative_;
    std::vector<double> step_ms_;
};

}  // namespace specb
