#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "specb/bandit.hpp"
#include "specb/graph.hpp"
#include "specb/policies.hpp"
#include "specb/ratings.hpp"
#include "specb/spectral.hpp"
#include "specb/util.hpp"

namespace specb {

// --------------------------------------------------------------------------
// Regret bounds.
// --------------------------------------------------------------------------

// [8R sqrt(d ln(1+T/lambda) + 2 ln(1/delta)) + 4C + 4] * sqrt(d T ln(1+T/lambda))
inline double theorem1_bound(int d, double lambda_reg, double c_norm, double noise_r, double delta,
                             int horizon) {
    const double t = static_cast<double>(horizon);
    const double dd = static_cast<double>(d);
    const double log_term = std::log1p(t / lambda_reg);
    const double bracket =
        8.0 * noise_r * std::sqrt(dd * log_term + 2.0 * std::log(1.0 / delta)) + 4.0 * c_norm + 4.0;
    return bracket * std::sqrt(dd * t * log_term);
}

// (11g/p) sqrt((4+4lambda)/lambda * d T ln((lambda+T)/lambda)) + 1/T
//   + (g/p)(11/sqrt(lambda) + 2) sqrt(2 T ln(2/delta)),
// p = 1/(4 e sqrt(pi)),
// g = sqrt(4 ln(T N)) (R sqrt(6 d ln((lambda+T)/(delta lambda))) + C)
//   + R sqrt(2 d ln((lambda+T) T^2 / (delta lambda))) + C
inline double theorem2_bound(int d, int num_arms, double lambda_reg, double c_norm, double noise_r,
                             double delta, int horizon) {
    const double t = static_cast<double>(horizon);
    const double dd = static_cast<double>(d);
    const double n = static_cast<double>(num_arms);
    const double p = 1.0 / (4.0 * std::numbers::e * std::sqrt(std::numbers::pi));
    const double g = std::sqrt(4.0 * std::log(t * n)) *
                         (noise_r * std::sqrt(6.0 * dd * std::log((lambda_reg + t) / (delta * lambda_reg))) +
                          c_norm) +
                     noise_r * std::sqrt(2.0 * dd * std::log((lambda_reg + t) * t * t / (delta * lambda_reg))) +
                     c_norm;
    return (11.0 * g / p) * std::sqrt((4.0 + 4.0 * lambda_reg) / lambda_reg * dd * t *
                                      std::log((lambda_reg + t) / lambda_reg)) +
           1.0 / t + (g / p) * (11.0 / std::sqrt(lambda_reg) + 2.0) * std::sqrt(2.0 * t * std::log(2.0 / delta));
}

struct BoundCheck {
    double bound_value = 0.0;
    bool satisfied = false;
};

// Evaluates the bound matching the policy family (UCB -> theorem 1,
// Thompson -> theorem 2) and compares the trace's final cumulative regret.
inline BoundCheck check_regret_bound(const RegretTrace& trace, PolicyKind kind, int d, int num_arms,
                                     double lambda_reg, double c_norm, double noise_r, double delta) {
    if (!trace.complete()) throw std::invalid_argument("check_regret_bound: trace not complete to horizon");
    const int t = trace.horizon();
    BoundCheck out;
    out.bound_value = is_thompson(kind) ? theorem2_bound(d, num_arms, lambda_reg, c_norm, noise_r, delta, t)
                                        : theorem1_bound(d, lambda_reg, c_norm, noise_r, delta, t);
    out.satisfied = trace.final_cumulative_regret() <= out.bound_value;
    return out;
}

// --------------------------------------------------------------------------
// Experiment configuration and execution.
// --------------------------------------------------------------------------

enum class GraphSourceKind { BarabasiAlbert, KnnFromRatings, EdgeList };

struct GraphSource {
    GraphSourceKind kind = GraphSourceKind::BarabasiAlbert;
    // BarabasiAlbert
    int ba_n = 250;
    int ba_m = 3;
    // KnnFromRatings
    std::string ratings_path;
    int completion_rank = 10;
    double completion_mu = 0.1;
    int completion_iters = 50;
    int knn_k = 10;
    std::string cache_dir;  // empty = no completion cache
    // EdgeList
    std::string edge_list_path;
};

struct ExperimentConfig {
    GraphSource source;
    std::vector<PolicyKind> policies;
    int horizon = 200;
    int num_runs = 10;
    std::uint64_t base_seed = 1;
    int smooth_k = 3;  // alpha* support size in synthetic modes
    double delta = 0.001;
    double noise_level = 0.01;  // R
    double lambda_reg = 1.0;
    std::optional<double> c_norm_override;  // default: exact ||alpha*||_Lambda, or 1 for ratings
    std::string output_dir;

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("ExperimentConfig: horizon must be >= 1");
        if (num_runs < 1) throw std::invalid_argument("ExperimentConfig: num_runs must be >= 1");
        if (policies.empty()) throw std::invalid_argument("ExperimentConfig: need at least one policy");
        if (smooth_k < 1) throw std::invalid_argument("ExperimentConfig: smooth_k must be >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ExperimentConfig: delta must be in (0,1)");
        if (noise_level < 0.0) throw std::invalid_argument("ExperimentConfig: noise level must be >= 0");
        if (!(lambda_reg > 0.0)) throw std::invalid_argument("ExperimentConfig: lambda must be > 0");
    }
};

struct PolicyCurve {
    PolicyKind kind = PolicyKind::SpectralUCB;
    std::vector<RegretTrace> traces;  // one per run
    std::vector<double> mean_cum;     // length T
    std::vector<double> stderr_cum;   // length T, 0 when num_runs == 1
    double mean_step_ms = 0.0;
};

struct AggregateResult {
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::vector<std::uint64_t> run_seeds;
    std::vector<int> eff_dims;     // effective dimension of each run's basis
    std::vector<double> c_norms;   // C handed to the policies in each run
    std::vector<PolicyCurve> curves;
};

namespace detail {

constexpr std::uint64_t kGraphStream = fnv1a64("graph");
constexpr std::uint64_t kAlphaStream = fnv1a64("alpha");
constexpr std::uint64_t kNoiseStream = fnv1a64("noise");
constexpr std::uint64_t kUserStream = fnv1a64("user");
constexpr std::uint64_t kCompletionStream = fnv1a64("completion");

inline double elapsed_ms(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace detail

inline const char* graph_source_name(GraphSourceKind k) {
    switch (k) {
        case GraphSourceKind::BarabasiAlbert: return "ba";
        case GraphSourceKind::KnnFromRatings: return "knn-from-ratings";
        case GraphSourceKind::EdgeList: return "edge-list";
    }
    return "?";
}

// Flat key-value dump of every resolved parameter; the experiment's config
// hash is the FNV-1a of this text, so any parameter change shows up in the
// output metadata.
inline std::string resolved_config_text(const ExperimentConfig& config) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "graph_source = \"" << graph_source_name(config.source.kind) << "\"\n";
    switch (config.source.kind) {
        case GraphSourceKind::BarabasiAlbert:
            os << "ba_n = " << config.source.ba_n << "\n";
            os << "ba_m = " << config.source.ba_m << "\n";
            break;
        case GraphSourceKind::KnnFromRatings:
            os << "ratings_file = \"" << config.source.ratings_path << "\"\n";
            os << "completion_rank = " << config.source.completion_rank << "\n";
            os << "completion_mu = " << fmt_g(config.source.completion_mu) << "\n";
            os << "completion_iters = " << config.source.completion_iters << "\n";
            os << "knn_k = " << config.source.knn_k << "\n";
            break;
        case GraphSourceKind::EdgeList:
            os << "edge_list = \"" << config.source.edge_list_path << "\"\n";
            break;
    }
    os << "horizon = " << config.horizon << "\n";
    os << "num_runs = " << config.num_runs << "\n";
    os << "base_seed = " << config.base_seed << "\n";
    os << "smooth_k = " << config.smooth_k << "\n";
    os << "delta = " << fmt_g(config.delta) << "\n";
    os << "noise = " << fmt_g(config.noise_level) << "\n";
    os << "lambda = " << fmt_g(config.lambda_reg) << "\n";
    os << "c_norm = " << (config.c_norm_override ? fmt_g(*config.c_norm_override) : std::string("\"exact\""))
       << "\n";
    for (PolicyKind kind : config.policies) {
        os << "\n[policy." << policy_token(kind) << "]\n";
        os << "name = \"" << policy_name(kind) << "\"\n";
        os << "dimension = \"" << (is_spectral(kind) ? "effective" : "ambient") << "\"\n";
        os << "selection = \"" << (is_thompson(kind) ? "posterior-sample" : "ucb") << "\"\n";
    }
    return os.str();
}

// Ratings preprocessing shared by run_experiment and the CLI: load, complete
// (through the binary cache when cache_dir is set), build the k-NN graph.
struct RatingsPipeline {
    RatingsTable table;
    CompletedMatrix completed;
    WeightedGraph graph;
};

inline RatingsPipeline prepare_ratings_pipeline(const GraphSource& source, std::uint64_t base_seed) {
    if (source.kind != GraphSourceKind::KnnFromRatings) {
        throw std::invalid_argument("prepare_ratings_pipeline: source is not knn-from-ratings");
    }
    RatingsPipeline p;
    p.table = load_ratings(source.ratings_path);
    CompletionKey key;
    key.file_hash = hash_file(source.ratings_path);
    key.rank = source.completion_rank;
    key.mu = source.completion_mu;
    key.iters = source.completion_iters;
    key.seed = mix_seed(base_seed, detail::kCompletionStream);
    std::optional<CompletedMatrix> cached;
    std::string cache_path;
    if (!source.cache_dir.empty()) {
        cache_path = (std::filesystem::path(source.cache_dir) / key.cache_name()).string();
        cached = try_load_completed(cache_path, key);
    }
    if (cached) {
        p.completed = std::move(*cached);
    } else {
        p.completed = complete_low_rank(p.table, key.rank, key.mu, key.iters, key.seed);
        if (!cache_path.empty()) {
            std::filesystem::create_directories(source.cache_dir);
            save_completed(cache_path, key, p.completed);
        }
    }
    p.graph = build_knn_graph(p.completed.item_factors, source.knn_k, Similarity::Cosine);
    return p;
}

// Runs every configured policy on the same per-run instance (same graph,
// same alpha*/payoffs, same noise stream) and aggregates across runs.
// BA graphs and alpha* are redrawn per run; ratings and edge-list graphs are
// built once and only the payoff draw varies. When pipeline_out is non-null
// in ratings mode, the preprocessing products are copied there.
inline AggregateResult run_experiment(const ExperimentConfig& config,
                                      RatingsPipeline* pipeline_out = nullptr) {
    config.validate();
    AggregateResult out;
    out.config = config;
    out.config_hash = fnv1a64(resolved_config_text(config));
    for (PolicyKind kind : config.policies) {
        PolicyCurve c;
        c.kind = kind;
        out.curves.push_back(c);
    }

    // Fixed-graph sources are prepared once, outside the run loop.
    std::optional<SpectralBasis> fixed_basis;
    RatingsTable table;
    CompletedMatrix completed;
    const bool ratings_mode = config.source.kind == GraphSourceKind::KnnFromRatings;
    if (ratings_mode) {
        RatingsPipeline p = prepare_ratings_pipeline(config.source, config.base_seed);
        fixed_basis = eigendecompose(build_laplacian(p.graph), config.lambda_reg);
        table = std::move(p.table);
        completed = std::move(p.completed);
        if (pipeline_out) {
            pipeline_out->table = table;
            pipeline_out->completed = completed;
            pipeline_out->graph = std::move(p.graph);
        }
    } else if (config.source.kind == GraphSourceKind::EdgeList) {
        const WeightedGraph g = read_edge_list(config.source.edge_list_path);
        fixed_basis = eigendecompose(build_laplacian(g), config.lambda_reg);
    }

    for (int run = 0; run < config.num_runs; ++run) {
        const std::uint64_t run_seed = config.base_seed + static_cast<std::uint64_t>(run);
        try {
            SpectralBasis local_basis;
            const SpectralBasis* basis = nullptr;
            if (config.source.kind == GraphSourceKind::BarabasiAlbert) {
                const WeightedGraph g = generate_barabasi_albert(config.source.ba_n, config.source.ba_m,
                                                                 mix_seed(run_seed, detail::kGraphStream));
                local_basis = eigendecompose(build_laplacian(g), config.lambda_reg);
                basis = &local_basis;
            } else {
                basis = &*fixed_basis;
            }

            Eigen::VectorXd alpha_star;
            Eigen::VectorXd payoffs;
            if (ratings_mode) {
                std::mt19937_64 pick(mix_seed(run_seed, detail::kUserStream));
                std::uniform_int_distribution<int> uni(0, table.num_users - 1);
                payoffs = user_reward_function(table, completed, uni(pick));
            } else {
                alpha_star = make_smooth_alpha(*basis, config.smooth_k, mix_seed(run_seed, detail::kAlphaStream));
            }

            const std::uint64_t noise_seed = mix_seed(run_seed, detail::kNoiseStream);
            out.run_seeds.push_back(run_seed);
            out.eff_dims.push_back(effective_dimension(*basis, config.horizon));
            double c_run = 1.0;
            if (config.c_norm_override) {
                c_run = *config.c_norm_override;
            } else if (!ratings_mode) {
                c_run = BanditInstance(*basis, alpha_star, config.noise_level, noise_seed).alpha_norm_lambda();
            }
            out.c_norms.push_back(c_run);

            for (auto& curve : out.curves) {
                // A fresh instance per policy replays the identical noise stream.
                BanditInstance instance =
                    ratings_mode ? BanditInstance(payoffs, config.noise_level, noise_seed)
                                 : BanditInstance(*basis, alpha_star, config.noise_level, noise_seed);
                PolicyConfig pc;
                pc.kind = curve.kind;
                pc.delta = config.delta;
                pc.noise_bound = config.noise_level;
                pc.norm_bound = c_run;
                pc.lambda_reg = config.lambda_reg;
                pc.horizon = config.horizon;
                pc.rng_seed = mix_seed(run_seed, fnv1a64(policy_token(curve.kind)));
                Policy policy(pc, *basis);
                RegretTrace trace(config.horizon);
                for (int t = 0; t < config.horizon; ++t) {
                    const auto t0 = std::chrono::steady_clock::now();
                    const int arm = policy.select();
                    const double reward = instance.pull(arm);
                    policy.observe(arm, reward);
                    const auto t1 = std::chrono::steady_clock::now();
                    trace.record(instance, arm, detail::elapsed_ms(t0, t1));
                }
                curve.traces.push_back(std::move(trace));
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("run " + std::to_string(run) + ": " + e.what());
        }
    }

    for (auto& curve : out.curves) {
        curve.mean_cum.assign(static_cast<std::size_t>(config.horizon), 0.0);
        curve.stderr_cum.assign(static_cast<std::size_t>(config.horizon), 0.0);
        const double runs = static_cast<double>(config.num_runs);
        for (int t = 0; t < config.horizon; ++t) {
            double mean = 0.0;
            for (const auto& tr : curve.traces) mean += tr.cumulative_regret()[static_cast<std::size_t>(t)];
            mean /= runs;
            double var = 0.0;
            if (config.num_runs > 1) {
                for (const auto& tr : curve.traces) {
                    const double d = tr.cumulative_regret()[static_cast<std::size_t>(t)] - mean;
                    var += d * d;
                }
                var /= (runs - 1.0);
            }
            curve.mean_cum[static_cast<std::size_t>(t)] = mean;
            curve.stderr_cum[static_cast<std::size_t>(t)] = std::sqrt(var / runs);
        }
        double ms = 0.0;
        for (const auto& tr : curve.traces) ms += tr.mean_step_ms();
        curve.mean_step_ms = ms / runs;
    }
    return out;
}

// --------------------------------------------------------------------------
// Timing study.
// --------------------------------------------------------------------------

struct TimingRow {
    int n = 0;
    double ucb_ms = 0.0;
    double ts_ms = 0.0;
    double ratio = 0.0;  // ucb_ms / ts_ms
};

// Mean per-step selection+update time of SpectralUCB vs SpectralTS on BA
// graphs of increasing size. Single-threaded wall-clock over the step loop.
inline std::vector<TimingRow> time_complexity_study(const std::vector<int>& n_values, int steps,
                                                    std::uint64_t seed) {
    if (n_values.empty()) throw std::invalid_argument("time_complexity_study: need at least one size");
    for (std::size_t i = 0; i + 1 < n_values.size(); ++i) {
        if (n_values[i] >= n_values[i + 1]) {
            throw std::invalid_argument("time_complexity_study: sizes must be strictly ascending");
        }
    }
    if (steps < 1) throw std::invalid_argument("time_complexity_study: steps must be >= 1");

    std::vector<TimingRow> rows;
    for (int n : n_values) {
        const std::uint64_t size_seed = seed + static_cast<std::uint64_t>(n);
        const WeightedGraph g = generate_barabasi_albert(n, 3, mix_seed(size_seed, detail::kGraphStream));
        const SpectralBasis basis = eigendecompose(build_laplacian(g), 1.0);
        const Eigen::VectorXd alpha = make_smooth_alpha(basis, 3, mix_seed(size_seed, detail::kAlphaStream));

        TimingRow row;
        row.n = n;
        for (PolicyKind kind : {PolicyKind::SpectralUCB, PolicyKind::SpectralTS}) {
            BanditInstance instance(basis, alpha, 0.01, mix_seed(size_seed, detail::kNoiseStream));
            PolicyConfig pc;
            pc.kind = kind;
            pc.noise_bound = 0.01;
            pc.norm_bound = instance.alpha_norm_lambda();
            pc.horizon = steps;
            pc.rng_seed = mix_seed(size_seed, fnv1a64(policy_token(kind)));
            Policy policy(pc, basis);
            double total_ms = 0.0;
            for (int t = 0; t < steps; ++t) {
                const auto t0 = std::chrono::steady_clock::now();
                const int arm = policy.select();
                const double reward = instance.pull(arm);
                policy.observe(arm, reward);
                const auto t1 = std::chrono::steady_clock::now();
                total_ms += detail::elapsed_ms(t0, t1);
            }
            (kind == PolicyKind::SpectralUCB ? row.ucb_ms : row.ts_ms) = total_ms / steps;
        }
        row.ratio = row.ucb_ms / row.ts_ms;
        rows.push_back(row);
    }
    return rows;
}

inline void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_timing_csv: cannot open '" + path + "'");
    out << "n,ucb_ms,ts_ms,ratio\n";
    for (const auto& r : rows) {
        out << r.n << "," << fmt_g(r.ucb_ms) << "," << fmt_g(r.ts_ms) << "," << fmt_g(r.ratio) << "\n";
    }
}

// --------------------------------------------------------------------------
// Output emission.
// --------------------------------------------------------------------------

namespace detail {

inline const char* policy_color(std::size_t idx) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    return kColors[idx % (sizeof(kColors) / sizeof(kColors[0]))];
}

}  // namespace detail

// One mean-regret polyline per policy plus a shaded standard-error band.
inline void write_regret_svg(const AggregateResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_regret_svg: cannot open '" + path + "'");
    const int t_max = result.config.horizon;
    double y_max = 1e-12;
    for (const auto& c : result.curves) {
        for (int t = 0; t < t_max; ++t) {
            y_max = std::max(y_max, c.mean_cum[static_cast<std::size_t>(t)] +
                                        c.stderr_cum[static_cast<std::size_t>(t)]);
        }
    }
    const double w = 860, h = 520, ml = 70, mr = 20, mt = 34, mb = 52;
    const double pw = w - ml - mr, ph = h - mt - mb;
    auto xpos = [&](int t) { return ml + pw * (t_max > 1 ? static_cast<double>(t) / (t_max - 1) : 0.5); };
    auto ypos = [&](double v) { return mt + ph * (1.0 - v / y_max); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = y_max * i / 5.0;
        const double y = ypos(v);
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << fmt_g(y) << "\" x2=\"" << ml << "\" y2=\""
            << fmt_g(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt_g(y + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_g(v) << "</text>\n";
        const int tv = 1 + (t_max - 1) * i / 5;
        const double x = xpos(tv - 1);
        out << "<line x1=\"" << fmt_g(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt_g(x) << "\" y2=\""
            << mt + ph + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_g(x) << "\" y=\"" << mt + ph + 18
            << "\" font-size=\"12\" text-anchor=\"middle\">" << tv << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 14
        << "\" font-size=\"13\" text-anchor=\"middle\">step t</text>\n";
    out << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
        << ")\">cumulative regret</text>\n";

    for (std::size_t ci = 0; ci < result.curves.size(); ++ci) {
        const auto& c = result.curves[ci];
        const char* color = detail::policy_color(ci);
        out << "<path fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" d=\"";
        for (int t = 0; t < t_max; ++t) {
            out << (t == 0 ? "M" : "L") << fmt_g(xpos(t)) << " "
                << fmt_g(ypos(c.mean_cum[static_cast<std::size_t>(t)] +
                              c.stderr_cum[static_cast<std::size_t>(t)]))
                << " ";
        }
        for (int t = t_max - 1; t >= 0; --t) {
            out << "L" << fmt_g(xpos(t)) << " "
                << fmt_g(ypos(std::max(0.0, c.mean_cum[static_cast<std::size_t>(t)] -
                                                c.stderr_cum[static_cast<std::size_t>(t)])))
                << " ";
        }
        out << "Z\"/>\n";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (int t = 0; t < t_max; ++t) {
            out << fmt_g(xpos(t)) << "," << fmt_g(ypos(c.mean_cum[static_cast<std::size_t>(t)])) << " ";
        }
        out << "\"/>\n";
        const double lx = ml + 12 + 150.0 * static_cast<double>(ci);
        out << "<rect x=\"" << fmt_g(lx) << "\" y=\"12\" width=\"12\" height=\"12\" fill=\"" << color
            << "\"/>\n";
        out << "<text x=\"" << fmt_g(lx + 17) << "\" y=\"22\" font-size=\"13\">" << policy_name(c.kind)
            << "</text>\n";
    }
    out << "</svg>\n";
}

// Writes regret_mean.csv, regret_runs.csv, timings.csv, regret.svg and
// config.resolved.toml into dir; returns the paths written. Timing columns
// are kept out of regret_mean.csv so that file is bit-deterministic.
inline std::vector<std::string> emit_outputs(const AggregateResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        const std::string p = (base / name).string();
        std::ofstream out(p);
        if (!out) throw std::runtime_error("emit_outputs: cannot open '" + p + "'");
        written.push_back(p);
        return out;
    };

    {
        auto out = open("regret_mean.csv");
        out << "t";
        for (const auto& c : result.curves) {
            out << "," << policy_token(c.kind) << "_mean," << policy_token(c.kind) << "_se";
        }
        out << "\n";
        for (int t = 0; t < result.config.horizon; ++t) {
            out << (t + 1);
            for (const auto& c : result.curves) {
                out << "," << fmt_g(c.mean_cum[static_cast<std::size_t>(t)]) << ","
                    << fmt_g(c.stderr_cum[static_cast<std::size_t>(t)]);
            }
            out << "\n";
        }
    }
    {
        auto out = open("regret_runs.csv");
        out << "policy,run,t,inst_regret,cum_regret,step_ms\n";
        for (const auto& c : result.curves) {
            for (std::size_t run = 0; run < c.traces.size(); ++run) {
                const auto& tr = c.traces[run];
                for (int t = 0; t < tr.size(); ++t) {
                    const auto i = static_cast<std::size_t>(t);
                    out << policy_token(c.kind) << "," << run << "," << (t + 1) << ","
                        << fmt_g(tr.per_step_regret()[i]) << "," << fmt_g(tr.cumulative_regret()[i]) << ","
                        << fmt_g(tr.step_ms()[i]) << "\n";
                }
            }
        }
    }
    {
        auto out = open("timings.csv");
        out << "policy,mean_step_ms\n";
        for (const auto& c : result.curves) {
            out << policy_token(c.kind) << "," << fmt_g(c.mean_step_ms) << "\n";
        }
    }
    write_regret_svg(result, (base / "regret.svg").string());
    written.push_back((base / "regret.svg").string());
    {
        auto out = open("config.resolved.toml");
        out << resolved_config_text(result.config);
        out << "\n[metadata]\n";
        std::ostringstream hash;
        hash << std::hex << result.config_hash;
        out << "config_hash = \"" << hash.str() << "\"\n";
        out << "run_seeds = [";
        for (std::size_t i = 0; i < result.run_seeds.size(); ++i) {
            out << (i ? ", " : "") << result.run_seeds[i];
        }
        out << "]\n";
        out << "effective_dims = [";
        for (std::size_t i = 0; i < result.eff_dims.size(); ++i) {
            out << (i ? ", " : "") << result.eff_dims[i];
        }
        out << "]\n";
    }
    return written;
}

}  // namespace specb
