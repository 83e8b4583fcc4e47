#include <catch2/catch_amalgamated.hpp>

#include <specb/specb.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace specb;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "specb_harness_tests";
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int count_occurrences(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
    return n;
}

ExperimentConfig small_ba_config() {
    ExperimentConfig cfg;
    cfg.source.kind = GraphSourceKind::BarabasiAlbert;
    cfg.source.ba_n = 16;
    cfg.source.ba_m = 2;
    cfg.policies = {PolicyKind::SpectralUCB, PolicyKind::SpectralTS};
    cfg.horizon = 12;
    cfg.num_runs = 3;
    cfg.base_seed = 5;
    cfg.smooth_k = 3;
    return cfg;
}

const PolicyCurve& curve_of(const AggregateResult& res, PolicyKind kind) {
    for (const auto& c : res.curves) {
        if (c.kind == kind) return c;
    }
    FAIL("policy curve missing");
    return res.curves.front();
}

std::string planted_ratings_csv(const std::string& name) {
    std::mt19937_64 rng(64);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int items = 30, users = 8;
    Eigen::MatrixXd item_f(items, 2), user_f(users, 2);
    for (int j = 0; j < items; ++j) {
        item_f(j, 0) = gauss(rng);
        item_f(j, 1) = gauss(rng);
    }
    for (int i = 0; i < users; ++i) {
        user_f(i, 0) = gauss(rng);
        user_f(i, 1) = gauss(rng);
    }
    std::bernoulli_distribution keep(0.7);
    fs::path p = scratch_dir() / name;
    std::ofstream out(p);
    out << "user,item,rating\n";
    for (int i = 0; i < users; ++i) {
        for (int j = 0; j < items; ++j) {
            if (keep(rng) || j == i) {  // j == i keeps every user and early items warm
                out << i << "," << j << "," << item_f.row(j).dot(user_f.row(i)) << "\n";
            }
        }
    }
    return p.string();
}

}  // namespace

TEST_CASE("theorem 1 bound arithmetic", "[harness][bounds]") {
    // R=0, C=0, d=1, lambda=1, delta=0.5, T=1 -> 4 sqrt(ln 2)
    REQUIRE(theorem1_bound(1, 1.0, 0.0, 0.0, 0.5, 1) ==
            Catch::Approx(3.3302184446307908).epsilon(1e-14));
    REQUIRE(theorem1_bound(1, 1.0, 0.0, 0.0, 0.5, 1) == Catch::Approx(4.0 * std::sqrt(std::log(2.0))));
    // bound grows with the horizon and with C
    REQUIRE(theorem1_bound(3, 1.0, 1.0, 0.01, 0.05, 200) >
            theorem1_bound(3, 1.0, 1.0, 0.01, 0.05, 100));
    REQUIRE(theorem1_bound(3, 1.0, 2.0, 0.01, 0.05, 100) >
            theorem1_bound(3, 1.0, 1.0, 0.01, 0.05, 100));
}

TEST_CASE("theorem 2 bound matches an independent evaluation", "[harness][bounds]") {
    const double p = 1.0 / (4.0 * std::numbers::e * std::sqrt(std::numbers::pi));
    REQUIRE(p == Catch::Approx(0.05188843717757435).epsilon(1e-15));

    const int d = 4, n = 100, horizon = 150;
    const double lambda = 1.0, c = 1.5, r = 0.01, delta = 0.05;
    const double t = horizon;
    const double g = std::sqrt(4.0 * std::log(t * n)) *
                         (r * std::sqrt(6.0 * d * std::log((lambda + t) / (delta * lambda))) + c) +
                     r * std::sqrt(2.0 * d * std::log((lambda + t) * t * t / (delta * lambda))) + c;
    const double expect =
        (11.0 * g / p) * std::sqrt((4.0 + 4.0 * lambda) / lambda * d * t * std::log((lambda + t) / lambda)) +
        1.0 / t + (g / p) * (11.0 / std::sqrt(lambda) + 2.0) * std::sqrt(2.0 * t * std::log(2.0 / delta));
    REQUIRE(theorem2_bound(d, n, lambda, c, r, delta, horizon) == Catch::Approx(expect).epsilon(1e-14));
}

TEST_CASE("check_regret_bound dispatches by policy family", "[harness][bounds]") {
    Eigen::VectorXd payoffs(3);
    payoffs << 0.5, 0.2, -0.1;
    BanditInstance inst(payoffs, 0.0, 1);
    RegretTrace trace(4);
    for (int t = 0; t < 4; ++t) trace.record(inst, inst.best_arm(), 0.0);

    BoundCheck ucb = check_regret_bound(trace, PolicyKind::SpectralUCB, 2, 3, 1.0, 1.0, 0.01, 0.05);
    BoundCheck ts = check_regret_bound(trace, PolicyKind::SpectralTS, 2, 3, 1.0, 1.0, 0.01, 0.05);
    REQUIRE(ucb.satisfied);  // zero regret sits under any positive bound
    REQUIRE(ts.satisfied);
    REQUIRE(ucb.bound_value == Catch::Approx(theorem1_bound(2, 1.0, 1.0, 0.01, 0.05, 4)));
    REQUIRE(ts.bound_value == Catch::Approx(theorem2_bound(2, 3, 1.0, 1.0, 0.01, 0.05, 4)));
    REQUIRE(ts.bound_value > ucb.bound_value);

    RegretTrace partial(4);
    partial.record(inst, 0, 0.0);
    REQUIRE_THROWS_AS(check_regret_bound(partial, PolicyKind::SpectralUCB, 2, 3, 1.0, 1.0, 0.01, 0.05),
                      std::invalid_argument);
}

TEST_CASE("single-step experiment regret equals the chosen arm's gap", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    cfg.policies = {PolicyKind::SpectralUCB};
    cfg.horizon = 1;
    cfg.num_runs = 1;
    AggregateResult res = run_experiment(cfg);
    REQUIRE(res.run_seeds == std::vector<std::uint64_t>{5});

    // replay the run by hand from the same seed chain
    const std::uint64_t run_seed = 5;
    WeightedGraph g = generate_barabasi_albert(16, 2, mix_seed(run_seed, fnv1a64("graph")));
    SpectralBasis basis = eigendecompose(build_laplacian(g), 1.0);
    Eigen::VectorXd alpha = make_smooth_alpha(basis, 3, mix_seed(run_seed, fnv1a64("alpha")));
    BanditInstance inst(basis, alpha, cfg.noise_level, mix_seed(run_seed, fnv1a64("noise")));

    PolicyConfig pc;
    pc.kind = PolicyKind::SpectralUCB;
    pc.delta = cfg.delta;
    pc.noise_bound = cfg.noise_level;
    pc.norm_bound = inst.alpha_norm_lambda();
    pc.lambda_reg = cfg.lambda_reg;
    pc.horizon = 1;
    Policy policy(pc, basis);
    const int arm = policy.select();
    const double gap = inst.best_value() - inst.mean_payoff(arm);

    REQUIRE(res.curves.size() == 1);
    REQUIRE(res.curves[0].mean_cum.size() == 1);
    REQUIRE(res.curves[0].mean_cum[0] == gap);
    REQUIRE(res.c_norms[0] == inst.alpha_norm_lambda());
    REQUIRE(res.eff_dims[0] == effective_dimension(basis, 1));
}

TEST_CASE("duplicate policy entries produce identical curves", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    cfg.policies = {PolicyKind::SpectralTS, PolicyKind::SpectralTS};
    AggregateResult res = run_experiment(cfg);
    REQUIRE(res.curves[0].mean_cum == res.curves[1].mean_cum);
    for (int run = 0; run < cfg.num_runs; ++run) {
        REQUIRE(res.curves[0].traces[static_cast<std::size_t>(run)].cumulative_regret() ==
                res.curves[1].traces[static_cast<std::size_t>(run)].cumulative_regret());
    }
}

TEST_CASE("policy curves are invariant to which other policies run", "[harness]") {
    ExperimentConfig alone = small_ba_config();
    alone.policies = {PolicyKind::SpectralUCB};
    ExperimentConfig both = small_ba_config();
    both.policies = {PolicyKind::SpectralUCB, PolicyKind::SpectralTS};

    AggregateResult res_alone = run_experiment(alone);
    AggregateResult res_both = run_experiment(both);
    REQUIRE(curve_of(res_alone, PolicyKind::SpectralUCB).mean_cum ==
            curve_of(res_both, PolicyKind::SpectralUCB).mean_cum);
}

TEST_CASE("aggregate means recompute from stored traces", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    AggregateResult res = run_experiment(cfg);
    for (const auto& c : res.curves) {
        REQUIRE(static_cast<int>(c.traces.size()) == cfg.num_runs);
        for (int t = 0; t < cfg.horizon; ++t) {
            double mean = 0.0;
            for (const auto& tr : c.traces) mean += tr.cumulative_regret()[static_cast<std::size_t>(t)];
            mean /= cfg.num_runs;
            REQUIRE(std::abs(mean - c.mean_cum[static_cast<std::size_t>(t)]) < 1e-12);
            double var = 0.0;
            for (const auto& tr : c.traces) {
                const double d = tr.cumulative_regret()[static_cast<std::size_t>(t)] - mean;
                var += d * d;
            }
            const double se = std::sqrt(var / (cfg.num_runs - 1.0) / cfg.num_runs);
            REQUIRE(std::abs(se - c.stderr_cum[static_cast<std::size_t>(t)]) < 1e-12);
        }
    }
}

TEST_CASE("experiments are deterministic end to end", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    AggregateResult a = run_experiment(cfg);
    AggregateResult b = run_experiment(cfg);
    REQUIRE(a.config_hash == b.config_hash);
    for (std::size_t i = 0; i < a.curves.size(); ++i) {
        REQUIRE(a.curves[i].mean_cum == b.curves[i].mean_cum);
        REQUIRE(a.curves[i].stderr_cum == b.curves[i].stderr_cum);
    }

    fs::path dir_a = scratch_dir() / "emit_a";
    fs::path dir_b = scratch_dir() / "emit_b";
    emit_outputs(a, dir_a.string());
    emit_outputs(b, dir_b.string());
    REQUIRE(slurp((dir_a / "regret_mean.csv").string()) == slurp((dir_b / "regret_mean.csv").string()));
    REQUIRE(slurp((dir_a / "regret.svg").string()) == slurp((dir_b / "regret.svg").string()));
    REQUIRE(slurp((dir_a / "config.resolved.toml").string()) ==
            slurp((dir_b / "config.resolved.toml").string()));
}

TEST_CASE("emitted files have the promised shapes", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    cfg.policies = {PolicyKind::SpectralUCB, PolicyKind::SpectralTS, PolicyKind::LinUCB};
    AggregateResult res = run_experiment(cfg);
    fs::path dir = scratch_dir() / "emit_shape";
    std::vector<std::string> written = emit_outputs(res, dir.string());
    REQUIRE(written.size() == 5);

    const std::string mean_csv = slurp((dir / "regret_mean.csv").string());
    REQUIRE(count_occurrences(mean_csv, "\n") == cfg.horizon + 1);
    REQUIRE(mean_csv.rfind("t,sucb_mean,sucb_se,sts_mean,sts_se,lucb_mean,lucb_se\n", 0) == 0);

    const std::string svg = slurp((dir / "regret.svg").string());
    REQUIRE(count_occurrences(svg, "<polyline") == 3);
    REQUIRE(count_occurrences(svg, "fill-opacity") == 3);
    REQUIRE(count_occurrences(svg, "SpectralUCB") == 1);

    const std::string runs_csv = slurp((dir / "regret_runs.csv").string());
    REQUIRE(runs_csv.rfind("policy,run,t,inst_regret,cum_regret,step_ms\n", 0) == 0);
    REQUIRE(count_occurrences(runs_csv, "\n") == 3 * cfg.num_runs * cfg.horizon + 1);

    const std::string timings = slurp((dir / "timings.csv").string());
    REQUIRE(timings.rfind("policy,mean_step_ms\n", 0) == 0);
    REQUIRE(count_occurrences(timings, "\n") == 4);

    const std::string toml = slurp((dir / "config.resolved.toml").string());
    REQUIRE(count_occurrences(toml, "[policy.sucb]") == 1);
    REQUIRE(count_occurrences(toml, "[policy.sts]") == 1);
    REQUIRE(count_occurrences(toml, "c_norm = \"exact\"") == 1);
    REQUIRE(count_occurrences(toml, "config_hash") == 1);
}

TEST_CASE("config hash tracks parameter changes", "[harness]") {
    ExperimentConfig base = small_ba_config();
    const std::uint64_t h0 = fnv1a64(resolved_config_text(base));

    ExperimentConfig changed = base;
    changed.delta = 0.05;
    REQUIRE(fnv1a64(resolved_config_text(changed)) != h0);

    changed = base;
    changed.policies = {PolicyKind::SpectralUCB};
    REQUIRE(fnv1a64(resolved_config_text(changed)) != h0);

    changed = base;
    changed.c_norm_override = 1.0;
    REQUIRE(fnv1a64(resolved_config_text(changed)) != h0);

    REQUIRE(fnv1a64(resolved_config_text(base)) == h0);
}

TEST_CASE("c_norm override reaches the policies", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    cfg.c_norm_override = 0.25;
    AggregateResult res = run_experiment(cfg);
    for (double c : res.c_norms) REQUIRE(c == 0.25);
    REQUIRE(count_occurrences(resolved_config_text(cfg), "c_norm = 0.25") == 1);
}

TEST_CASE("edge-list sources fix the graph across runs", "[harness]") {
    WeightedGraph g = generate_barabasi_albert(14, 2, 99);
    fs::path p = scratch_dir() / "fixed_graph.txt";
    write_edge_list(g, p.string());

    ExperimentConfig cfg;
    cfg.source.kind = GraphSourceKind::EdgeList;
    cfg.source.edge_list_path = p.string();
    cfg.policies = {PolicyKind::SpectralUCB};
    cfg.horizon = 8;
    cfg.num_runs = 2;
    cfg.base_seed = 3;
    AggregateResult res = run_experiment(cfg);
    REQUIRE(res.run_seeds == std::vector<std::uint64_t>{3, 4});
    // same graph both runs -> same effective dimension; alpha redrawn per run
    REQUIRE(res.eff_dims[0] == res.eff_dims[1]);
    REQUIRE(res.c_norms[0] != res.c_norms[1]);
}

TEST_CASE("run errors carry the run index", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    cfg.smooth_k = 50;  // larger than the 16-node graph
    REQUIRE_THROWS_WITH(run_experiment(cfg), Catch::Matchers::StartsWith("run 0:"));
}

TEST_CASE("config validation", "[harness]") {
    ExperimentConfig cfg = small_ba_config();
    cfg.policies.clear();
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_ba_config();
    cfg.horizon = 0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_ba_config();
    cfg.num_runs = 0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_ba_config();
    cfg.delta = 1.5;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("timing study shapes and validation", "[harness][timing]") {
    std::vector<TimingRow> rows = time_complexity_study({16, 24}, 3, 7);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].n == 16);
    REQUIRE(rows[1].n == 24);
    for (const auto& r : rows) {
        REQUIRE(r.ucb_ms > 0.0);
        REQUIRE(r.ts_ms > 0.0);
        REQUIRE(r.ratio == Catch::Approx(r.ucb_ms / r.ts_ms));
    }
    REQUIRE_THROWS_AS(time_complexity_study({24, 16}, 3, 7), std::invalid_argument);
    REQUIRE_THROWS_AS(time_complexity_study({}, 3, 7), std::invalid_argument);
    REQUIRE_THROWS_AS(time_complexity_study({16}, 0, 7), std::invalid_argument);

    fs::path p = scratch_dir() / "timing.csv";
    write_timing_csv(rows, p.string());
    REQUIRE(slurp(p.string()).rfind("n,ucb_ms,ts_ms,ratio\n", 0) == 0);
}

TEST_CASE("ratings-mode experiments run and cache their completion", "[harness][ratings]") {
    const std::string csv = planted_ratings_csv("bench_ratings.csv");
    fs::path cache = scratch_dir() / "cache";
    fs::create_directories(cache);

    ExperimentConfig cfg;
    cfg.source.kind = GraphSourceKind::KnnFromRatings;
    cfg.source.ratings_path = csv;
    cfg.source.completion_rank = 2;
    cfg.source.completion_mu = 0.1;
    cfg.source.completion_iters = 15;
    cfg.source.knn_k = 5;
    cfg.source.cache_dir = cache.string();
    cfg.policies = {PolicyKind::SpectralUCB, PolicyKind::SpectralTS};
    cfg.horizon = 10;
    cfg.num_runs = 2;
    cfg.base_seed = 11;

    RatingsPipeline pipeline;
    AggregateResult first = run_experiment(cfg, &pipeline);
    REQUIRE(pipeline.table.num_items == 30);
    REQUIRE(pipeline.completed.values.rows() == 30);
    REQUIRE(pipeline.graph.num_nodes == 30);
    // default C in ratings mode is 1
    for (double c : first.c_norms) REQUIRE(c == 1.0);

    // a cache file appeared, and a second run reproduces the result through it
    bool cache_file = false;
    for (const auto& entry : fs::directory_iterator(cache)) {
        if (entry.path().extension() == ".bin") cache_file = true;
    }
    REQUIRE(cache_file);

    AggregateResult second = run_experiment(cfg);
    for (std::size_t i = 0; i < first.curves.size(); ++i) {
        REQUIRE(first.curves[i].mean_cum == second.curves[i].mean_cum);
    }
    REQUIRE(count_occurrences(resolved_config_text(cfg), "graph_source = \"knn-from-ratings\"") == 1);
}
