// specbandit: spectral bandit experiment harness.
//
// Subcommands:
//   graph gen-ba    generate a Barabasi-Albert graph (edge-list format)
//   graph knn       build a k-NN similarity graph from a feature CSV
//   spectrum        Laplacian eigenvalues of an edge-list graph
//   effdim          effective-dimension curve d(T) for an edge-list graph
//   bench synthetic BA (or fixed-graph) regret benchmark, all four policies
//   bench ratings   ratings pipeline benchmark (ALS completion +k-NN graph)
//   bench timing    per-step cost study, SpectralUCB vs SpectralTS

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specb/specb.hpp"

namespace {

std::vector<specb::PolicyKind> parse_policy_list(const std::string& csv) {
    std::vector<specb::PolicyKind> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(specb::parse_policy(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty policy list");
    return out;
}

std::ofstream open_or_die(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

void print_bench_summary(const specb::AggregateResult& result, const std::vector<std::string>& files) {
    std::cout << "runs: " << result.config.num_runs << "  horizon: " << result.config.horizon << "\n";
    std::cout << "effective dims per run:";
    for (int d : result.eff_dims) std::cout << " " << d;
    std::cout << "\n";
    for (const auto& c : result.curves) {
        std::cout << specb::policy_name(c.kind) << ": final mean cumulative regret = "
                  << specb::fmt_g(c.mean_cum.back()) << "  (mean step "
                  << specb::fmt_g(c.mean_step_ms) << " ms)\n";
    }
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral bandits benchmark harness"};
    app.require_subcommand(1);

    // ---- graph ----
    auto* graph = app.add_subcommand("graph", "graph generation utilities");
    graph->require_subcommand(1);

    auto* gen_ba = graph->add_subcommand("gen-ba", "Barabasi-Albert preferential attachment graph");
    int ba_n = 250, ba_m = 3;
    std::uint64_t ba_seed = 1;
    bool unit_weights = false;
    std::string ba_out;
    gen_ba->add_option("--n", ba_n, "number of nodes")->capture_default_str();
    gen_ba->add_option("--m", ba_m, "edges per arriving node")->capture_default_str();
    gen_ba->add_option("--seed", ba_seed, "rng seed")->capture_default_str();
    gen_ba->add_flag("--unit-weights", unit_weights, "unit edge weights instead of uniform(0,1]");
    gen_ba->add_option("--out", ba_out, "output edge-list file (default stdout)");
    gen_ba->callback([&] {
        const auto g = specb::generate_barabasi_albert(
            ba_n, ba_m, ba_seed, unit_weights ? specb::WeightLaw::Unit : specb::WeightLaw::Uniform01);
        if (ba_out.empty()) {
            specb::write_edge_list(g, std::cout);
        } else {
            specb::write_edge_list(g, ba_out);
            std::cout << "wrote " << ba_out << " (" << g.num_nodes << " nodes, " << g.edges.size()
                      << " edges)\n";
        }
    });

    auto* knn = graph->add_subcommand("knn", "k-NN similarity graph from a feature CSV");
    std::string knn_features, knn_metric = "cosine", knn_out;
    int knn_k = 10;
    knn->add_option("--features", knn_features, "feature CSV (id column + feature columns)")->required();
    knn->add_option("--k", knn_k, "neighbors per node")->capture_default_str();
    knn->add_option("--metric", knn_metric, "similarity metric")
        ->check(CLI::IsMember({"cosine", "inverse-euclidean"}))
        ->capture_default_str();
    knn->add_option("--out", knn_out, "output edge-list file (default stdout)");
    knn->callback([&] {
        const Eigen::MatrixXd features = specb::read_features_csv(knn_features);
        const auto sim = knn_metric == "cosine" ? specb::Similarity::Cosine
                                                : specb::Similarity::InverseEuclidean;
        const auto g = specb::build_knn_graph(features, knn_k, sim);
        if (knn_out.empty()) {
            specb::write_edge_list(g, std::cout);
        } else {
            specb::write_edge_list(g, knn_out);
            std::cout << "wrote " << knn_out << " (" << g.num_nodes << " nodes, " << g.edges.size()
                      << " edges)\n";
        }
    });

    // ---- spectrum ----
    auto* spectrum = app.add_subcommand("spectrum", "Laplacian eigenvalues of an edge-list graph");
    std::string spec_graph, spec_out;
    spectrum->add_option("--graph", spec_graph, "edge-list file")->required();
    spectrum->add_option("--out", spec_out, "output CSV (default stdout)");
    spectrum->callback([&] {
        const auto g = specb::read_edge_list(spec_graph);
        const auto eig = specb::jacobi_eigensolve(specb::build_laplacian(g));
        std::ostringstream csv;
        csv << "k,eigenvalue\n";
        for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
            csv << (i + 1) << "," << specb::fmt_g(eig.eigenvalues(i)) << "\n";
        }
        if (spec_out.empty()) {
            std::cout << csv.str();
        } else {
            open_or_die(spec_out) << csv.str();
            std::cout << "wrote " << spec_out << "\n";
        }
    });

    // ---- effdim ----
    auto* effdim = app.add_subcommand("effdim", "effective dimension d(T) curve for an edge-list graph");
    std::string ed_graph, ed_out;
    double ed_lambda = 1.0;
    int ed_tmax = 500;
    effdim->add_option("--graph", ed_graph, "edge-list file")->required();
    effdim->add_option("--lambda", ed_lambda, "regularizer lambda")->capture_default_str();
    effdim->add_option("--tmax", ed_tmax, "largest horizon T")->capture_default_str();
    effdim->add_option("--out", ed_out, "output CSV (default stdout)");
    effdim->callback([&] {
        if (ed_tmax < 1) throw CLI::ValidationError("--tmax", "must be >= 1");
        const auto g = specb::read_edge_list(ed_graph);
        const auto basis = specb::eigendecompose(specb::build_laplacian(g), ed_lambda);
        std::ostringstream csv;
        csv << "t,d\n";
        for (int t = 1; t <= ed_tmax; ++t) {
            csv << t << "," << specb::effective_dimension(basis, t) << "\n";
        }
        if (ed_out.empty()) {
            std::cout << csv.str();
        } else {
            open_or_die(ed_out) << csv.str();
            std::cout << "wrote " << ed_out << "\n";
        }
    });

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "regret and timing benchmarks");
    bench->require_subcommand(1);

    auto* synth = bench->add_subcommand("synthetic", "synthetic smooth-function benchmark");
    specb::ExperimentConfig sc;
    std::string synth_policies = "sucb,sts,lucb,lts";
    std::string synth_graph;
    double synth_c = -1.0;
    synth->add_option("--n", sc.source.ba_n, "BA graph size")->capture_default_str();
    synth->add_option("--m", sc.source.ba_m, "BA attachment degree")->capture_default_str();
    synth->add_option("--k", sc.smooth_k, "alpha* support size (smoothest eigenvectors)")
        ->capture_default_str();
    synth->add_option("--t", sc.horizon, "horizon T")->capture_default_str();
    synth->add_option("--runs", sc.num_runs, "number of paired runs")->capture_default_str();
    synth->add_option("--delta", sc.delta, "confidence parameter")->capture_default_str();
    synth->add_option("--lambda", sc.lambda_reg, "regularizer lambda")->capture_default_str();
    synth->add_option("--noise", sc.noise_level, "noise level R")->capture_default_str();
    synth->add_option("--policies", synth_policies, "comma list of sucb,sts,lucb,lts")
        ->capture_default_str();
    synth->add_option("--seed", sc.base_seed, "base seed (run i uses base_seed + i)")
        ->capture_default_str();
    synth->add_option("--c-norm", synth_c, "override C (default: exact ||alpha*||_Lambda per run)");
    synth->add_option("--graph", synth_graph, "fixed edge-list graph instead of per-run BA");
    synth->add_option("--out", sc.output_dir, "output directory")->required();
    synth->callback([&] {
        sc.policies = parse_policy_list(synth_policies);
        if (synth_c >= 0.0) sc.c_norm_override = synth_c;
        if (!synth_graph.empty()) {
            sc.source.kind = specb::GraphSourceKind::EdgeList;
            sc.source.edge_list_path = synth_graph;
        }
        const auto result = specb::run_experiment(sc);
        print_bench_summary(result, specb::emit_outputs(result, sc.output_dir));
    });

    auto* ratings = bench->add_subcommand("ratings", "ratings-pipeline benchmark (ALS + k-NN graph)");
    specb::ExperimentConfig rc;
    rc.source.kind = specb::GraphSourceKind::KnnFromRatings;
    std::string ratings_policies = "sucb,sts,lucb,lts";
    double ratings_c = 1.0;
    bool no_cache = false;
    ratings->add_option("--file", rc.source.ratings_path, "ratings CSV (user,item,rating)")->required();
    ratings->add_option("--rank", rc.source.completion_rank, "completion rank")->capture_default_str();
    ratings->add_option("--mu", rc.source.completion_mu, "completion regularizer")->capture_default_str();
    ratings->add_option("--iters", rc.source.completion_iters, "ALS iterations")->capture_default_str();
    ratings->add_option("--knn", rc.source.knn_k, "neighbors in the similarity graph")
        ->capture_default_str();
    ratings->add_option("--t", rc.horizon, "horizon T")->capture_default_str();
    ratings->add_option("--runs", rc.num_runs, "number of runs (one sampled user each)")
        ->capture_default_str();
    ratings->add_option("--delta", rc.delta, "confidence parameter")->capture_default_str();
    ratings->add_option("--lambda", rc.lambda_reg, "regularizer lambda")->capture_default_str();
    ratings->add_option("--noise", rc.noise_level, "noise level R")->capture_default_str();
    ratings->add_option("--policies", ratings_policies, "comma list of sucb,sts,lucb,lts")
        ->capture_default_str();
    ratings->add_option("--seed", rc.base_seed, "base seed")->capture_default_str();
    ratings->add_option("--c-norm", ratings_c, "norm budget C (alpha* unknown here)")
        ->capture_default_str();
    ratings->add_flag("--no-cache", no_cache, "skip the completed-matrix binary cache");
    ratings->add_option("--out", rc.output_dir, "output directory")->required();
    ratings->callback([&] {
        rc.policies = parse_policy_list(ratings_policies);
        rc.c_norm_override = ratings_c;
        rc.source.cache_dir = no_cache ? std::string() : rc.output_dir;
        specb::RatingsPipeline pipeline;
        const auto result = specb::run_experiment(rc, &pipeline);
        auto files = specb::emit_outputs(result, rc.output_dir);
        if (!pipeline.completed.cold_users.empty() || !pipeline.completed.cold_items.empty()) {
            std::cerr << "warning: " << pipeline.completed.cold_users.size() << " cold users, "
                      << pipeline.completed.cold_items.size() << " cold items kept random factors\n";
        }
        const auto feat = (std::filesystem::path(rc.output_dir) / "item_features.csv").string();
        specb::write_item_features_csv(feat, pipeline.table, pipeline.completed);
        files.push_back(feat);
        print_bench_summary(result, files);
    });

    auto* timing = bench->add_subcommand("timing", "per-step time, SpectralUCB vs SpectralTS");
    std::string sizes_csv = "128,256,512";
    int timing_steps = 25;
    std::uint64_t timing_seed = 1;
    std::string timing_out;
    timing->add_option("--sizes", sizes_csv, "comma list of graph sizes, ascending")
        ->capture_default_str();
    timing->add_option("--steps", timing_steps, "bandit steps per size")->capture_default_str();
    timing->add_option("--seed", timing_seed, "rng seed")->capture_default_str();
    timing->add_option("--out", timing_out, "output directory for timings.csv (default stdout only)");
    timing->callback([&] {
        std::vector<int> sizes;
        std::stringstream ss(sizes_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) sizes.push_back(std::stoi(tok));
        }
        const auto rows = specb::time_complexity_study(sizes, timing_steps, timing_seed);
        std::cout << "n,ucb_ms,ts_ms,ratio\n";
        for (const auto& r : rows) {
            std::cout << r.n << "," << specb::fmt_g(r.ucb_ms) << "," << specb::fmt_g(r.ts_ms) << ","
                      << specb::fmt_g(r.ratio) << "\n";
        }
        if (!timing_out.empty()) {
            std::filesystem::create_directories(timing_out);
            const auto path = (std::filesystem::path(timing_out) / "timings.csv").string();
            specb::write_timing_csv(rows, path);
            std::cout << "wrote " << path << "\n";
        }
    });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
