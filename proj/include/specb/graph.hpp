#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "specb/util.hpp"

namespace specb {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

// Undirected graph with strictly positive edge weights. Edges are stored once
// per unordered pair with u < v; the weight applies to both directions.
struct WeightedGraph {
    int num_nodes = 0;
    std::vector<Edge> edges;

    void validate() const {
        if (num_nodes <= 0) throw std::invalid_argument("graph: num_nodes must be positive");
        std::set<std::pair<int, int>> seen;
        for (const Edge& e : edges) {
            if (e.u < 0 || e.u >= num_nodes || e.v < 0 || e.v >= num_nodes) {
                throw std::invalid_argument("graph: edge endpoint out of range");
            }
            if (e.u == e.v) throw std::invalid_argument("graph: self-loops are not allowed");
            if (!(e.w > 0.0)) throw std::invalid_argument("graph: edge weights must be strictly positive");
            auto key = std::minmax(e.u, e.v);
            if (!seen.insert(key).second) {
                throw std::invalid_argument("graph: duplicate edge for node pair");
            }
        }
    }

    std::vector<double> weighted_degrees() const {
        std::vector<double> deg(static_cast<std::size_t>(num_nodes), 0.0);
        for (const Edge& e : edges) {
            deg[static_cast<std::size_t>(e.u)] += e.w;
            deg[static_cast<std::size_t>(e.v)] += e.w;
        }
        return deg;
    }

    bool is_connected() const {
        if (num_nodes <= 1) return true;
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_nodes));
        for (const Edge& e : edges) {
            adj[static_cast<std::size_t>(e.u)].push_back(e.v);
            adj[static_cast<std::size_t>(e.v)].push_back(e.u);
        }
        std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
        std::queue<int> bfs;
        bfs.push(0);
        seen[0] = 1;
        int found = 1;
        while (!bfs.empty()) {
            int u = bfs.front();
            bfs.pop();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++found;
                    bfs.push(v);
                }
            }
        }
        return found == num_nodes;
    }
};

// L = D - W with D the diagonal of weighted degrees. Dense; the spectral
// basis downstream is dense anyway.
inline Eigen::MatrixXd build_laplacian(const WeightedGraph& g) {
    g.validate();
    const int n = g.num_nodes;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges) {
        l(e.u, e.v) -= e.w;
        l(e.v, e.u) -= e.w;
        l(e.u, e.u) += e.w;
        l(e.v, e.v) += e.w;
    }
    return l;
}

enum class WeightLaw { Uniform01, Unit };

// Barabasi-Albert preferential attachment. Starts from a complete graph on m
// nodes; every later node attaches to m distinct existing nodes, each drawn
// sequentially without replacement with probability proportional to the
// degree counts as they stood when the node arrived. Weights are drawn from
// weight_law in edge-creation order, so the whole graph is a deterministic
// function of (n, m, seed).
inline WeightedGraph generate_barabasi_albert(int n, int m, std::uint64_t seed,
                                              WeightLaw weight_law = WeightLaw::Uniform01) {
    if (m < 1) throw std::invalid_argument("generate_barabasi_albert: m must be >= 1");
    if (n <= m) throw std::invalid_argument("generate_barabasi_albert: need n > m");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_weight = [&]() {
        return weight_law == WeightLaw::Unit ? 1.0 : 1.0 - unit(rng);  // (0, 1]
    };

    WeightedGraph g;
    g.num_nodes = n;
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    auto add_edge = [&](int u, int v) {
        g.edges.push_back({std::min(u, v), std::max(u, v), draw_weight()});
        ++degree[static_cast<std::size_t>(u)];
        ++degree[static_cast<std::size_t>(v)];
    };

    for (int u = 0; u < m; ++u) {
        for (int v = u + 1; v < m; ++v) add_edge(u, v);
    }

    std::vector<int> pool;
    for (int node = m; node < n; ++node) {
        pool.resize(static_cast<std::size_t>(node));
        std::iota(pool.begin(), pool.end(), 0);
        // Degrees are frozen for the duration of this node's m draws.
        std::vector<double> weight(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            weight[i] = static_cast<double>(degree[static_cast<std::size_t>(pool[i])]);
        }
        std::vector<int> targets;
        for (int j = 0; j < m; ++j) {
            double total = std::accumulate(weight.begin(), weight.end(), 0.0);
            std::size_t pick = 0;
            if (total > 0.0) {
                double x = unit(rng) * total;
                double acc = 0.0;
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    acc += weight[i];
                    if (x < acc || i + 1 == pool.size()) {
                        pick = i;
                        break;
                    }
                }
            } else {
                // All-zero degrees only happen while bootstrapping m = 1.
                pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(pool.size()));
                if (pick >= pool.size()) pick = pool.size() - 1;
            }
            targets.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        for (int t : targets) add_edge(t, node);
    }
    return g;
}

enum class Similarity { Cosine, InverseEuclidean };

// k-NN similarity graph, symmetrized by union: (u,v) is an edge when v ranks
// among u's k most similar nodes or vice versa. Only strictly positive
// similarities count as neighbors. Ties rank lower node index first.
inline WeightedGraph build_knn_graph(const Eigen::MatrixXd& features, int k, Similarity similarity) {
    const Eigen::Index n = features.rows();
    if (k < 1) throw std::invalid_argument("build_knn_graph: k must be >= 1");
    if (k >= n) throw std::invalid_argument("build_knn_graph: k must be < number of nodes");

    Eigen::MatrixXd sim(n, n);
    if (similarity == Similarity::Cosine) {
        Eigen::VectorXd norms = features.rowwise().norm();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (norms(i) <= 0.0) {
                throw std::invalid_argument("build_knn_graph: zero-norm row under cosine similarity");
            }
        }
        sim = (features * features.transpose()).array() /
              (norms * norms.transpose()).array();
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                sim(i, j) = 1.0 / (1.0 + (features.row(i) - features.row(j)).norm());
            }
        }
    }

    std::set<std::pair<int, int>> chosen;
    std::vector<int> order;
    for (Eigen::Index u = 0; u < n; ++u) {
        order.resize(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        order.erase(order.begin() + u);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return sim(u, a) > sim(u, b); });
        int taken = 0;
        double kth_sim = 0.0;
        for (int v : order) {
            if (!(sim(u, v) > 0.0)) break;  // sorted, so the rest are nonpositive too
            if (taken < k) {
                kth_sim = sim(u, v);
            } else if (sim(u, v) != kth_sim) {
                break;  // candidates tied with the k-th stay in
            }
            chosen.insert(std::minmax(static_cast<int>(u), v));
            ++taken;
        }
    }
    if (chosen.empty()) {
        throw std::runtime_error("build_knn_graph: degenerate similarity, no positive-similarity pairs");
    }

    WeightedGraph g;
    g.num_nodes = static_cast<int>(n);
    for (const auto& [u, v] : chosen) {
        g.edges.push_back({u, v, sim(u, v)});
    }
    return g;
}

// Edge-list text format: header line "N <num_nodes>", then one "u v w" triple
// per line with 0-indexed nodes.
inline void write_edge_list(const WeightedGraph& g, std::ostream& os) {
    os << "N " << g.num_nodes << "\n";
    for (const Edge& e : g.edges) {
        os << e.u << " " << e.v << " " << fmt_g17(e.w) << "\n";
    }
}

inline void write_edge_list(const WeightedGraph& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_edge_list: cannot open " + path);
    write_edge_list(g, os);
}

inline WeightedGraph read_edge_list(std::istream& is) {
    WeightedGraph g;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string tag;
            if (!(ls >> tag >> g.num_nodes) || tag != "N") {
                throw std::runtime_error("read_edge_list: expected header 'N <num_nodes>' at line " +
                                         std::to_string(line_no));
            }
            have_header = true;
            continue;
        }
        Edge e;
        if (!(ls >> e.u >> e.v >> e.w)) {
            throw std::runtime_error("read_edge_list: malformed edge at line " + std::to_string(line_no));
        }
        g.edges.push_back(e);
    }
    if (!have_header) throw std::runtime_error("read_edge_list: empty input");
    g.validate();
    return g;
}

inline WeightedGraph read_edge_list(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_edge_list: cannot open " + path);
    return read_edge_list(is);
}

}  // namespace specb
