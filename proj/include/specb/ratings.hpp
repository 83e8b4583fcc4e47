#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "specb/util.hpp"

namespace specb {

struct RatingEntry {
    int user = 0;
    int item = 0;
    double rating = 0.0;
};

// Ratings are 0-indexed internally; user_ids / item_ids map the internal
// index back to the id that appeared in the file (first-appearance order).
struct RatingsTable {
    int num_users = 0;
    int num_items = 0;
    std::vector<RatingEntry> entries;
    std::vector<long long> user_ids;
    std::vector<long long> item_ids;

    void validate() const {
        if (num_users < 1 || num_items < 1) throw std::invalid_argument("RatingsTable: empty dimensions");
        std::set<std::pair<int, int>> seen;
        for (const auto& e : entries) {
            if (e.user < 0 || e.user >= num_users || e.item < 0 || e.item >= num_items) {
                throw std::invalid_argument("RatingsTable: entry index out of range");
            }
            if (!seen.insert({e.user, e.item}).second) {
                throw std::invalid_argument("RatingsTable: duplicate (user, item) pair");
            }
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool parse_ll(const std::string& s, long long& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto rc = std::from_chars(b, e, out);
    return rc.ec == std::errc() && rc.ptr == e;
}

inline bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace detail

// CSV `user,item,rating` with that exact header. Ids may be arbitrary
// non-negative integers; they are remapped densely in order of first
// appearance.
inline RatingsTable load_ratings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_ratings: cannot open '" + path + "'");
    auto fail = [&](int line, const std::string& what) {
        throw std::runtime_error("load_ratings: " + path + ": line " + std::to_string(line) + ": " + what);
    };

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error("load_ratings: " + path + ": empty file");
    ++line_no;
    if (detail::trim(line) != "user,item,rating") fail(line_no, "expected header 'user,item,rating'");

    RatingsTable table;
    std::map<long long, int> user_map, item_map;
    std::set<std::pair<long long, long long>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = detail::trim(line);
        if (row.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(row);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(detail::trim(tok));
        long long u = 0, v = 0;
        double r = 0.0;
        if (fields.size() != 3 || !detail::parse_ll(fields[0], u) || !detail::parse_ll(fields[1], v) ||
            !detail::parse_real(fields[2], r)) {
            fail(line_no, "malformed row '" + row + "'");
        }
        if (u < 0 || v < 0) fail(line_no, "negative id");
        if (!seen.insert({u, v}).second) {
            fail(line_no, "duplicate pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
        }
        auto [uit, unew] = user_map.try_emplace(u, static_cast<int>(table.user_ids.size()));
        if (unew) table.user_ids.push_back(u);
        auto [iit, inew] = item_map.try_emplace(v, static_cast<int>(table.item_ids.size()));
        if (inew) table.item_ids.push_back(v);
        table.entries.push_back({uit->second, iit->second, r});
    }
    if (table.entries.empty()) throw std::runtime_error("load_ratings: " + path + ": no ratings");
    table.num_users = static_cast<int>(table.user_ids.size());
    table.num_items = static_cast<int>(table.item_ids.size());
    return table;
}

struct CompletedMatrix {
    Eigen::MatrixXd values;        // num_items x num_users reconstruction
    Eigen::MatrixXd item_factors;  // num_items x rank, the k-NN features
    Eigen::MatrixXd user_factors;  // num_users x rank
    int rank = 0;
    std::vector<double> objective_trace;  // initial value + one per iteration
    std::vector<int> cold_users;          // kept their seeded random factor
    std::vector<int> cold_items;
};

// Alternating least squares on the observed entries:
//   min sum_obs (rating - u_i^T m_j)^2 + mu (sum ||u_i||^2 + sum ||m_j||^2)
// Each pass solves the exact ridge subproblem per row, so the objective
// never increases. Users or items with no observations keep their seeded
// initialization and are reported in the cold lists.
inline CompletedMatrix complete_low_rank(const RatingsTable& table, int rank, double mu, int iters,
                                         std::uint64_t seed) {
    table.validate();
    if (rank < 1 || rank > std::min(table.num_users, table.num_items)) {
        throw std::invalid_argument("complete_low_rank: rank must be in [1, min(num_users, num_items)]");
    }
    if (mu < 0.0) throw std::invalid_argument("complete_low_rank: reg must be >= 0");
    if (iters < 1) throw std::invalid_argument("complete_low_rank: iters must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double init_scale = 1.0 / std::sqrt(static_cast<double>(rank));
    Eigen::MatrixXd user_f(table.num_users, rank), item_f(table.num_items, rank);
    for (int i = 0; i < table.num_users; ++i)
        for (int k = 0; k < rank; ++k) user_f(i, k) = init_scale * gauss(rng);
    for (int j = 0; j < table.num_items; ++j)
        for (int k = 0; k < rank; ++k) item_f(j, k) = init_scale * gauss(rng);

    std::vector<std::vector<std::pair<int, double>>> by_user(table.num_users), by_item(table.num_items);
    for (const auto& e : table.entries) {
        by_user[e.user].push_back({e.item, e.rating});
        by_item[e.item].push_back({e.user, e.rating});
    }

    auto objective = [&]() {
        double sq = 0.0;
        for (const auto& e : table.entries) {
            const double err = e.rating - user_f.row(e.user).dot(item_f.row(e.item));
            sq += err * err;
        }
        return sq + mu * (user_f.squaredNorm() + item_f.squaredNorm());
    };
    auto solve_side = [&](Eigen::MatrixXd& out, const Eigen::MatrixXd& fixed,
                          const std::vector<std::vector<std::pair<int, double>>>& obs) {
        Eigen::MatrixXd gram(rank, rank);
        Eigen::VectorXd rhs(rank);
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (obs[i].empty()) continue;
            gram.setZero();
            rhs.setZero();
            for (const auto& [j, r] : obs[i]) {
                gram.noalias() += fixed.row(j).transpose() * fixed.row(j);
                rhs.noalias() += r * fixed.row(j).transpose();
            }
            gram.diagonal().array() += mu;
            out.row(static_cast<int>(i)) = gram.ldlt().solve(rhs).transpose();
        }
    };

    CompletedMatrix cm;
    cm.rank = rank;
    cm.objective_trace.push_back(objective());
    for (int it = 0; it < iters; ++it) {
        solve_side(user_f, item_f, by_user);
        solve_side(item_f, user_f, by_item);
        cm.objective_trace.push_back(objective());
    }
    for (int i = 0; i < table.num_users; ++i)
        if (by_user[i].empty()) cm.cold_users.push_back(i);
    for (int j = 0; j < table.num_items; ++j)
        if (by_item[j].empty()) cm.cold_items.push_back(j);
    cm.item_factors = item_f;
    cm.user_factors = user_f;
    cm.values = item_f * user_f.transpose();
    return cm;
}

// Completed ratings of one user over all items, affinely rescaled so the
// minimum maps to -1 and the maximum to +1. A constant row maps to zeros
// (every arm optimal).
inline Eigen::VectorXd user_reward_function(const RatingsTable& table, const CompletedMatrix& completed,
                                            int user) {
    if (user < 0 || user >= table.num_users || user >= completed.values.cols()) {
        throw std::out_of_range("user_reward_function: user index out of range");
    }
    const Eigen::VectorXd col = completed.values.col(user);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        return Eigen::VectorXd::Zero(col.size());
    }
    return (2.0 * (col.array() - lo) / (hi - lo) - 1.0).matrix();
}

inline std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    return fnv1a64(bytes);
}

struct CompletionKey {
    std::uint64_t file_hash = 0;
    int rank = 0;
    double mu = 0.0;
    int iters = 0;
    std::uint64_t seed = 0;

    std::string cache_name() const {
        std::ostringstream os;
        os << "completed_" << std::hex << file_hash << std::dec << "_r" << rank << "_mu" << fmt_g(mu)
           << "_it" << iters << "_s" << seed << ".bin";
        return os.str();
    }
};

namespace detail {

constexpr std::uint32_t kCompletedMagic = 0x43425053u;  // "SPBC"
constexpr std::uint32_t kCompletedVersion = 1u;

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
bool get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return bool(is);
}

}  // namespace detail

inline void save_completed(const std::string& path, const CompletionKey& key, const CompletedMatrix& cm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_completed: cannot open '" + path + "'");
    using namespace detail;
    put(out, kCompletedMagic);
    put(out, kCompletedVersion);
    put(out, key.file_hash);
    put(out, static_cast<std::int32_t>(key.rank));
    put(out, key.mu);
    put(out, static_cast<std::int32_t>(key.iters));
    put(out, key.seed);
    put(out, static_cast<std::int32_t>(cm.values.rows()));
    put(out, static_cast<std::int32_t>(cm.values.cols()));
    put(out, static_cast<std::int32_t>(cm.rank));
    out.write(reinterpret_cast<const char*>(cm.values.data()),
              static_cast<std::streamsize>(sizeof(double)) * cm.values.size());
    out.write(reinterpret_cast<const char*>(cm.item_factors.data()),
              static_cast<std::streamsize>(sizeof(double)) * cm.item_factors.size());
    out.write(reinterpret_cast<const char*>(cm.user_factors.data()),
              static_cast<std::streamsize>(sizeof(double)) * cm.user_factors.size());
    auto put_vec_d = [&](const std::vector<double>& v) {
        put(out, static_cast<std::uint32_t>(v.size()));
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(sizeof(double)) * static_cast<std::streamsize>(v.size()));
    };
    auto put_vec_i = [&](const std::vector<int>& v) {
        put(out, static_cast<std::uint32_t>(v.size()));
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(sizeof(int)) * static_cast<std::streamsize>(v.size()));
    };
    put_vec_d(cm.objective_trace);
    put_vec_i(cm.cold_users);
    put_vec_i(cm.cold_items);
    if (!out) throw std::runtime_error("save_completed: write failed for '" + path + "'");
}

// Returns nullopt on any mismatch (missing file, different key, truncation):
// the caller just recomputes.
inline std::optional<CompletedMatrix> try_load_completed(const std::string& path, const CompletionKey& key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    using namespace detail;
    std::uint32_t magic = 0, version = 0;
    std::uint64_t file_hash = 0, seed = 0;
    std::int32_t rank = 0, iters = 0, rows = 0, cols = 0, cm_rank = 0;
    double mu = 0.0;
    if (!get(in, magic) || !get(in, version) || !get(in, file_hash) || !get(in, rank) || !get(in, mu) ||
        !get(in, iters) || !get(in, seed) || !get(in, rows) || !get(in, cols) || !get(in, cm_rank)) {
        return std::nullopt;
    }
    if (magic != kCompletedMagic || version != kCompletedVersion || file_hash != key.file_hash ||
        rank != key.rank || mu != key.mu || iters != key.iters || seed != key.seed || rows < 1 ||
        cols < 1 || cm_rank < 1) {
        return std::nullopt;
    }
    CompletedMatrix cm;
    cm.rank = cm_rank;
    cm.values.resize(rows, cols);
    cm.item_factors.resize(rows, cm_rank);
    cm.user_factors.resize(cols, cm_rank);
    in.read(reinterpret_cast<char*>(cm.values.data()),
            static_cast<std::streamsize>(sizeof(double)) * cm.values.size());
    in.read(reinterpret_cast<char*>(cm.item_factors.data()),
            static_cast<std::streamsize>(sizeof(double)) * cm.item_factors.size());
    in.read(reinterpret_cast<char*>(cm.user_factors.data()),
            static_cast<std::streamsize>(sizeof(double)) * cm.user_factors.size());
    std::uint32_t n = 0;
    if (!get(in, n)) return std::nullopt;
    cm.objective_trace.resize(n);
    in.read(reinterpret_cast<char*>(cm.objective_trace.data()),
            static_cast<std::streamsize>(sizeof(double)) * static_cast<std::streamsize>(n));
    if (!get(in, n)) return std::nullopt;
    cm.cold_users.resize(n);
    in.read(reinterpret_cast<char*>(cm.cold_users.data()),
            static_cast<std::streamsize>(sizeof(int)) * static_cast<std::streamsize>(n));
    if (!get(in, n)) return std::nullopt;
    cm.cold_items.resize(n);
    in.read(reinterpret_cast<char*>(cm.cold_items.data()),
            static_cast<std::streamsize>(sizeof(int)) * static_cast<std::streamsize>(n));
    if (!in) return std::nullopt;
    return cm;
}

// Reads a feature CSV of the shape write_item_features_csv emits: a header
// line, then one row per item whose first column is an id (ignored) and the
// remaining columns are the feature coordinates.
inline Eigen::MatrixXd read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_features_csv: cannot open '" + path + "'");
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error("read_features_csv: " + path + ": empty file");
    ++line_no;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = detail::trim(line);
        if (row.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(row);
        std::string tok;
        bool first = true;
        while (std::getline(ss, tok, ',')) {
            if (first) {  // id column
                first = false;
                continue;
            }
            double v = 0.0;
            if (!detail::parse_real(detail::trim(tok), v)) {
                throw std::runtime_error("read_features_csv: " + path + ": line " + std::to_string(line_no) +
                                         ": bad value '" + tok + "'");
            }
            vals.push_back(v);
        }
        if (vals.empty()) {
            throw std::runtime_error("read_features_csv: " + path + ": line " + std::to_string(line_no) +
                                     ": no feature columns");
        }
        if (width == 0) width = vals.size();
        if (vals.size() != width) {
            throw std::runtime_error("read_features_csv: " + path + ": line " + std::to_string(line_no) +
                                     ": ragged row");
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("read_features_csv: " + path + ": no rows");
    Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return features;
}

inline void write_item_features_csv(const std::string& path, const RatingsTable& table,
                                    const CompletedMatrix& cm) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_item_features_csv: cannot open '" + path + "'");
    out << "item";
    for (int k = 0; k < cm.rank; ++k) out << ",f" << k;
    out << "\n";
    for (Eigen::Index j = 0; j < cm.item_factors.rows(); ++j) {
        out << (j < static_cast<Eigen::Index>(table.item_ids.size()) ? table.item_ids[j] : j);
        for (int k = 0; k < cm.rank; ++k) out << "," << fmt_g(cm.item_factors(j, k));
        out << "\n";
    }
}

}  // namespace specb
