#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "jsk/jsk.hpp"

namespace jsk::testing {

/// R0(0) - R1(1, 2) - R2(3), R1.2 - R3(4): joins {0,1}, {1,3}, {2,4}.
inline JoinGraph star4_graph() { return JoinGraph::make({1, 2, 1, 1}, {{0, 1}, {1, 3}, {2, 4}}); }

inline JoinGraph chain3_graph() { return JoinGraph::make({1, 2, 1}, {{0, 1}, {2, 3}}); }

inline JoinGraph pair_graph() { return JoinGraph::make({1, 1}, {{0, 1}}); }

/// Random valid join graph with at most `max_w` attributes and
/// `max_components` components: a random relation tree whose edges pick
/// random attribute slots, with unused slots dropped.
inline JoinGraph random_graph(std::mt19937_64& rng, std::size_t max_w = 6, std::size_t max_components = 3) {
    for (;;) {
        std::size_t r = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        std::vector<std::size_t> slots(r);
        for (auto& s : slots) s = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>> links;
        for (std::size_t k = 1; k < r; ++k) {
            std::size_t parent = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
            std::size_t a = std::uniform_int_distribution<std::size_t>(0, slots[parent] - 1)(rng);
            std::size_t b = std::uniform_int_distribution<std::size_t>(0, slots[k] - 1)(rng);
            links.push_back({{parent, a}, {k, b}});
        }
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
        for (auto& [x, y] : links) {
            ids[x];
            ids[y];
        }
        std::size_t next = 0;
        std::vector<std::size_t> counts(r, 0);
        for (auto& [key, id] : ids) {
            id = next++;
            ++counts[key.first];
        }
        if (ids.size() > max_w || ids.size() - (r - 1) > max_components) continue;
        std::vector<JoinGraph::Edge> edges;
        for (auto& [x, y] : links) edges.emplace_back(ids[x], ids[y]);
        return JoinGraph::make(counts, edges);
    }
}

/// Sketches with small random integer counters, one per relation.
inline std::vector<RelationSketch> random_sketches(std::mt19937_64& rng, const JoinGraph& graph,
                                                   const SketchConfig& cfg, int lo = -3, int hi = 3) {
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<RelationSketch> out;
    for (std::size_t k = 0; k < graph.relation_count(); ++k) {
        RelationSketch sk(k, graph.relation_name(k), cfg);
        for (Eigen::Index i = 0; i < sk.counters.size(); ++i) sk.counters.data()[i] = d(rng);
        out.push_back(std::move(sk));
    }
    return out;
}

/// Zipf(s) over {1..n}.
class Zipf {
public:
    Zipf(std::size_t n, double s) : cdf_(n) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) cdf_[i] = acc += 1.0 / std::pow(static_cast<double>(i + 1), s);
        for (auto& c : cdf_) c /= acc;
    }
    std::uint64_t operator()(std::mt19937_64& rng) {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        return static_cast<std::uint64_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) + 1;
    }

private:
    std::vector<double> cdf_;
};

/// Random tuples for every relation of `graph`, values drawn from Zipf.
inline std::vector<std::vector<TupleUpdate>> random_relations(std::mt19937_64& rng, const JoinGraph& graph,
                                                              std::size_t tuples, std::size_t domain, double s) {
    Zipf zipf(domain, s);
    std::vector<std::vector<TupleUpdate>> out(graph.relation_count());
    for (std::size_t k = 0; k < graph.relation_count(); ++k) {
        for (std::size_t i = 0; i < tuples; ++i) {
            TupleUpdate t{k, {}, 1.0};
            for (std::size_t p = 0; p < graph.omega(k).size(); ++p) t.values.push_back(zipf(rng));
            out[k].push_back(std::move(t));
        }
    }
    return out;
}

/// O(m^2) circular convolution, straight from its definition.
inline Eigen::VectorXd naive_convolve(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto m = x.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) out(j) += x(i) * y(((j - i) % m + m) % m);
    return out;
}

/// O(m^2) circular cross-correlation, straight from its definition.
inline Eigen::VectorXd naive_cross_correlate(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto m = x.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) out(j) += x(i) * y((j + i) % m);
    return out;
}

inline double sample_mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double sample_variance(const std::vector<double>& xs) {
    double mu = sample_mean(xs);
    double s = 0;
    for (double x : xs) s += (x - mu) * (x - mu);
    return s / static_cast<double>(xs.size() - 1);
}

}  // namespace jsk::testing
