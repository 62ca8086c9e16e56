#include "jsk/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "jsk/convolution.hpp"
#include "jsk/error.hpp"

namespace jsk {

double median(std::vector<double> values) {
    if (values.empty()) throw UsageError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void check_sketches(std::span<const RelationSketch> sketches, const JoinGraph& graph, Method method) {
    if (sketches.size() != graph.relation_count())
        throw QueryError("expected " + std::to_string(graph.relation_count()) + " relation sketches, got " +
                         std::to_string(sketches.size()));
    for (std::size_t k = 0; k < sketches.size(); ++k) {
        const auto& s = sketches[k];
        if (s.relation != k) throw QueryError("sketch " + std::to_string(k) + " belongs to another relation");
        if (!(s.config == sketches[0].config)) throw QueryError("sketches were built with different configurations");
        if (s.config.method != method)
            throw QueryError("sketch method " + std::string(to_string(s.config.method)) + " does not match " +
                             std::string(to_string(method)) + " inference");
        if (s.counters.rows() != static_cast<Eigen::Index>(s.config.l) ||
            s.counters.cols() != static_cast<Eigen::Index>(s.config.m))
            throw QueryError("sketch shape does not match its configuration");
    }
}

double naive_estimate(std::span<const RelationSketch> sketches, const JoinGraph& graph, std::size_t rep) {
    check_sketches(sketches, graph, Method::conv);
    const std::uint64_t m = sketches[0].config.m;
    const std::size_t comps = graph.component_count();

    double terms = std::pow(static_cast<double>(m), static_cast<double>(comps));
    if (terms > 1e7) throw BudgetError("naive estimate needs m^components = " + std::to_string(terms) + " terms");

    // Components touched by each relation, with multiplicity.
    std::vector<std::vector<std::size_t>> comps_of(graph.relation_count());
    for (std::size_t k = 0; k < graph.relation_count(); ++k)
        for (std::size_t u : graph.omega(k)) comps_of[k].push_back(graph.component_of(u));

    const auto r = static_cast<Eigen::Index>(rep);
    std::vector<std::uint64_t> j(comps, 0);
    double total = 0.0;
    for (;;) {
        double prod = 1.0;
        for (std::size_t k = 0; k < comps_of.size() && prod != 0.0; ++k) {
            std::uint64_t idx = 0;
            for (std::size_t c : comps_of[k]) idx = (idx + j[c]) % m;
            prod *= sketches[k].counters(r, static_cast<Eigen::Index>(idx));
        }
        total += prod;

        std::size_t d = 0;
        while (d < comps && ++j[d] == m) j[d++] = 0;
        if (d == comps) break;
    }
    return total;
}

Eigen::VectorXd combine_sketches(const PlanTree& plan, std::span<const RelationSketch> sketches, std::size_t rep) {
    if (plan.nodes.size() != sketches.size()) throw QueryError("plan and sketches cover different relations");
    const auto m = sketches[0].counters.cols();
    const auto r = static_cast<Eigen::Index>(rep);
    CircularOps<double> ops;

    std::function<Eigen::VectorXd(std::size_t)> combine = [&](std::size_t node_idx) -> Eigen::VectorXd {
        const PlanNode& node = plan.nodes[node_idx];
        Eigen::VectorXd x = sketches[node.relation].counters.row(r).transpose();
        for (const auto& branch : node.cross) {
            Eigen::VectorXd a = Eigen::VectorXd::Ones(m);
            for (std::size_t child : branch.children) a.array() *= combine(child).array();
            x = ops.cross_correlate_fft(a, x);
        }
        for (std::size_t child : node.joined) x.array() *= combine(child).array();
        return x;
    };
    return combine(0);
}

EstimateReport estimate(std::span<const RelationSketch> sketches, const JoinGraph& graph, const PlanTree& plan,
                        InferencePath path) {
    check_sketches(sketches, graph, Method::conv);
    const auto start = std::chrono::steady_clock::now();

    EstimateReport report;
    report.method = Method::conv;
    const std::size_t l = sketches[0].config.l;
    for (std::size_t rep = 0; rep < l; ++rep) {
        double x = path == InferencePath::naive ? naive_estimate(sketches, graph, rep)
                                                : combine_sketches(plan, sketches, rep).sum();
        report.per_repetition.push_back(x);
    }
    report.estimate = median(report.per_repetition);
    report.inference_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::uint64_t required_bins(double epsilon, std::size_t relations, double norm_product) {
    if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
    double bins = std::pow(3.0, static_cast<double>(relations)) * norm_product / (epsilon * epsilon);
    // Absorb rounding in the products so exact integers are not bumped up.
    return static_cast<std::uint64_t>(std::ceil(bins * (1.0 - 1e-12)));
}

}  // namespace jsk
