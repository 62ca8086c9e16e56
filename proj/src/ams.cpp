#include "jsk/ams.hpp"

#include <chrono>

#include "jsk/error.hpp"

namespace jsk {

namespace {

int ams_sign(std::uint64_t prefix, std::uint64_t j, std::uint64_t x) {
    auto stream = CoefficientStream::from_prefix(prefix, j);
    std::array<std::uint64_t, 4> coeffs{};
    for (auto& c : coeffs) c = stream.next();
    return 1 - 2 * static_cast<int>(mersenne::poly(coeffs, x) & 1U);
}

}  // namespace

AmsSketcher::AmsSketcher(const JoinGraph& graph, const SketchConfig& config) : graph_(&graph), config_(config) {
    config_.validate();
    config_.method = Method::ams;
    const auto& edges = graph.edges();
    if (edges.empty()) throw QueryError("cannot sketch a query without joins");
    for (std::size_t rep = 0; rep < config_.l; ++rep)
        for (auto [u, v] : edges)
            prefixes_.push_back(CoefficientStream::prefix(config_.seed, HashKind::ams_sign, edge_key(u, v), rep));

    layouts_.resize(graph.relation_count());
    for (std::size_t k = 0; k < graph.relation_count(); ++k) {
        const auto& omega = graph.omega(k);
        for (std::size_t p = 0; p < omega.size(); ++p) {
            Slot slot{p, {}};
            for (std::size_t v : graph.gamma(omega[p])) slot.edges.push_back(*graph.edge_index(omega[p], v));
            layouts_[k].push_back(std::move(slot));
        }
    }
}

const std::vector<AmsSketcher::Slot>& AmsSketcher::checked_layout(const TupleUpdate& t) const {
    if (t.relation >= layouts_.size()) throw QueryError("tuple for unknown relation");
    const auto& layout = layouts_[t.relation];
    if (t.values.size() != layout.size())
        throw QueryError("tuple for relation " + graph_->relation_name(t.relation) + " has " +
                         std::to_string(t.values.size()) + " values, expected " + std::to_string(layout.size()));
    return layout;
}

RelationSketch AmsSketcher::make_sketch(std::size_t relation) const {
    return RelationSketch(relation, graph_->relation_name(relation), config_);
}

int AmsSketcher::counter_sign(std::size_t rep, std::uint64_t j, const TupleUpdate& t) const {
    const std::size_t edge_count = graph_->edges().size();
    int sign = 1;
    for (const auto& slot : checked_layout(t))
        for (std::size_t e : slot.edges) sign *= ams_sign(prefixes_[rep * edge_count + e], j, t.values[slot.position]);
    return sign;
}

void AmsSketcher::update(RelationSketch& sketch, const TupleUpdate& t) const {
    if (sketch.relation != t.relation) throw QueryError("tuple does not belong to this sketch's relation");
    if (sketch.config.method != Method::ams) throw QueryError("AMS update applied to a conv sketch");
    const auto& layout = checked_layout(t);
    const std::size_t edge_count = graph_->edges().size();
    for (std::size_t rep = 0; rep < config_.l; ++rep) {
        const std::uint64_t* prefix = &prefixes_[rep * edge_count];
        auto row = sketch.counters.row(static_cast<Eigen::Index>(rep));
        for (std::uint64_t j = 0; j < config_.m; ++j) {
            int sign = 1;
            for (const auto& slot : layout)
                for (std::size_t e : slot.edges) sign *= ams_sign(prefix[e], j, t.values[slot.position]);
            row(static_cast<Eigen::Index>(j)) += sign * t.delta;
        }
    }
}

RelationSketch AmsSketcher::build(std::size_t relation, std::span<const TupleUpdate> stream) const {
    RelationSketch sketch = make_sketch(relation);
    for (const auto& t : stream) update(sketch, t);
    return sketch;
}

void ams_update(const AmsSketcher& sketcher, RelationSketch& sketch, const TupleUpdate& t) {
    sketcher.update(sketch, t);
}

EstimateReport ams_estimate(std::span<const RelationSketch> sketches, const JoinGraph& graph) {
    check_sketches(sketches, graph, Method::ams);
    const auto start = std::chrono::steady_clock::now();

    EstimateReport report;
    report.method = Method::ams;
    const auto& cfg = sketches[0].config;
    for (std::size_t rep = 0; rep < cfg.l; ++rep) {
        const auto r = static_cast<Eigen::Index>(rep);
        Eigen::RowVectorXd prod = sketches[0].counters.row(r);
        for (std::size_t k = 1; k < sketches.size(); ++k) prod.array() *= sketches[k].counters.row(r).array();
        report.per_repetition.push_back(prod.mean());
    }
    report.estimate = median(report.per_repetition);
    report.inference_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace jsk
