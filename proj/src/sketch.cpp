#include "jsk/sketch.hpp"

#include "jsk/error.hpp"

namespace jsk {

std::string_view to_string(Method method) {
    return method == Method::ams ? "ams" : "conv";
}

Method parse_method(std::string_view name) {
    if (name == "conv") return Method::conv;
    if (name == "ams") return Method::ams;
    throw UsageError("unknown method '" + std::string(name) + "' (expected conv or ams)");
}

void SketchConfig::validate() const {
    if (m < 1) throw UsageError("bin count m must be at least 1");
    if (l < 1) throw UsageError("repetition count l must be at least 1");
}

RelationSketch::RelationSketch(std::size_t relation, std::string name, const SketchConfig& config)
    : relation(relation),
      name(std::move(name)),
      config(config),
      counters(CounterGrid::Zero(static_cast<Eigen::Index>(config.l), static_cast<Eigen::Index>(config.m))) {}

RelationSketch merge(const RelationSketch& a, const RelationSketch& b) {
    if (!(a.config == b.config)) throw QueryError("cannot merge sketches with different configurations");
    if (a.relation != b.relation) throw QueryError("cannot merge sketches of different relations");
    RelationSketch out = a;
    out.counters += b.counters;
    return out;
}

ConvSketcher::ConvSketcher(const JoinGraph& graph, const SketchConfig& config)
    : graph_(&graph), config_(config), hashes_(derive_hash_set(config, graph)) {
    layouts_.resize(graph.relation_count());
    for (std::size_t k = 0; k < graph.relation_count(); ++k) {
        const auto& omega = graph.omega(k);
        for (std::size_t p = 0; p < omega.size(); ++p) {
            const std::size_t u = omega[p];
            Slot slot{p, graph.component_of(u), {}};
            for (std::size_t v : graph.gamma(u)) slot.edges.push_back(*graph.edge_index(u, v));
            layouts_[k].push_back(std::move(slot));
        }
    }
}

const std::vector<ConvSketcher::Slot>& ConvSketcher::checked_layout(const TupleUpdate& t) const {
    if (t.relation >= layouts_.size()) throw QueryError("tuple for unknown relation");
    const auto& layout = layouts_[t.relation];
    if (t.values.size() != layout.size())
        throw QueryError("tuple for relation " + graph_->relation_name(t.relation) + " has " +
                         std::to_string(t.values.size()) + " values, expected " + std::to_string(layout.size()));
    return layout;
}

RelationSketch ConvSketcher::make_sketch(std::size_t relation) const {
    return RelationSketch(relation, graph_->relation_name(relation), config_);
}

int ConvSketcher::tuple_sign(std::size_t rep, const TupleUpdate& t) const {
    int sign = 1;
    for (const auto& slot : checked_layout(t))
        for (std::size_t e : slot.edges) sign *= hashes_.sign(rep, e)(t.values[slot.position]);
    return sign;
}

std::uint64_t ConvSketcher::tuple_bin(std::size_t rep, const TupleUpdate& t) const {
    std::uint64_t bin = 0;
    for (const auto& slot : checked_layout(t)) {
        bin += hashes_.bin(rep, slot.component)(t.values[slot.position]);
        if (bin >= config_.m) bin -= config_.m;
    }
    return bin;
}

void ConvSketcher::update(RelationSketch& sketch, const TupleUpdate& t) const {
    if (sketch.relation != t.relation) throw QueryError("tuple does not belong to this sketch's relation");
    update(t, [&](std::size_t rep, std::uint64_t bin, double inc) {
        sketch.counters(static_cast<Eigen::Index>(rep), static_cast<Eigen::Index>(bin)) += inc;
    });
}

RelationSketch ConvSketcher::build(std::size_t relation, std::span<const TupleUpdate> stream) const {
    RelationSketch sketch = make_sketch(relation);
    for (const auto& t : stream) update(sketch, t);
    return sketch;
}

int tuple_sign(const ConvSketcher& sketcher, std::size_t rep, const TupleUpdate& t) {
    return sketcher.tuple_sign(rep, t);
}

std::uint64_t tuple_bin(const ConvSketcher& sketcher, std::size_t rep, const TupleUpdate& t) {
    return sketcher.tuple_bin(rep, t);
}

void update(const ConvSketcher& sketcher, RelationSketch& sketch, const TupleUpdate& t) {
    sketcher.update(sketch, t);
}

RelationSketch build_sketch(const ConvSketcher& sketcher, std::size_t relation,
                            std::span<const TupleUpdate> stream) {
    return sketcher.build(relation, stream);
}

}  // namespace jsk
