#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jsk/estimator.hpp"
#include "jsk/sketch.hpp"

namespace jsk {

/// Multi-join AMS sketching: every counter j of every repetition carries its
/// own sign function per edge, so each update touches all m counters.
///
/// Counter signs are derived on demand from (seed, edge, repetition, j)
/// instead of being stored, which keeps seed memory independent of m.
class AmsSketcher {
public:
    AmsSketcher(const JoinGraph& graph, const SketchConfig& config);

    const JoinGraph& graph() const noexcept { return *graph_; }
    const SketchConfig& config() const noexcept { return config_; }

    RelationSketch make_sketch(std::size_t relation) const;

    /// The +-1 weight tuple `t` adds to counter `j` of repetition `rep`.
    int counter_sign(std::size_t rep, std::uint64_t j, const TupleUpdate& t) const;

    void update(RelationSketch& sketch, const TupleUpdate& t) const;

    RelationSketch build(std::size_t relation, std::span<const TupleUpdate> stream) const;

private:
    struct Slot {
        std::size_t position;
        std::vector<std::size_t> edges;
    };

    const std::vector<Slot>& checked_layout(const TupleUpdate& t) const;

    const JoinGraph* graph_;
    SketchConfig config_;
    // prefixes_[rep * |E| + e]
    std::vector<std::uint64_t> prefixes_;
    std::vector<std::vector<Slot>> layouts_;
};

void ams_update(const AmsSketcher& sketcher, RelationSketch& sketch, const TupleUpdate& t);

/// Per repetition, the mean over counters of the product of the relations'
/// counters; the report carries their median.
EstimateReport ams_estimate(std::span<const RelationSketch> sketches, const JoinGraph& graph);

}  // namespace jsk
