#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jsk/hashing.hpp"
#include "jsk/join_graph.hpp"

namespace jsk {

enum class Method : std::uint8_t { conv = 0, ams = 1 };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct SketchConfig {
    std::uint64_t m = 1024;     // bins per repetition
    std::size_t l = 5;          // repetitions
    std::uint64_t seed = 0;     // master seed
    Method method = Method::conv;

    void validate() const;
    bool operator==(const SketchConfig&) const = default;
};

/// l x m counters, one row per repetition.
using CounterGrid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One streamed change to a relation: `values[p]` is the item of the p-th
/// attribute of omega(relation).
struct TupleUpdate {
    std::size_t relation = 0;
    std::vector<std::uint64_t> values;
    double delta = 1.0;
};

struct RelationSketch {
    std::size_t relation = 0;
    std::string name;
    SketchConfig config;
    CounterGrid counters;

    RelationSketch() = default;
    RelationSketch(std::size_t relation, std::string name, const SketchConfig& config);

    bool is_zero() const { return (counters.array() == 0.0).all(); }
};

/// Counter-wise sum. Throws QueryError unless config and relation agree.
RelationSketch merge(const RelationSketch& a, const RelationSketch& b);

/// Sketches relations of one query with the convolution method.
///
/// Per update and repetition the tuple's sign is the product of its edge
/// signs and its bin the sum of its component bins mod m, so exactly one
/// counter per repetition changes.
class ConvSketcher {
public:
    ConvSketcher(const JoinGraph& graph, const SketchConfig& config);

    const JoinGraph& graph() const noexcept { return *graph_; }
    const SketchConfig& config() const noexcept { return config_; }
    const HashSet& hashes() const noexcept { return hashes_; }

    RelationSketch make_sketch(std::size_t relation) const;

    int tuple_sign(std::size_t rep, const TupleUpdate& t) const;
    std::uint64_t tuple_bin(std::size_t rep, const TupleUpdate& t) const;

    /// Calls `write(rep, bin, increment)` once per repetition.
    template <class Writer>
    void update(const TupleUpdate& t, Writer&& write) const {
        const auto& layout = checked_layout(t);
        for (std::size_t rep = 0; rep < config_.l; ++rep) {
            int sign = 1;
            std::uint64_t bin = 0;
            for (const auto& slot : layout) {
                const std::uint64_t x = t.values[slot.position];
                bin += hashes_.bin(rep, slot.component)(x);
                if (bin >= config_.m) bin -= config_.m;
                for (std::size_t e : slot.edges) sign *= hashes_.sign(rep, e)(x);
            }
            write(rep, bin, sign * t.delta);
        }
    }

    void update(RelationSketch& sketch, const TupleUpdate& t) const;

    RelationSketch build(std::size_t relation, std::span<const TupleUpdate> stream) const;

private:
    struct Slot {
        std::size_t position;
        std::size_t component;
        std::vector<std::size_t> edges;
    };

    const std::vector<Slot>& checked_layout(const TupleUpdate& t) const;

    const JoinGraph* graph_;
    SketchConfig config_;
    HashSet hashes_;
    std::vector<std::vector<Slot>> layouts_;
};

/// Free-function forms of the sketcher operations.
int tuple_sign(const ConvSketcher& sketcher, std::size_t rep, const TupleUpdate& t);
std::uint64_t tuple_bin(const ConvSketcher& sketcher, std::size_t rep, const TupleUpdate& t);
void update(const ConvSketcher& sketcher, RelationSketch& sketch, const TupleUpdate& t);
RelationSketch build_sketch(const ConvSketcher& sketcher, std::size_t relation,
                            std::span<const TupleUpdate> stream);

}  // namespace jsk
