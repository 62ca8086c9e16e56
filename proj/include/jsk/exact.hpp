#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "jsk/join_graph.hpp"
#include "jsk/sketch.hpp"

namespace jsk {

/// Net frequency of each distinct joined-attribute tuple; zero entries are
/// dropped.
using FrequencyTable = std::map<std::vector<std::uint64_t>, double>;

FrequencyTable frequencies(std::span<const TupleUpdate> stream);

/// Sum of squared tuple frequencies.
double frequency_norm(std::span<const TupleUpdate> stream);

/// Squared frequency norm of every relation, in relation order.
std::vector<double> frequency_norms(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph);

/// Reference: enumerates every combination of distinct tuples and keeps the
/// ones satisfying all joins. Refuses more than `budget` combinations.
double exact_cardinality_nested(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph,
                                double budget = 1e8);

/// Sum-product over the relation tree, keyed on join values.
double exact_cardinality_hash(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph);

/// Nested-loop reference when within budget, hash path otherwise.
double exact_cardinality(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph);

}  // namespace jsk
