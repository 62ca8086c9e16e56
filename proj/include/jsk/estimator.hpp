#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "jsk/join_graph.hpp"
#include "jsk/sketch.hpp"

namespace jsk {

struct EstimateReport {
    Method method = Method::conv;
    std::vector<double> per_repetition;
    double estimate = 0.0;
    double inference_ms = 0.0;
};

/// Middle order statistic; mean of the two middle values for even sizes.
double median(std::vector<double> values);

enum class InferencePath { fft, naive };

/// Direct evaluation of the estimate: a sum over one bin index per graph
/// component of the product of the counters each relation's index sum
/// selects. Costs m^components; refused beyond 1e7 terms.
double naive_estimate(std::span<const RelationSketch> sketches, const JoinGraph& graph, std::size_t rep);

/// Folds the sketches of one repetition along `plan`; the estimate is the
/// sum of the returned vector.
Eigen::VectorXd combine_sketches(const PlanTree& plan, std::span<const RelationSketch> sketches,
                                 std::size_t rep);

/// Conv-method estimate: per-repetition values and their median.
/// `sketches[k]` must be the sketch of relation k.
EstimateReport estimate(std::span<const RelationSketch> sketches, const JoinGraph& graph, const PlanTree& plan,
                        InferencePath path = InferencePath::fft);

/// Bins that bound the absolute error by `epsilon` via Chebyshev:
/// ceil(3^r * epsilon^-2 * prod_k ||F_k||^2).
std::uint64_t required_bins(double epsilon, std::size_t relations, double norm_product);

/// Checks that `sketches` line up with the graph's relations and share one
/// configuration of the expected method.
void check_sketches(std::span<const RelationSketch> sketches, const JoinGraph& graph, Method method);

}  // namespace jsk
