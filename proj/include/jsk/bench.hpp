#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "jsk/join_graph.hpp"
#include "jsk/sketch.hpp"

namespace jsk {

/// |y - y_hat| / max(y, 1)
double abs_rel_error(double exact, double estimate);

/// max(y / y_hat, y_hat / y), infinite when y_hat <= 0. y = 0 is read as 1.
double q_error(double exact, double estimate);

/// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

/// Least-squares slope of log(y) against log(x); pairs with a non-positive
/// coordinate are skipped. NaN with fewer than two usable pairs.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// "2^A..2^B" (doubling), "2^A..2^B:s" (exponent step s) or a comma list of
/// integers and powers of two such as "64,2^10".
std::vector<std::uint64_t> parse_m_sweep(std::string_view text);

std::vector<Method> parse_methods(std::string_view text);

/// Seed of trial `trial`; shared by every m and method of that trial.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial);

/// Sketches every relation with `config` and returns the median estimate.
struct TrialOutcome {
    double estimate = 0.0;
    double sketch_ms = 0.0;
    double infer_ms = 0.0;
};
TrialOutcome run_trial(const JoinGraph& graph, std::span<const std::vector<TupleUpdate>> relations,
                       const SketchConfig& config);

struct BenchOptions {
    std::vector<std::uint64_t> ms;
    std::vector<Method> methods{Method::conv};
    std::size_t trials = 30;
    std::size_t repetitions = 5;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct BenchRow {
    Method method = Method::conv;
    std::uint64_t m = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double exact = 0.0;
    double abs_rel_error = 0.0;
    double q_error = 0.0;
    double sketch_ms = 0.0;
    double infer_ms = 0.0;
};

struct BenchSummary {
    Method method = Method::conv;
    std::uint64_t m = 0;
    double median_are = 0.0;
    double p95_are = 0.0;
};

struct BenchSlope {
    Method method = Method::conv;
    double slope = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;  // ordered by (method, m, trial)
    std::vector<BenchSummary> summaries;
    std::vector<BenchSlope> slopes;
};

BenchResult run_bench(const JoinGraph& graph, std::span<const std::vector<TupleUpdate>> relations, double exact,
                      const BenchOptions& options);

/// Recomputes summaries and slopes from raw rows.
void summarize(BenchResult& result);

inline constexpr std::string_view kBenchSchema = "# jsk-bench v1";

void write_bench_csv(std::ostream& out, const BenchResult& result);

struct ThroughputRow {
    Method method = Method::conv;
    std::uint64_t m = 0;
    std::size_t tuples = 0;
    double seconds = 0.0;
    double tuples_per_second = 0.0;
};

/// Update rate of sketching `stream` for each (method, m). Stops a cell
/// early once `max_seconds` have elapsed.
std::vector<ThroughputRow> run_throughput(const JoinGraph& graph, std::span<const TupleUpdate> stream,
                                          std::span<const std::uint64_t> ms, std::span<const Method> methods,
                                          std::size_t repetitions, std::uint64_t seed, double max_seconds = 10.0);

void write_throughput_csv(std::ostream& out, std::span<const ThroughputRow> rows);

}  // namespace jsk
