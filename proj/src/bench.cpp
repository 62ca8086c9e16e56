#include "jsk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "jsk/ams.hpp"
#include "jsk/error.hpp"
#include "jsk/estimator.hpp"

namespace jsk {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t parse_m_term(std::string_view s) {
    auto bad = [&] { return UsageError("bad m value '" + std::string(s) + "'"); };
    if (s.empty()) throw bad();
    if (s.rfind("2^", 0) == 0) {
        s.remove_prefix(2);
        unsigned e = 0;
        for (char c : s) {
            if (c < '0' || c > '9') throw bad();
            e = e * 10 + static_cast<unsigned>(c - '0');
            if (e > 62) throw bad();
        }
        if (s.empty()) throw bad();
        return std::uint64_t{1} << e;
    }
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw bad();
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (v == 0) throw bad();
    return v;
}

}  // namespace

double abs_rel_error(double exact, double estimate) {
    return std::abs(exact - estimate) / std::max(exact, 1.0);
}

double q_error(double exact, double estimate) {
    if (!(estimate > 0.0)) return std::numeric_limits<double>::infinity();
    double y = exact > 0.0 ? exact : 1.0;
    return std::max(y / estimate, estimate / y);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw UsageError("percentile of an empty set");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        double lx = std::log(x[i]);
        double ly = std::log(y[i]);
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (n < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / denom;
}

std::vector<std::uint64_t> parse_m_sweep(std::string_view text) {
    std::vector<std::uint64_t> out;
    auto range = text.find("..");
    if (range != std::string_view::npos) {
        std::string_view lo = text.substr(0, range);
        std::string_view hi = text.substr(range + 2);
        unsigned step = 1;
        if (auto colon = hi.find(':'); colon != std::string_view::npos) {
            auto s = parse_m_term(hi.substr(colon + 1));
            if (s > 62) throw UsageError("bad exponent step in m sweep");
            step = static_cast<unsigned>(s);
            hi = hi.substr(0, colon);
        }
        if (lo.rfind("2^", 0) != 0 || hi.rfind("2^", 0) != 0)
            throw UsageError("m sweep ranges must be written 2^A..2^B");
        auto a = parse_m_term(lo);
        auto b = parse_m_term(hi);
        if (a > b) throw UsageError("empty m sweep");
        for (std::uint64_t m = a; m <= b; m <<= step) {
            out.push_back(m);
            if (m > (b >> step)) break;
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto term = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_m_term(term));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<Method> parse_methods(std::string_view text) {
    std::vector<Method> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = text.find(',', start);
        out.push_back(parse_method(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                       : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
    return splitmix64(base_seed + static_cast<std::uint64_t>(trial));
}

TrialOutcome run_trial(const JoinGraph& graph, std::span<const std::vector<TupleUpdate>> relations,
                       const SketchConfig& config) {
    TrialOutcome out;
    std::vector<RelationSketch> sketches;
    auto start = Clock::now();
    if (config.method == Method::conv) {
        ConvSketcher sketcher(graph, config);
        for (std::size_t k = 0; k < relations.size(); ++k) sketches.push_back(sketcher.build(k, relations[k]));
        out.sketch_ms = ms_since(start);
        auto report = estimate(sketches, graph, traversal_plan(graph));
        out.estimate = report.estimate;
        out.infer_ms = report.inference_ms;
    } else {
        AmsSketcher sketcher(graph, config);
        for (std::size_t k = 0; k < relations.size(); ++k) sketches.push_back(sketcher.build(k, relations[k]));
        out.sketch_ms = ms_since(start);
        auto report = ams_estimate(sketches, graph);
        out.estimate = report.estimate;
        out.infer_ms = report.inference_ms;
    }
    return out;
}

BenchResult run_bench(const JoinGraph& graph, std::span<const std::vector<TupleUpdate>> relations, double exact,
                      const BenchOptions& options) {
    if (options.ms.empty()) throw UsageError("empty m sweep");
    if (options.trials == 0) throw UsageError("at least one trial is required");

    BenchResult result;
    for (Method method : options.methods)
        for (std::uint64_t m : options.ms)
            for (std::size_t t = 0; t < options.trials; ++t)
                result.rows.push_back({method, m, t, trial_seed(options.seed, t), 0, exact, 0, 0, 0, 0});

    std::size_t threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, result.rows.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t i = next++; i < result.rows.size() && !failed; i = next++) {
            auto& row = result.rows[i];
            try {
                SketchConfig cfg{row.m, options.repetitions, row.seed, row.method};
                auto outcome = run_trial(graph, relations, cfg);
                row.estimate = outcome.estimate;
                row.sketch_ms = outcome.sketch_ms;
                row.infer_ms = outcome.infer_ms;
                row.abs_rel_error = abs_rel_error(exact, row.estimate);
                row.q_error = q_error(exact, row.estimate);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    summarize(result);
    return result;
}

void summarize(BenchResult& result) {
    result.summaries.clear();
    result.slopes.clear();
    std::map<std::pair<Method, std::uint64_t>, std::vector<double>> errors;
    std::vector<Method> method_order;
    for (const auto& row : result.rows) {
        errors[{row.method, row.m}].push_back(row.abs_rel_error);
        if (std::find(method_order.begin(), method_order.end(), row.method) == method_order.end())
            method_order.push_back(row.method);
    }
    for (Method method : method_order) {
        std::vector<double> xs, ys;
        for (const auto& [key, errs] : errors) {
            if (key.first != method) continue;
            double med = median(errs);
            result.summaries.push_back({method, key.second, med, percentile(errs, 0.95)});
            xs.push_back(static_cast<double>(key.second));
            ys.push_back(med);
        }
        result.slopes.push_back({method, loglog_slope(xs, ys)});
    }
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
    out.precision(17);
    out << kBenchSchema << '\n';
    out << "kind,method,m,trial,seed,estimate,exact,abs_rel_error,q_error,sketch_ms,infer_ms,median_are,p95_are,slope\n";
    for (const auto& r : result.rows) {
        out << "trial," << to_string(r.method) << ',' << r.m << ',' << r.trial << ',' << r.seed << ',' << r.estimate
            << ',' << r.exact << ',' << r.abs_rel_error << ',' << r.q_error << ',' << r.sketch_ms << ','
            << r.infer_ms << ",,,\n";
    }
    for (const auto& s : result.summaries) {
        out << "summary," << to_string(s.method) << ',' << s.m << ",,,,,,,,," << s.median_are << ',' << s.p95_are
            << ",\n";
    }
    for (const auto& s : result.slopes) out << "slope," << to_string(s.method) << ",,,,,,,,,,,," << s.slope << '\n';
}

std::vector<ThroughputRow> run_throughput(const JoinGraph& graph, std::span<const TupleUpdate> stream,
                                          std::span<const std::uint64_t> ms, std::span<const Method> methods,
                                          std::size_t repetitions, std::uint64_t seed, double max_seconds) {
    std::vector<ThroughputRow> rows;
    for (Method method : methods) {
        for (std::uint64_t m : ms) {
            SketchConfig cfg{m, repetitions, seed, method};
            ThroughputRow row{method, m, 0, 0.0, 0.0};
            if (!stream.empty()) {
                const std::size_t relation = stream.front().relation;
                auto run = [&](auto& sketcher) {
                    RelationSketch sk = sketcher.make_sketch(relation);
                    auto start = Clock::now();
                    for (const auto& t : stream) {
                        sketcher.update(sk, t);
                        ++row.tuples;
                        if ((row.tuples & 63) == 0 &&
                            std::chrono::duration<double>(Clock::now() - start).count() > max_seconds)
                            break;
                    }
                    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
                };
                if (method == Method::conv) {
                    ConvSketcher sketcher(graph, cfg);
                    run(sketcher);
                } else {
                    AmsSketcher sketcher(graph, cfg);
                    run(sketcher);
                }
                if (row.seconds > 0.0) row.tuples_per_second = static_cast<double>(row.tuples) / row.seconds;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_throughput_csv(std::ostream& out, std::span<const ThroughputRow> rows) {
    out << "method,m,tuples,seconds,tuples_per_second\n";
    for (const auto& r : rows)
        out << to_string(r.method) << ',' << r.m << ',' << r.tuples << ',' << r.seconds << ',' << r.tuples_per_second
            << '\n';
}

}  // namespace jsk
