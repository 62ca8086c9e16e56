// jsk: sketch, estimate and benchmark multi-join cardinalities from CSV sources.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "jsk/jsk.hpp"

namespace {

using namespace jsk;

constexpr std::uint64_t kAmsWarnCells = std::uint64_t{1} << 18;

std::uint64_t parse_single_m(const std::string& text) {
    auto ms = parse_m_sweep(text);
    if (ms.size() != 1) throw UsageError("--m takes a single value, got '" + text + "'");
    return ms[0];
}

struct Loaded {
    QuerySpec spec;
    JoinGraph graph;
};

Loaded load(const std::string& query) {
    QuerySpec spec = load_query(query);
    JoinGraph graph = build_join_graph(spec);
    return {std::move(spec), std::move(graph)};
}

// Option with a JSK_<NAME> environment fallback.
template <class T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    std::string env = "JSK_";
    for (char c : name.substr(2)) env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return app->add_option(name, target, help)->envname(env);
}

template <class Sketcher>
SketchFile sketch_sources(const Loaded& q, const SketchConfig& config) {
    Sketcher sketcher(q.graph, config);
    SketchFile file;
    file.config = config;
    for (std::size_t k = 0; k < q.graph.relation_count(); ++k) {
        RelationSketch sk = sketcher.make_sketch(k);
        const RelationSpec& rel = q.spec.relations[k];
        read_stream(rel.source, q.graph, k, rel.filters, [&](const TupleUpdate& t) { sketcher.update(sk, t); });
        file.relations.push_back(std::move(sk));
    }
    return file;
}

int cmd_sketch(const std::string& query, const std::string& m_text, std::size_t reps, std::uint64_t seed,
               const std::string& method, const std::string& out) {
    Loaded q = load(query);
    SketchConfig config{parse_single_m(m_text), reps, seed, parse_method(method)};
    config.validate();
    if (config.method == Method::ams && config.m * config.l >= kAmsWarnCells)
        std::cerr << "warning: ams updates touch m*l = " << config.m * config.l
                  << " counters per tuple; expect low throughput\n";
    SketchFile file = config.method == Method::conv ? sketch_sources<ConvSketcher>(q, config)
                                                    : sketch_sources<AmsSketcher>(q, config);
    write_sketch_file(out, file);
    return 0;
}

int cmd_estimate(const std::string& sketches, const std::string& query, const std::string& path,
                 const std::string& method) {
    Loaded q = load(query);
    SketchFile file = read_sketch_file(sketches);
    if (!method.empty() && parse_method(method) != file.config.method)
        throw QueryError("sketch file holds " + std::string(to_string(file.config.method)) + " sketches, not " +
                         method);
    if (!path.empty() && file.config.method != Method::conv)
        throw QueryError("--path applies to conv sketches; file holds " +
                         std::string(to_string(file.config.method)) + " sketches");
    auto aligned = align_to_graph(file, q.graph);

    EstimateReport report;
    if (file.config.method == Method::conv) {
        InferencePath p = InferencePath::fft;
        if (path == "naive")
            p = InferencePath::naive;
        else if (!path.empty() && path != "fft")
            throw UsageError("--path must be fft or naive");
        report = estimate(aligned, q.graph, traversal_plan(q.graph), p);
    } else {
        report = ams_estimate(aligned, q.graph);
    }

    nlohmann::json j;
    j["method"] = to_string(report.method);
    j["m"] = file.config.m;
    j["l"] = file.config.l;
    j["per_repetition"] = report.per_repetition;
    j["estimate"] = report.estimate;
    j["inference_ms"] = report.inference_ms;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_exact(const std::string& query) {
    Loaded q = load(query);
    auto relations = load_relations(q.spec, q.graph);
    std::printf("%.17g\n", exact_cardinality(relations, q.graph));
    return 0;
}

int cmd_bench(const std::string& query, const std::string& sweep, const std::string& methods, std::size_t trials,
              std::size_t reps, std::uint64_t seed, std::size_t threads, const std::string& out) {
    Loaded q = load(query);
    BenchOptions opt;
    opt.ms = parse_m_sweep(sweep);
    opt.methods = parse_methods(methods);
    opt.trials = trials;
    opt.repetitions = reps;
    opt.seed = seed;
    opt.threads = threads;
    if (trials == 0) throw UsageError("--trials must be positive");

    auto relations = load_relations(q.spec, q.graph);
    double exact = exact_cardinality(relations, q.graph);
    BenchResult result = run_bench(q.graph, relations, exact, opt);

    std::ofstream f(out, std::ios::binary);
    if (!f) throw DataError("cannot write " + out);
    write_bench_csv(f, result);
    if (!f) throw DataError("write failed: " + out);
    for (const auto& s : result.slopes)
        std::cerr << to_string(s.method) << " log-log slope " << s.slope << '\n';
    return 0;
}

int cmd_throughput(const std::string& query, const std::string& sweep, const std::string& methods,
                   std::size_t reps, std::uint64_t seed, double max_seconds, const std::string& out) {
    Loaded q = load(query);
    auto ms = parse_m_sweep(sweep);
    auto ms_methods = parse_methods(methods);
    auto relations = load_relations(q.spec, q.graph);
    std::size_t largest = 0;
    for (std::size_t k = 1; k < relations.size(); ++k)
        if (relations[k].size() > relations[largest].size()) largest = k;

    auto rows = run_throughput(q.graph, relations[largest], ms, ms_methods, reps, seed, max_seconds);
    if (out.empty() || out == "-") {
        write_throughput_csv(std::cout, rows);
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw DataError("cannot write " + out);
        write_throughput_csv(f, rows);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Join cardinality estimation with convolution and AMS sketches"};
    app.require_subcommand(1);

    std::string query, out, method = "conv", m_text = "1024", sketches, path, est_method;
    std::string sweep = "2^6..2^14:2", methods = "conv";
    std::size_t reps = 5, trials = 30, threads = 0;
    std::uint64_t seed = 0;
    double max_seconds = 10.0;

    auto* sk = app.add_subcommand("sketch", "Sketch every relation of a query into a sketch file");
    flag(sk, "--query", query, "Query JSON")->required();
    flag(sk, "--m", m_text, "Bins per repetition (integer or 2^k)");
    flag(sk, "--reps", reps, "Repetitions");
    flag(sk, "--seed", seed, "Master seed");
    flag(sk, "--method", method, "conv or ams");
    flag(sk, "--out", out, "Output sketch file")->required();

    auto* est = app.add_subcommand("estimate", "Estimate the join size from a sketch file");
    flag(est, "--sketches", sketches, "Sketch file")->required();
    flag(est, "--query", query, "Query JSON")->required();
    flag(est, "--path", path, "Conv inference path: fft or naive");
    flag(est, "--method", est_method, "Expected sketch method");

    auto* ex = app.add_subcommand("exact", "Exact join size");
    flag(ex, "--query", query, "Query JSON")->required();

    auto* bench = app.add_subcommand("bench", "Error versus m over repeated trials, as CSV");
    flag(bench, "--query", query, "Query JSON")->required();
    flag(bench, "--m-sweep", sweep, "m values: 2^A..2^B[:step] or a comma list");
    flag(bench, "--trials", trials, "Trials per (method, m)");
    flag(bench, "--methods", methods, "Comma-separated methods");
    flag(bench, "--reps", reps, "Repetitions per sketch");
    flag(bench, "--seed", seed, "Base seed");
    flag(bench, "--threads", threads, "Worker threads, 0 for all cores");
    flag(bench, "--out", out, "Output CSV")->required();

    auto* tp = app.add_subcommand("throughput", "Sketch update rate on the largest relation");
    flag(tp, "--query", query, "Query JSON")->required();
    flag(tp, "--m-sweep", sweep, "m values");
    flag(tp, "--methods", methods, "Comma-separated methods");
    flag(tp, "--reps", reps, "Repetitions");
    flag(tp, "--seed", seed, "Seed");
    flag(tp, "--max-seconds", max_seconds, "Time limit per (method, m)");
    flag(tp, "--out", out, "Output CSV, stdout by default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*sk) return cmd_sketch(query, m_text, reps, seed, method, out);
        if (*est) return cmd_estimate(sketches, query, path, est_method);
        if (*ex) return cmd_exact(query);
        if (*bench) return cmd_bench(query, sweep, methods, trials, reps, seed, threads, out);
        if (*tp) return cmd_throughput(query, sweep, methods, reps, seed, max_seconds, out);
    } catch (const Error& e) {
        std::cerr << "jsk: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "jsk: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
