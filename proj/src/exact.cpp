#include "jsk/exact.hpp"

#include <functional>
#include <unordered_map>

#include "jsk/error.hpp"

namespace jsk {

namespace {

void check_relations(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph) {
    if (relations.size() != graph.relation_count())
        throw QueryError("expected data for " + std::to_string(graph.relation_count()) + " relations");
    for (std::size_t k = 0; k < relations.size(); ++k)
        for (const auto& t : relations[k])
            if (t.values.size() != graph.omega(k).size())
                throw QueryError("tuple of relation " + graph.relation_name(k) + " has the wrong arity");
}

}  // namespace

FrequencyTable frequencies(std::span<const TupleUpdate> stream) {
    FrequencyTable table;
    for (const auto& t : stream) table[t.values] += t.delta;
    std::erase_if(table, [](const auto& kv) { return kv.second == 0.0; });
    return table;
}

double frequency_norm(std::span<const TupleUpdate> stream) {
    double total = 0.0;
    for (const auto& [tuple, f] : frequencies(stream)) total += f * f;
    return total;
}

std::vector<double> frequency_norms(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph) {
    check_relations(relations, graph);
    std::vector<double> out;
    for (const auto& rel : relations) out.push_back(frequency_norm(rel));
    return out;
}

double exact_cardinality_nested(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph,
                                double budget) {
    check_relations(relations, graph);
    std::vector<std::vector<std::pair<std::vector<std::uint64_t>, double>>> tables;
    double combos = 1.0;
    for (const auto& rel : relations) {
        auto t = frequencies(rel);
        combos *= static_cast<double>(t.size());
        tables.emplace_back(t.begin(), t.end());
    }
    if (combos > budget)
        throw BudgetError("nested-loop join needs " + std::to_string(combos) + " combinations");

    const std::size_t r = tables.size();
    std::vector<std::size_t> pick(r, 0);
    double total = 0.0;
    std::function<void(std::size_t, double)> loop = [&](std::size_t k, double weight) {
        if (k == r) {
            for (auto [u, v] : graph.edges()) {
                const auto& tu = tables[graph.relation_of(u)][pick[graph.relation_of(u)]].first;
                const auto& tv = tables[graph.relation_of(v)][pick[graph.relation_of(v)]].first;
                if (tu[graph.position_in_relation(u)] != tv[graph.position_in_relation(v)]) return;
            }
            total += weight;
            return;
        }
        for (std::size_t i = 0; i < tables[k].size(); ++i) {
            pick[k] = i;
            loop(k + 1, weight * tables[k][i].second);
        }
    };
    loop(0, 1.0);
    return total;
}

double exact_cardinality_hash(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph) {
    check_relations(relations, graph);
    const std::size_t r = relations.size();
    std::vector<FrequencyTable> tables;
    for (const auto& rel : relations) tables.push_back(frequencies(rel));

    // Relation adjacency: (neighbour relation, my attribute, its attribute).
    struct Link {
        std::size_t relation;
        std::size_t mine;
        std::size_t theirs;
    };
    std::vector<std::vector<Link>> links(r);
    for (auto [u, v] : graph.edges()) {
        links[graph.relation_of(u)].push_back({graph.relation_of(v), u, v});
        links[graph.relation_of(v)].push_back({graph.relation_of(u), v, u});
    }

    using Message = std::unordered_map<std::uint64_t, double>;

    // Message from k towards `from`: per value of key_attr, the summed weight
    // of k's tuples times the messages of k's own subtree.
    std::function<Message(std::size_t, std::size_t, std::size_t)> message =
        [&](std::size_t k, std::size_t from, std::size_t key_attr) -> Message {
        std::vector<std::pair<std::size_t, Message>> children;
        for (const auto& link : links[k]) {
            if (link.relation == from) continue;
            children.emplace_back(graph.position_in_relation(link.mine), message(link.relation, k, link.theirs));
        }
        Message out;
        const std::size_t key_pos = graph.position_in_relation(key_attr);
        for (const auto& [tuple, f] : tables[k]) {
            double w = f;
            for (const auto& [pos, msg] : children) {
                auto it = msg.find(tuple[pos]);
                w = it == msg.end() ? 0.0 : w * it->second;
                if (w == 0.0) break;
            }
            if (w != 0.0) out[tuple[key_pos]] += w;
        }
        return out;
    };

    std::vector<std::pair<std::size_t, Message>> children;
    for (const auto& link : links[0])
        children.emplace_back(graph.position_in_relation(link.mine), message(link.relation, 0, link.theirs));
    double total = 0.0;
    for (const auto& [tuple, f] : tables[0]) {
        double w = f;
        for (const auto& [pos, msg] : children) {
            auto it = msg.find(tuple[pos]);
            w = it == msg.end() ? 0.0 : w * it->second;
            if (w == 0.0) break;
        }
        total += w;
    }
    return total;
}

double exact_cardinality(std::span<const std::vector<TupleUpdate>> relations, const JoinGraph& graph) {
    check_relations(relations, graph);
    double combos = 1.0;
    for (const auto& rel : relations) combos *= static_cast<double>(frequencies(rel).size());
    if (combos <= 1e8) return exact_cardinality_nested(relations, graph);
    return exact_cardinality_hash(relations, graph);
}

}  // namespace jsk
