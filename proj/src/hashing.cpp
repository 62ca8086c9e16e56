#include "jsk/hashing.hpp"

#include "jsk/error.hpp"
#include "jsk/join_graph.hpp"
#include "jsk/sketch.hpp"

namespace jsk {

CoefficientStream::CoefficientStream(std::uint64_t seed, HashKind kind, std::uint64_t id,
                                     std::uint64_t repetition, std::uint64_t counter) noexcept
    : key_(splitmix64(prefix(seed, kind, id, repetition) ^ counter)) {}

std::uint64_t CoefficientStream::prefix(std::uint64_t seed, HashKind kind, std::uint64_t id,
                                        std::uint64_t repetition) noexcept {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ static_cast<std::uint64_t>(kind));
    k = splitmix64(k ^ id);
    return splitmix64(k ^ repetition);
}

CoefficientStream CoefficientStream::from_prefix(std::uint64_t prefix, std::uint64_t counter) noexcept {
    CoefficientStream s;
    s.key_ = splitmix64(prefix ^ counter);
    return s;
}

std::uint64_t CoefficientStream::next() noexcept {
    // Top 61 bits are uniform on [0, 2^61); rejecting 2^61 - 1 leaves [0, p).
    for (;;) {
        std::uint64_t x = splitmix64(key_ + ctr_++) >> 3;
        if (x < mersenne::kPrime) return x;
    }
}

SignHash SignHash::derive(std::uint64_t seed, HashKind kind, std::uint64_t key, std::uint64_t repetition,
                          std::uint64_t counter) noexcept {
    CoefficientStream stream(seed, kind, key, repetition, counter);
    SignHash h;
    for (auto& c : h.coefficients) c = stream.next();
    h.repetition = repetition;
    return h;
}

HashSet derive_hash_set(const SketchConfig& config, const JoinGraph& graph) {
    config.validate();
    if (graph.edges().empty() || graph.component_count() == 0)
        throw QueryError("cannot derive hashes for a query without joins");

    HashSet set;
    set.repetitions = config.l;
    set.edge_count = graph.edges().size();
    set.component_count = graph.component_count();
    set.signs.reserve(set.repetitions * set.edge_count);
    set.bins.reserve(set.repetitions * set.component_count);

    for (std::size_t rep = 0; rep < config.l; ++rep) {
        for (std::size_t e = 0; e < set.edge_count; ++e) {
            auto [u, v] = graph.edges()[e];
            SignHash h = SignHash::derive(config.seed, HashKind::sign, edge_key(u, v), rep);
            h.edge = e;
            set.signs.push_back(h);
        }
        for (std::size_t c = 0; c < set.component_count; ++c) {
            CoefficientStream stream(config.seed, HashKind::bin, graph.component_label(c), rep);
            BinHash h;
            for (auto& coeff : h.coefficients) coeff = stream.next();
            h.component = c;
            h.repetition = rep;
            h.m = config.m;
            set.bins.push_back(h);
        }
    }
    return set;
}

}  // namespace jsk
