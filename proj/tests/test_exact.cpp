#include <doctest.h>

#include <algorithm>
#include <random>

#include "jsk/error.hpp"
#include "jsk/exact.hpp"
#include "test_support.hpp"

using namespace jsk;

namespace {

std::vector<TupleUpdate> column(std::size_t rel, std::initializer_list<std::uint64_t> xs) {
    std::vector<TupleUpdate> out;
    for (auto x : xs) out.push_back({rel, {x}, 1.0});
    return out;
}

}  // namespace

TEST_CASE("two-relation join counts matching pairs") {
    auto g = testing::pair_graph();
    std::vector<std::vector<TupleUpdate>> rel{column(0, {1, 1, 2}), column(1, {1, 2, 2})};
    CHECK(exact_cardinality_nested(rel, g) == 4.0);
    CHECK(exact_cardinality_hash(rel, g) == 4.0);
    CHECK(exact_cardinality(rel, g) == 4.0);
    rel[1].clear();
    CHECK(exact_cardinality(rel, g) == 0.0);
}

TEST_CASE("all-ones example query joins once") {
    auto g = testing::star4_graph();
    std::vector<std::vector<TupleUpdate>> rel{
        {{0, {1}, 1.0}}, {{1, {1, 1}, 1.0}}, {{2, {1}, 1.0}}, {{3, {1}, 1.0}}};
    CHECK(exact_cardinality_nested(rel, g) == 1.0);
    CHECK(exact_cardinality_hash(rel, g) == 1.0);
}

TEST_CASE("frequencies and norms") {
    auto t = column(0, {1, 2, 2});
    CHECK(frequency_norm(t) == 5.0);
    std::vector<TupleUpdate> distinct;
    for (std::uint64_t i = 0; i < 17; ++i) distinct.push_back({0, {i}, 1.0});
    CHECK(frequency_norm(distinct) == 17.0);
    t.push_back({0, {1}, -1.0});
    t.push_back({0, {2}, -2.0});
    CHECK(frequencies(t).empty());
    CHECK(frequency_norm(t) == 0.0);
}

TEST_CASE("deletions enter the join with their sign") {
    auto g = testing::pair_graph();
    std::vector<std::vector<TupleUpdate>> rel{column(0, {3, 3, 4}), column(1, {3, 4})};
    rel[0].push_back({0, {3}, -1.0});
    CHECK(exact_cardinality_nested(rel, g) == 2.0);
    CHECK(exact_cardinality_hash(rel, g) == 2.0);
}

TEST_CASE("nested and hash paths agree on random workloads") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 40; ++i) {
        auto g = testing::random_graph(rng);
        auto rel = testing::random_relations(rng, g, 12, 4, 1.0);
        double a = exact_cardinality_nested(rel, g);
        double b = exact_cardinality_hash(rel, g);
        CHECK(a == b);
        for (auto& r : rel) std::shuffle(r.begin(), r.end(), rng);
        CHECK(exact_cardinality_hash(rel, g) == b);
    }
}

TEST_CASE("nested loop respects its budget") {
    auto g = testing::pair_graph();
    std::vector<std::vector<TupleUpdate>> rel(2);
    for (std::uint64_t i = 0; i < 200; ++i) {
        rel[0].push_back({0, {i}, 1.0});
        rel[1].push_back({1, {i}, 1.0});
    }
    CHECK_THROWS_AS(exact_cardinality_nested(rel, g, 1000.0), BudgetError);
    CHECK(exact_cardinality_nested(rel, g) == 200.0);
}
