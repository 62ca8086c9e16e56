#include <doctest.h>

#include <cmath>
#include <random>

#include "jsk/convolution.hpp"
#include "jsk/error.hpp"
#include "jsk/estimator.hpp"
#include "test_support.hpp"

using namespace jsk;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Eigen::VectorXd row(const RelationSketch& s, std::size_t rep) {
    return s.counters.row(static_cast<Eigen::Index>(rep)).transpose();
}

}  // namespace

TEST_CASE("circular convolution examples") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(5), y = Eigen::VectorXd::Zero(5);
    x(2) = -1;
    y(3) = 1;
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(5);
    expected(0) = -1;
    CHECK(circ_convolve(x, y) == expected);

    Eigen::VectorXd a = vec({1, 2, 0}), b = vec({0, 1, 1});
    CHECK(circ_convolve(a, b) == vec({2, 1, 3}));
    CHECK(circ_convolve(a, Eigen::VectorXd::Unit(3, 0)) == a);
    CHECK_THROWS_AS(circ_convolve(a, Eigen::VectorXd::Zero(4)), UsageError);
}

TEST_CASE("circular cross-correlation examples") {
    Eigen::VectorXd a = vec({1, 2, 0}), b = vec({0, 1, 1});
    CHECK(circ_cross_correlate(a, b) == vec({2, 3, 1}));
    CHECK(circ_cross_correlate(Eigen::VectorXd::Unit(3, 0), b) == b);
    Eigen::VectorXd r = vec({3, -1, 4, 1, -5, 9});
    CHECK(circ_cross_correlate(r, r)(0) == r.squaredNorm());
    CHECK_THROWS_AS(circ_cross_correlate(a, Eigen::VectorXd::Zero(2)), UsageError);
}

TEST_CASE("FFT paths agree with the definitions up to m = 4096") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-10, 10);
    CircularOps<double> ops;
    for (Eigen::Index m : {1, 2, 3, 4, 5, 7, 8, 12, 16, 17, 31, 64, 100, 127, 256, 1000, 1024, 4096}) {
        Eigen::VectorXd x(m), y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            x(i) = d(rng);
            y(i) = d(rng);
        }
        auto conv = testing::naive_convolve(x, y);
        auto corr = testing::naive_cross_correlate(x, y);
        CAPTURE(m);
        CHECK((ops.convolve_fft(x, y) - conv).cwiseAbs().maxCoeff() <= 1e-9 * (1 + conv.cwiseAbs().maxCoeff()));
        CHECK((ops.cross_correlate_fft(x, y) - corr).cwiseAbs().maxCoeff() <=
              1e-9 * (1 + corr.cwiseAbs().maxCoeff()));
        CHECK((ops.convolve(x, y) - conv).cwiseAbs().maxCoeff() <= 1e-9 * (1 + conv.cwiseAbs().maxCoeff()));
        CHECK((ops.cross_correlate(x, y) - corr).cwiseAbs().maxCoeff() <= 1e-9 * (1 + corr.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("float scalar convolution") {
    Eigen::VectorXf a(3), b(3);
    a << 1, 2, 0;
    b << 0, 1, 1;
    Eigen::VectorXf c = circ_convolve(a, b);
    CHECK(c(0) == 2.0f);
    CHECK(c(1) == 1.0f);
    CHECK(c(2) == 3.0f);
    CircularOps<float> ops;
    Eigen::VectorXf big = Eigen::VectorXf::Ones(64);
    CHECK(std::abs(ops.cross_correlate(big, big)(5) - 64.0f) < 1e-3f);
}

TEST_CASE("naive_estimate special cases") {
    std::mt19937_64 rng(4);
    auto g = testing::star4_graph();

    SketchConfig one{1, 2, 0, Method::conv};
    auto s1 = testing::random_sketches(rng, g, one);
    for (std::size_t rep = 0; rep < 2; ++rep) {
        double prod = 1;
        for (const auto& s : s1) prod *= s.counters(static_cast<Eigen::Index>(rep), 0);
        CHECK(naive_estimate(s1, g, rep) == prod);
    }

    SketchConfig six{6, 1, 0, Method::conv};
    auto s6 = testing::random_sketches(rng, g, six);
    double expected = 0;
    for (int j0 = 0; j0 < 6; ++j0)
        for (int j1 = 0; j1 < 6; ++j1)
            expected += s6[0].counters(0, j0) * s6[2].counters(0, j0) * s6[1].counters(0, (j0 + j1) % 6) *
                        s6[3].counters(0, j1);
    CHECK(naive_estimate(s6, g, 0) == expected);

    auto pg = testing::pair_graph();
    auto sp = testing::random_sketches(rng, pg, six);
    CHECK(naive_estimate(sp, pg, 0) == row(sp[0], 0).dot(row(sp[1], 0)));
}

TEST_CASE("naive_estimate refuses oversized enumerations") {
    auto g = JoinGraph::make({1, 2, 2, 1}, {{0, 1}, {2, 3}, {4, 5}});
    REQUIRE(g.component_count() == 3);
    SketchConfig big{256, 1, 0, Method::conv};
    std::vector<RelationSketch> sk;
    for (std::size_t k = 0; k < 4; ++k) sk.emplace_back(k, g.relation_name(k), big);
    CHECK_THROWS_AS(naive_estimate(sk, g, 0), BudgetError);
}

TEST_CASE("combine_sketches on two relations is the element-wise product") {
    std::mt19937_64 rng(6);
    auto g = testing::pair_graph();
    auto sk = testing::random_sketches(rng, g, {32, 1, 0, Method::conv});
    for (std::size_t root : {0, 1}) {
        Eigen::VectorXd combined = combine_sketches(traversal_plan(g, root), sk, 0);
        CHECK(combined == row(sk[0], 0).cwiseProduct(row(sk[1], 0)));
    }
}

TEST_CASE("combine_sketches matches naive_estimate on the example query for every root") {
    std::mt19937_64 rng(8);
    auto g = testing::star4_graph();
    for (std::uint64_t m : {1u, 2u, 3u, 5u, 8u, 16u}) {
        auto sk = testing::random_sketches(rng, g, {m, 1, 0, Method::conv});
        double naive = naive_estimate(sk, g, 0);
        for (std::size_t root = 0; root < g.attribute_count(); ++root) {
            double fast = combine_sketches(traversal_plan(g, root), sk, 0).sum();
            CAPTURE(m);
            CAPTURE(root);
            CHECK(std::abs(fast - naive) <= 1e-9 * (1 + std::abs(naive)));
        }
    }
}

TEST_CASE("a zero sketch zeroes the combination") {
    std::mt19937_64 rng(10);
    auto g = testing::star4_graph();
    for (std::size_t zero = 0; zero < g.relation_count(); ++zero) {
        auto sk = testing::random_sketches(rng, g, {8, 1, 0, Method::conv});
        sk[zero].counters.setZero();
        CHECK(combine_sketches(traversal_plan(g, 4), sk, 0).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("estimate reports the median of the repetitions") {
    std::mt19937_64 rng(12);
    auto g = testing::chain3_graph();

    std::vector<RelationSketch> zeros;
    for (std::size_t k = 0; k < 3; ++k) zeros.emplace_back(k, g.relation_name(k), SketchConfig{8, 5, 0, Method::conv});
    CHECK(estimate(zeros, g, traversal_plan(g)).estimate == 0.0);

    auto single = testing::random_sketches(rng, g, {8, 1, 0, Method::conv});
    auto r1 = estimate(single, g, traversal_plan(g));
    REQUIRE(r1.per_repetition.size() == 1);
    CHECK(r1.estimate == r1.per_repetition[0]);

    auto five = testing::random_sketches(rng, g, {8, 5, 0, Method::conv});
    auto fft = estimate(five, g, traversal_plan(g), InferencePath::fft);
    auto naive = estimate(five, g, traversal_plan(g), InferencePath::naive);
    CHECK(fft.per_repetition.size() == 5);
    CHECK(fft.estimate >= *std::min_element(fft.per_repetition.begin(), fft.per_repetition.end()));
    CHECK(fft.estimate <= *std::max_element(fft.per_repetition.begin(), fft.per_repetition.end()));
    CHECK(std::abs(fft.estimate - naive.estimate) <= 1e-9 * (1 + std::abs(naive.estimate)));
}

TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK(median({7}) == 7);
    CHECK_THROWS_AS(median({}), UsageError);
}

TEST_CASE("estimate rejects mismatched inputs") {
    std::mt19937_64 rng(14);
    auto g = testing::chain3_graph();
    auto sk = testing::random_sketches(rng, g, {8, 2, 0, Method::conv});
    auto plan = traversal_plan(g);
    auto missing = sk;
    missing.pop_back();
    CHECK_THROWS_AS(estimate(missing, g, plan), QueryError);
    auto ams = sk;
    for (auto& s : ams) s.config.method = Method::ams;
    CHECK_THROWS_AS(estimate(ams, g, plan), QueryError);
    auto mixed = sk;
    mixed[1].config.seed = 99;
    CHECK_THROWS_AS(estimate(mixed, g, plan), QueryError);
}

TEST_CASE("required_bins") {
    CHECK(required_bins(1.0, 2, 10.0) == 90);
    CHECK(required_bins(0.5, 3, 4.0) == 432);
    CHECK(required_bins(0.5, 2, 10.0) == 4 * required_bins(1.0, 2, 10.0));
    CHECK_THROWS_AS(required_bins(0.0, 2, 1.0), UsageError);
}
