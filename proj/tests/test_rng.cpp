#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "osil/core/errors.hpp"
#include "osil/core/rng.hpp"

using namespace osil;

TEST_CASE("same seed reproduces the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(43);
    CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int is roughly uniform over its bins") {
    Rng rng(8);
    const int bins = 6, draws = 60000;
    std::vector<int> count(bins, 0);
    for (int i = 0; i < draws; ++i) {
        const int v = rng.uniform_int(bins);
        REQUIRE(v >= 0);
        REQUIRE(v < bins);
        ++count[v];
    }
    // Expected 10000 per bin; 500 is about five standard deviations.
    for (int c : count) CHECK(std::abs(c - draws / bins) < 500);
}

TEST_CASE("normal draws have the right first two moments") {
    Rng rng(9);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(close(var, 1.0, 0.0, 0.03));
}

TEST_CASE("categorical follows its weights and rejects bad input") {
    Rng rng(10);
    std::vector<double> w = {1.0, 0.0, 3.0};
    std::vector<int> count(3, 0);
    for (int i = 0; i < 40000; ++i) ++count[rng.categorical(w)];
    CHECK(count[1] == 0);
    CHECK(std::abs(count[0] - 10000) < 500);
    CHECK(std::abs(count[2] - 30000) < 500);
    CHECK_THROWS_AS(rng.categorical({1.0, -0.5}), NumericError);
    CHECK_THROWS_AS(rng.categorical({0.0, 0.0}), NumericError);
}

TEST_CASE("sample_without_replacement yields k distinct in-range indices") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> s = rng.sample_without_replacement(20, 7);
        REQUIRE(s.size() == 7);
        std::set<int> uniq(s.begin(), s.end());
        CHECK(uniq.size() == 7);
        for (int v : s) {
            CHECK(v >= 0);
            CHECK(v < 20);
        }
    }
    CHECK_THROWS_AS(rng.sample_without_replacement(3, 4), DataError);

    // Every element should appear at about k/n of the draws.
    std::vector<int> count(10, 0);
    const int trials = 30000;
    for (int t = 0; t < trials; ++t) {
        for (int v : rng.sample_without_replacement(10, 3)) ++count[v];
    }
    for (int c : count) CHECK(std::abs(c - trials * 3 / 10) < 500);
}

TEST_CASE("child streams are stable, label-dependent, and draw-independent") {
    Rng parent(123);
    Rng c1 = parent.child("policy");
    parent.next_u64();  // consuming the parent must not move children
    Rng c2 = parent.child("policy");
    CHECK(c1.next_u64() == c2.next_u64());

    Rng other = parent.child("critic");
    CHECK(parent.child("policy").next_u64() != other.next_u64());

    Rng i0 = parent.child("episode", 0);
    Rng i1 = parent.child("episode", 1);
    CHECK(i0.next_u64() != i1.next_u64());
    CHECK(parent.child("episode", 0).next_u64() == Rng(123).child("episode", 0).next_u64());
}
