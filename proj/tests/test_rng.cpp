#include <doctest.h>

#include <cmath>

#include "hdfl/rng.hpp"

using namespace hdfl;

TEST_CASE("identical seed specs give bit-identical streams") {
    Rng a(SeedSpec{42, 7});
    Rng b(SeedSpec{42, 7});
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different stream ids decorrelate") {
    Rng a(SeedSpec{42, 0});
    Rng b(SeedSpec{42, 1});
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("substreams are independent of draw position") {
    Rng parent(SeedSpec{123, 0});
    Rng child_before = parent.substream(5);
    parent.next_u64();
    parent.next_u64();
    Rng child_after = parent.substream(5);
    CHECK(child_before.next_u64() == child_after.next_u64());
}

TEST_CASE("uniform draws live in [0,1) and the open variant in (0,1]") {
    Rng rng(SeedSpec{9, 0});
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.next_uniform_open();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gaussian moments at Monte Carlo accuracy") {
    Rng rng(SeedSpec{2024, 0});
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("next_below is unbiased over a small modulus") {
    Rng rng(SeedSpec{77, 0});
    int counts[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 50000; ++i) ++counts[rng.next_below(5)];
    for (int c : counts) CHECK(std::fabs(c - 10000.0) < 500.0);
}

TEST_CASE("mix_seed is sensitive to both arguments") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(0, 0) != 0);
}
