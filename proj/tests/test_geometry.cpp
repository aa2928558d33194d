#include <doctest.h>

#include <cmath>

#include "hdfl/basis.hpp"
#include "hdfl/errors.hpp"

using namespace hdfl;

TEST_CASE("full-rank basis spans R^3 with identity Gram matrix") {
    const Basis basis = random_orthonormal_basis(3, 3, SeedSpec{1, 0});
    CHECK(basis.ambient_dim() == 3);
    CHECK(basis.intrinsic_dim() == 3);
    CHECK(gram_deviation(basis) < 1e-10);
    // Columns span the space: any vector reconstructs exactly.
    const Vec v{0.3, -1.2, 2.5};
    const Decomposition parts = decompose(v, basis);
    CHECK(norm(parts.perpendicular) < 1e-12);
}

TEST_CASE("basis generation is deterministic") {
    const Basis a = random_orthonormal_basis(2, 1, SeedSpec{5, 3});
    const Basis b = random_orthonormal_basis(2, 1, SeedSpec{5, 3});
    REQUIRE(a.columns.size() == b.columns.size());
    for (std::size_t j = 0; j < a.columns.size(); ++j)
        for (std::size_t i = 0; i < a.columns[j].size(); ++i)
            CHECK(a.columns[j][i] == b.columns[j][i]); // bit-identical
}

TEST_CASE("orthonormality defect stays below 1e-10 at N=100, M=5") {
    const Basis basis = random_orthonormal_basis(100, 5, SeedSpec{11, 0});
    CHECK(gram_deviation(basis) < 1e-10);
}

TEST_CASE("orthonormality holds across sizes") {
    int stream = 0;
    for (int n : {2, 10, 64, 300})
        for (int m : {1, 2, n / 2 > 0 ? n / 2 : 1, n}) {
            const Basis basis =
                random_orthonormal_basis(n, m, SeedSpec{99, static_cast<std::uint64_t>(stream++)});
            CHECK(gram_deviation(basis) < 1e-10);
        }
}

TEST_CASE("basis rejects M > N") {
    CHECK_THROWS_AS(random_orthonormal_basis(3, 4, SeedSpec{0, 0}), data_error);
    CHECK_THROWS_AS(random_orthonormal_basis(0, 0, SeedSpec{0, 0}), data_error);
}

TEST_CASE("axis-aligned decomposition") {
    Basis basis;
    basis.columns = {Vec{1.0, 0.0, 0.0}};
    const Decomposition parts = decompose(Vec{1.0, 0.0, 1.0}, basis);
    CHECK(parts.parallel == Vec{1.0, 0.0, 0.0});
    CHECK(parts.perpendicular == Vec{0.0, 0.0, 1.0});
}

TEST_CASE("vectors inside the span have zero perpendicular part") {
    const Basis basis = random_orthonormal_basis(20, 4, SeedSpec{3, 1});
    const Vec v = embed(basis, Vec{0.5, -2.0, 1.0, 3.0});
    const Decomposition parts = decompose(v, basis);
    CHECK(norm(parts.perpendicular) < 1e-12);
}

TEST_CASE("decomposition reconstructs v and is a projection") {
    const Basis basis = random_orthonormal_basis(50, 7, SeedSpec{8, 0});
    Rng rng(SeedSpec{8, 1});
    Vec v(50);
    for (double& x : v) x = rng.next_gaussian();

    const Decomposition parts = decompose(v, basis);
    CHECK(norm(sub(v, add(parts.parallel, parts.perpendicular))) < 1e-12);
    for (const Vec& col : basis.columns) CHECK(std::fabs(dot(col, parts.perpendicular)) < 1e-10);
    // Projecting the parallel part again leaves nothing perpendicular.
    CHECK(norm(decompose(parts.parallel, basis).perpendicular) < 1e-12);
}

TEST_CASE("decompose rejects dimension mismatch") {
    const Basis basis = random_orthonormal_basis(4, 2, SeedSpec{0, 0});
    CHECK_THROWS_AS(decompose(Vec{1.0, 2.0}, basis), data_error);
}
