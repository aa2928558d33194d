#include <doctest.h>

#include <cmath>

#include "hdfl/dataset.hpp"
#include "hdfl/errors.hpp"
#include "hdfl/lid.hpp"

using namespace hdfl;

namespace {

double off_manifold_residual(const Dataset& data) {
    REQUIRE(data.manifold.has_value());
    REQUIRE(data.manifold->basis.has_value());
    double worst = 0.0;
    for (const Vec& p : data.points)
        worst = std::max(worst, norm(decompose(p, *data.manifold->basis).perpendicular));
    return worst;
}

} // namespace

TEST_CASE("subspace gaussians stay exactly on the manifold") {
    SUBCASE("N=2 M=1, means +-3 (the low-dimensional picture)") {
        const ManifoldSpec spec = subspace_gaussians_spec(2, 1, 1.0, 6.0);
        const Dataset data = generate_subspace_gaussians(spec, 50, SeedSpec{7, 0});
        CHECK(data.size() == 100);
        CHECK(off_manifold_residual(data) < 1e-12);
        // Means sit 6 sigma apart along the first intrinsic axis.
        CHECK(data.manifold->mean_minus[0] == -3.0);
        CHECK(data.manifold->mean_plus[0] == 3.0);
    }
    SUBCASE("large N") {
        const ManifoldSpec spec = subspace_gaussians_spec(200, 3);
        const Dataset data = generate_subspace_gaussians(spec, 20, SeedSpec{8, 0});
        CHECK(off_manifold_residual(data) < 1e-12);
    }
}

TEST_CASE("zero covariance scale collapses each class to its mean") {
    ManifoldSpec spec = subspace_gaussians_spec(5, 2, 0.0);
    spec.mean_minus = {-3.0, 0.0};
    spec.mean_plus = {3.0, 0.0};
    const Dataset data = generate_subspace_gaussians(spec, 10, SeedSpec{3, 0});
    const Vec lo = embed(*data.manifold->basis, spec.mean_minus);
    const Vec hi = embed(*data.manifold->basis, spec.mean_plus);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec& want = data.labels[i] < 0 ? lo : hi;
        CHECK(distance(data.points[i], want) == 0.0);
    }
}

TEST_CASE("empirical class means land within 5 standard errors") {
    const int n = 200;
    const ManifoldSpec spec = subspace_gaussians_spec(500, 2, 1.0, 6.0);
    const Dataset data = generate_subspace_gaussians(spec, n, SeedSpec{21, 0});
    // Compare in intrinsic coordinates: project onto the basis columns.
    const Basis& basis = *data.manifold->basis;
    for (int cls = 0; cls < 2; ++cls) {
        const Vec& target = cls == 0 ? data.manifold->mean_minus : data.manifold->mean_plus;
        Vec sum(2, 0.0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] != (cls == 0 ? -1 : 1)) continue;
            for (std::size_t j = 0; j < basis.columns.size(); ++j)
                sum[j] += dot(basis.columns[j], data.points[i]);
        }
        const double stderr_coord = 1.0 / std::sqrt(static_cast<double>(n));
        for (std::size_t j = 0; j < sum.size(); ++j)
            CHECK(std::fabs(sum[j] / n - target[j]) < 5.0 * stderr_coord);
    }
}

TEST_CASE("generators are bit-deterministic") {
    const ManifoldSpec spec = subspace_gaussians_spec(30, 2);
    const Dataset a = generate_subspace_gaussians(spec, 25, SeedSpec{100, 4});
    const Dataset b = generate_subspace_gaussians(spec, 25, SeedSpec{100, 4});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.labels[i] == b.labels[i]);
        for (std::size_t j = 0; j < a.points[i].size(); ++j)
            CHECK(a.points[i][j] == b.points[i][j]);
    }
}

TEST_CASE("sphere points sit exactly on their class radius") {
    const ManifoldSpec spec = concentric_spheres_spec(10, 1.0, 1.3);
    const Dataset data = generate_concentric_spheres(spec, 100, SeedSpec{5, 0});
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double want = data.labels[i] < 0 ? 1.0 : 1.3;
        CHECK(std::fabs(norm(data.points[i]) - want) < 1e-10);
    }
}

TEST_CASE("one point per class is allowed") {
    const ManifoldSpec spec = concentric_spheres_spec(4);
    const Dataset data = generate_concentric_spheres(spec, 1, SeedSpec{1, 0});
    REQUIRE(data.size() == 2);
    CHECK(data.labels[0] != data.labels[1]);
}

TEST_CASE("sphere generator validates radii") {
    ManifoldSpec spec = concentric_spheres_spec(4, -1.0, 1.0);
    CHECK_THROWS_AS(generate_concentric_spheres(spec, 5, SeedSpec{0, 0}), data_error);
    spec = concentric_spheres_spec(4, 1.3, 1.0);
    CHECK_THROWS_AS(generate_concentric_spheres(spec, 5, SeedSpec{0, 0}), data_error);
}

TEST_CASE("same-class sphere directions concentrate near orthogonality") {
    const int n_dim = 100;
    const ManifoldSpec spec = concentric_spheres_spec(n_dim, 1.0, 1.3);
    const Dataset data = generate_concentric_spheres(spec, 1000, SeedSpec{17, 0});
    double sum = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < 1000; i += 7)
        for (std::size_t j = i + 1; j < 1000; j += 13) {
            sum += dot(data.points[i], data.points[j]); // both unit radius
            ++pairs;
        }
    CHECK(std::fabs(sum / static_cast<double>(pairs)) < 3.0 / std::sqrt(static_cast<double>(n_dim)));
}

TEST_CASE("noiseless folded curve lies on the parametric hairpin") {
    ManifoldSpec spec = folded_curve_spec(3, 1.0, 4.0, 0.0);
    const Dataset data = generate_folded_curve(spec, 100, SeedSpec{12, 0});
    const ManifoldSpec& actual = *data.manifold;
    // Every point must be within 1e-10 of the curve: scan the parameter.
    for (const Vec& p : data.points) {
        double best = 1e9;
        for (int t = 0; t <= 4000; ++t)
            best = std::min(best, distance(p, folded_curve_point(actual, t / 4000.0)));
        CHECK(best < 2e-3); // scan resolution; refined below
    }
    // Refine one point with a fine local scan to certify 1e-10 residency.
    const Vec& p = data.points[0];
    double coarse_best = 1e9, coarse_at = 0.0;
    for (int t = 0; t <= 40000; ++t) {
        const double d = distance(p, folded_curve_point(actual, t / 40000.0));
        if (d < coarse_best) {
            coarse_best = d;
            coarse_at = t / 40000.0;
        }
    }
    double lo = std::max(0.0, coarse_at - 1e-3), hi = std::min(1.0, coarse_at + 1e-3);
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (distance(p, folded_curve_point(actual, m1)) < distance(p, folded_curve_point(actual, m2)))
            hi = m2;
        else
            lo = m1;
    }
    CHECK(distance(p, folded_curve_point(actual, 0.5 * (lo + hi))) < 1e-10);
}

TEST_CASE("hairpin endpoints: anti-parallel arms sit one gap apart, opened arms a segment apart") {
    ManifoldSpec closed = folded_curve_spec(3, 1.0, 4.0);
    closed.basis = random_orthonormal_basis(3, 2, SeedSpec{2, 0});
    CHECK(distance(folded_curve_point(closed, 0.0), folded_curve_point(closed, 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-9));

    ManifoldSpec open = closed;
    open.spread_angle = 0.5235987755982988; // 30 degrees
    const double end_gap = distance(folded_curve_point(open, 0.0), folded_curve_point(open, 1.0));
    // 2 (r cos a + L sin a) = about the segment length, far from the gap.
    CHECK(end_gap == doctest::Approx(2.0 * (0.5 * std::cos(0.5235987755982988) +
                                            4.0 * std::sin(0.5235987755982988)))
                         .epsilon(1e-9));
    CHECK(end_gap > 4.0);
}

TEST_CASE("both classes meet near the fold") {
    const ManifoldSpec spec = folded_curve_spec(10, 1.0, 4.0);
    const Dataset data = generate_folded_curve(spec, 200, SeedSpec{6, 0});
    double best_cross = 1e9;
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = i + 1; j < data.size(); ++j)
            if (data.labels[i] != data.labels[j])
                best_cross = std::min(best_cross, distance(data.points[i], data.points[j]));
    CHECK(best_cross < 1.0); // within about the gap
}

TEST_CASE("folded curve rejects non-positive gap") {
    ManifoldSpec spec = folded_curve_spec(5, 0.0);
    CHECK_THROWS_AS(generate_folded_curve(spec, 10, SeedSpec{0, 0}), data_error);
}

TEST_CASE("twonn sees the folded curve as one-dimensional") {
    const ManifoldSpec spec = folded_curve_spec(50, 1.0, 4.0, 0.0);
    const Dataset data = generate_folded_curve(spec, 250, SeedSpec{31, 0});
    const LidEstimate est = twonn(data);
    CHECK(est.value > 0.8);
    CHECK(est.value < 1.6);
}

TEST_CASE("dataset JSON round-trips bit-exactly with the specified fields") {
    const ManifoldSpec spec = subspace_gaussians_spec(6, 2);
    const Dataset data = generate_subspace_gaussians(spec, 5, SeedSpec{44, 0});
    const std::string text = dataset_to_json(data);
    for (const char* field : {"\"ambient_dim\"", "\"intrinsic_dim\"", "\"basis\"", "\"points\"",
                              "\"labels\"", "\"seed\"", "\"kind\""})
        CHECK(text.find(field) != std::string::npos);

    const Dataset back = dataset_from_json(text);
    REQUIRE(back.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(back.labels[i] == data.labels[i]);
        for (std::size_t j = 0; j < data.points[i].size(); ++j)
            CHECK(back.points[i][j] == data.points[i][j]);
    }
    CHECK(dataset_to_json(back) == text);
}
