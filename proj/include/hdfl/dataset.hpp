#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "hdfl/basis.hpp"
#include "hdfl/rng.hpp"
#include "hdfl/vec.hpp"

namespace hdfl {

enum class ManifoldKind { subspace_gaussians, concentric_spheres, folded_curve };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

/// Parameters of a synthetic low-dimensional data distribution embedded in
/// R^N. Only the fields of the active kind are meaningful. When `basis` is
/// absent, generators derive one deterministically from their seed.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::subspace_gaussians;
    int ambient_dim = 2;
    int intrinsic_dim = 1;
    std::optional<Basis> basis;

    // subspace_gaussians: class means in intrinsic coordinates. When empty
    // they default to +-(separation * covariance_scale / 2) along the first
    // intrinsic axis, i.e. the classes sit `separation` standard deviations
    // apart ("well-separated" = 6 sigma by default).
    Vec mean_minus;
    Vec mean_plus;
    double covariance_scale = 1.0;
    double separation = 6.0;

    // concentric_spheres
    double inner_radius = 1.0;
    double outer_radius = 1.3;

    // folded_curve: a hairpin of two straight segments joined tangentially
    // by a circular arc of diameter `gap`. spread_angle opens the arms
    // (0 = exactly anti-parallel). Arc length is split at the apex: the
    // lower arm carries label -1, the upper +1.
    double gap = 1.0;
    double segment_length = 4.0;
    double spread_angle = 0.0;

    // Isotropic ambient Gaussian noise with E||eta||^2 = amplitude^2
    // (per-coordinate sigma = amplitude / sqrt(N)). Off by default: points
    // lie exactly on the manifold; gap/20 is a reasonable scale when a
    // noisy tube is wanted.
    double ambient_noise = 0.0;
};

ManifoldSpec subspace_gaussians_spec(int ambient_dim, int intrinsic_dim,
                                     double covariance_scale = 1.0, double separation = 6.0);
ManifoldSpec concentric_spheres_spec(int ambient_dim, double inner_radius = 1.0,
                                     double outer_radius = 1.3);
ManifoldSpec folded_curve_spec(int ambient_dim, double gap = 1.0, double segment_length = 4.0,
                               double ambient_noise = 0.0);

/// Labeled points in R^N plus the manifold they were drawn from.
struct Dataset {
    std::vector<Vec> points;
    std::vector<int> labels; // only -1 / +1
    std::optional<ManifoldSpec> manifold;
    std::uint64_t seed = 0;

    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
    std::size_t size() const { return points.size(); }
};

Dataset generate_subspace_gaussians(const ManifoldSpec& spec, int n_per_class, const SeedSpec& seed);
Dataset generate_concentric_spheres(const ManifoldSpec& spec, int n_per_class, const SeedSpec& seed);
Dataset generate_folded_curve(const ManifoldSpec& spec, int n_per_class, const SeedSpec& seed);
/// Dispatch on spec.kind.
Dataset generate_dataset(const ManifoldSpec& spec, int n_per_class, const SeedSpec& seed);

/// Hairpin centerline position for arc-length fraction t in [0, 1], in
/// ambient coordinates (uses the spec basis; spec.basis must be set).
Vec folded_curve_point(const ManifoldSpec& spec, double t);
/// Total arc length of the hairpin.
double folded_curve_length(const ManifoldSpec& spec);

/// JSON document with fields ambient_dim, intrinsic_dim, basis (list of
/// columns or null), points, labels, seed, kind.
std::string dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const std::string& text);
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace hdfl
