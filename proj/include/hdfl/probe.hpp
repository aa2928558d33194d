#pragma once

#include <iosfwd>
#include <optional>

#include "hdfl/basis.hpp"
#include "hdfl/dataset.hpp"
#include "hdfl/model.hpp"

namespace hdfl {

/// Exact Euclidean distance |w.x + b| / ||w|| from x to the discriminant.
double margin_linear(const LinearModel& model, const Vec& x);

/// Discriminant geometry near an anchor: how many locally affine
/// hyperplanes pass within `radius`, and how many independent directions
/// they span.
struct ComplexityReport {
    Vec anchor;
    double radius = 0.0;
    int nearby_count = 0;
    int independent_count = 0;
    double ratio = 0.0; // independent_count / N
    bool is_locally_complex = false;
};

/// Hyperplanes considered: for an MLP, every hidden unit's frozen-pattern
/// pre-activation boundary plus the output boundary; for a linear model the
/// single discriminant; for a tree every split plane x[f] = t. Normals are
/// unit-normalized before the rank computation, and singular values below
/// 1e-8 of the largest count as zero, so the count is invariant under
/// duplication and rescaling of hyperplanes.
ComplexityReport local_complexity(const Model& model, const Vec& x, double radius,
                                  double rho = 0.25);

/// Distances of all candidate hyperplanes from x (unsorted); the "auto"
/// radius used by the CLI is the median of these.
std::vector<double> hyperplane_distances(const Model& model, const Vec& x);

struct OffManifoldDecomposition {
    Vec w_parallel;
    Vec w_perpendicular;
    double shrink_factor = 0.0; // ||w_parallel|| / ||w||
    double angle = 0.0;         // arccos(shrink_factor)
};

/// Splits the weight vector across the manifold's span. For any x in the
/// span, margin_linear(model, x) equals shrink_factor times the margin of
/// the parallel-only model (w_parallel, b).
OffManifoldDecomposition off_manifold_decomposition(const LinearModel& model, const Basis& basis);

struct FragilityStats {
    std::vector<double> margins; // one per data point, in dataset order
    double min_margin = 0.0;
    double epsilon = 0.0;
    double frac_below_epsilon = 0.0;
    /// ||w_parallel|| / ||w|| when the dataset carries a manifold basis.
    std::optional<double> shrink_factor;

    /// Fraction of margins strictly below eps; nondecreasing in eps.
    double frac_below(double eps) const;
};

FragilityStats fragility_stats(const LinearModel& model, const Dataset& data, double epsilon);

/// CSV with header point_index,margin,label.
void write_margins_csv(std::ostream& out, const FragilityStats& stats,
                       const std::vector<int>& labels);

} // namespace hdfl
