#include "hdfl/probe.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hdfl/errors.hpp"
#include "hdfl/stats.hpp"

namespace hdfl {

double margin_linear(const LinearModel& model, const Vec& x) {
    const double len = norm(model.w);
    if (len == 0.0) throw numeric_error("margin_linear: zero weight vector");
    return std::fabs(decision_value(model, x)) / len;
}

namespace {

struct Candidate {
    Vec normal;
    double distance;
};

// Every locally affine hyperplane of the model together with its distance
// from x. Units whose normal vanishes under the frozen pattern define no
// hyperplane and are skipped.
std::vector<Candidate> candidate_hyperplanes(const Model& model, const Vec& x) {
    std::vector<Candidate> out;
    if (const auto* linear = std::get_if<LinearModel>(&model)) {
        out.push_back({linear->w, margin_linear(*linear, x)});
    } else if (const auto* mlp = std::get_if<MlpModel>(&model)) {
        for (const AffineUnit& unit : hidden_unit_affine_maps(*mlp, x)) {
            const double len = norm(unit.normal);
            if (len == 0.0) continue;
            out.push_back({unit.normal, std::fabs(dot(unit.normal, x) + unit.offset) / len});
        }
        const LocalLinearModel local = local_linear_model(*mlp, x);
        const double len = norm(local.w_eff);
        if (len > 0.0)
            out.push_back({local.w_eff, std::fabs(dot(local.w_eff, x) + local.b_eff) / len});
    } else {
        const TreeModel& tree = std::get<TreeModel>(model);
        require_dim(x, static_cast<std::size_t>(tree.input_dim), "local_complexity");
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) continue;
            Vec normal(static_cast<std::size_t>(tree.input_dim), 0.0);
            normal[static_cast<std::size_t>(node.feature)] = 1.0;
            out.push_back(
                {std::move(normal),
                 std::fabs(x[static_cast<std::size_t>(node.feature)] - node.threshold)});
        }
    }
    return out;
}

int numerical_rank(const std::vector<Vec>& normals) {
    if (normals.empty()) return 0;
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(normals.size()),
                        static_cast<Eigen::Index>(normals[0].size()));
    for (std::size_t r = 0; r < normals.size(); ++r) {
        const double len = norm(normals[r]);
        for (std::size_t c = 0; c < normals[r].size(); ++c)
            mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                normals[r][c] / len;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double tol = 1e-8 * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return rank;
}

} // namespace

std::vector<double> hyperplane_distances(const Model& model, const Vec& x) {
    std::vector<double> distances;
    for (const Candidate& c : candidate_hyperplanes(model, x)) distances.push_back(c.distance);
    return distances;
}

ComplexityReport local_complexity(const Model& model, const Vec& x, double radius, double rho) {
    if (radius <= 0.0) throw data_error("local_complexity: radius must be positive");
    if (rho <= 0.0 || rho > 1.0) throw data_error("local_complexity: rho must be in (0, 1]");

    std::vector<Vec> nearby;
    for (Candidate& c : candidate_hyperplanes(model, x))
        if (c.distance <= radius) nearby.push_back(std::move(c.normal));

    ComplexityReport report;
    report.anchor = x;
    report.radius = radius;
    report.nearby_count = static_cast<int>(nearby.size());
    report.independent_count = numerical_rank(nearby);
    report.ratio = static_cast<double>(report.independent_count) / static_cast<double>(x.size());
    report.is_locally_complex = report.ratio >= rho;
    return report;
}

OffManifoldDecomposition off_manifold_decomposition(const LinearModel& model, const Basis& basis) {
    const double len = norm(model.w);
    if (len == 0.0) throw numeric_error("off_manifold_decomposition: zero weight vector");
    Decomposition parts = decompose(model.w, basis);
    OffManifoldDecomposition out;
    out.shrink_factor = norm(parts.parallel) / len;
    out.angle = std::acos(std::min(1.0, out.shrink_factor));
    out.w_parallel = std::move(parts.parallel);
    out.w_perpendicular = std::move(parts.perpendicular);
    return out;
}

double FragilityStats::frac_below(double eps) const {
    if (margins.empty()) return 0.0;
    std::size_t below = 0;
    for (double m : margins) below += m < eps;
    return static_cast<double>(below) / static_cast<double>(margins.size());
}

FragilityStats fragility_stats(const LinearModel& model, const Dataset& data, double epsilon) {
    if (data.size() == 0) throw data_error("fragility_stats: empty dataset");
    if (epsilon <= 0.0) throw data_error("fragility_stats: epsilon must be positive");

    FragilityStats stats;
    stats.epsilon = epsilon;
    stats.margins.reserve(data.size());
    for (const Vec& p : data.points) stats.margins.push_back(margin_linear(model, p));
    stats.min_margin = *std::min_element(stats.margins.begin(), stats.margins.end());
    stats.frac_below_epsilon = stats.frac_below(epsilon);
    if (data.manifold && data.manifold->basis)
        stats.shrink_factor =
            off_manifold_decomposition(model, *data.manifold->basis).shrink_factor;
    return stats;
}

void write_margins_csv(std::ostream& out, const FragilityStats& stats,
                       const std::vector<int>& labels) {
    if (labels.size() != stats.margins.size())
        throw data_error("write_margins_csv: label count does not match margins");
    out << "point_index,margin,label\n";
    for (std::size_t i = 0; i < stats.margins.size(); ++i)
        out << i << ',' << format_double(stats.margins[i]) << ',' << labels[i] << '\n';
}

} // namespace hdfl
