#include "hdfl/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdfl/errors.hpp"

namespace hdfl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Substream ids under a generator's root stream.
constexpr std::uint64_t kBasisStream = 1;
constexpr std::uint64_t kPointStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

Basis resolve_basis(const ManifoldSpec& spec, int columns, const Rng& root) {
    if (spec.basis) {
        if (spec.basis->ambient_dim() != spec.ambient_dim ||
            spec.basis->intrinsic_dim() != columns)
            throw data_error("manifold basis has wrong shape");
        return *spec.basis;
    }
    return random_orthonormal_basis(spec.ambient_dim, columns,
                                    SeedSpec{root.seed(), kBasisStream});
}

void add_ambient_noise(Dataset& data, double amplitude, const Rng& root) {
    if (amplitude <= 0.0) return;
    Rng rng = root.substream(kNoiseStream);
    const double sigma = amplitude / std::sqrt(static_cast<double>(data.dim()));
    for (Vec& p : data.points)
        for (double& x : p) x += sigma * rng.next_gaussian();
}

} // namespace

std::string to_string(ManifoldKind kind) {
    switch (kind) {
    case ManifoldKind::subspace_gaussians: return "subspace_gaussians";
    case ManifoldKind::concentric_spheres: return "concentric_spheres";
    case ManifoldKind::folded_curve: return "folded_curve";
    }
    throw data_error("unknown manifold kind");
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
    if (name == "subspace_gaussians") return ManifoldKind::subspace_gaussians;
    if (name == "concentric_spheres") return ManifoldKind::concentric_spheres;
    if (name == "folded_curve") return ManifoldKind::folded_curve;
    throw data_error("unknown manifold kind: " + name);
}

ManifoldSpec subspace_gaussians_spec(int ambient_dim, int intrinsic_dim,
                                     double covariance_scale, double separation) {
    ManifoldSpec spec;
    spec.kind = ManifoldKind::subspace_gaussians;
    spec.ambient_dim = ambient_dim;
    spec.intrinsic_dim = intrinsic_dim;
    spec.covariance_scale = covariance_scale;
    spec.separation = separation;
    return spec;
}

ManifoldSpec concentric_spheres_spec(int ambient_dim, double inner_radius, double outer_radius) {
    ManifoldSpec spec;
    spec.kind = ManifoldKind::concentric_spheres;
    spec.ambient_dim = ambient_dim;
    spec.intrinsic_dim = ambient_dim - 1;
    spec.inner_radius = inner_radius;
    spec.outer_radius = outer_radius;
    return spec;
}

ManifoldSpec folded_curve_spec(int ambient_dim, double gap, double segment_length,
                               double ambient_noise) {
    ManifoldSpec spec;
    spec.kind = ManifoldKind::folded_curve;
    spec.ambient_dim = ambient_dim;
    spec.intrinsic_dim = 1;
    spec.gap = gap;
    spec.segment_length = segment_length;
    spec.ambient_noise = ambient_noise;
    return spec;
}

Dataset generate_subspace_gaussians(const ManifoldSpec& spec, int n_per_class,
                                    const SeedSpec& seed) {
    if (spec.kind != ManifoldKind::subspace_gaussians)
        throw data_error("generate_subspace_gaussians: wrong manifold kind");
    if (n_per_class < 1) throw data_error("generate_subspace_gaussians: n_per_class must be >= 1");
    // M == N is allowed as a degenerate control (no off-manifold directions).
    if (spec.intrinsic_dim > spec.ambient_dim)
        throw data_error("generate_subspace_gaussians: need M <= N");

    Rng root(seed);
    const int m = spec.intrinsic_dim;

    Vec mean_minus = spec.mean_minus;
    Vec mean_plus = spec.mean_plus;
    if (mean_minus.empty() && mean_plus.empty()) {
        mean_minus.assign(static_cast<std::size_t>(m), 0.0);
        mean_plus.assign(static_cast<std::size_t>(m), 0.0);
        const double half = 0.5 * spec.separation * spec.covariance_scale;
        mean_minus[0] = -half;
        mean_plus[0] = half;
    }
    require_dim(mean_minus, static_cast<std::size_t>(m), "class mean (-1)");
    require_dim(mean_plus, static_cast<std::size_t>(m), "class mean (+1)");

    Dataset data;
    data.seed = seed.base_seed;
    data.manifold = spec;
    data.manifold->basis = resolve_basis(spec, m, root);
    data.manifold->mean_minus = mean_minus;
    data.manifold->mean_plus = mean_plus;

    Rng pts = root.substream(kPointStream);
    for (int cls = 0; cls < 2; ++cls) {
        const Vec& mean = cls == 0 ? mean_minus : mean_plus;
        for (int i = 0; i < n_per_class; ++i) {
            Vec coeff(static_cast<std::size_t>(m));
            for (std::size_t j = 0; j < coeff.size(); ++j)
                coeff[j] = mean[j] + spec.covariance_scale * pts.next_gaussian();
            data.points.push_back(embed(*data.manifold->basis, coeff));
            data.labels.push_back(cls == 0 ? -1 : +1);
        }
    }
    add_ambient_noise(data, spec.ambient_noise, root);
    return data;
}

Dataset generate_concentric_spheres(const ManifoldSpec& spec, int n_per_class,
                                    const SeedSpec& seed) {
    if (spec.kind != ManifoldKind::concentric_spheres)
        throw data_error("generate_concentric_spheres: wrong manifold kind");
    if (n_per_class < 1) throw data_error("generate_concentric_spheres: n_per_class must be >= 1");
    if (spec.inner_radius <= 0.0 || spec.outer_radius <= 0.0)
        throw data_error("generate_concentric_spheres: radii must be positive");
    if (spec.inner_radius >= spec.outer_radius)
        throw data_error("generate_concentric_spheres: need inner_radius < outer_radius");

    Rng root(seed);
    Dataset data;
    data.seed = seed.base_seed;
    data.manifold = spec;

    Rng pts = root.substream(kPointStream);
    const std::size_t n = static_cast<std::size_t>(spec.ambient_dim);
    for (int cls = 0; cls < 2; ++cls) {
        const double radius = cls == 0 ? spec.inner_radius : spec.outer_radius;
        for (int i = 0; i < n_per_class; ++i) {
            Vec x(n);
            double len = 0.0;
            do {
                for (double& v : x) v = pts.next_gaussian();
                len = norm(x);
            } while (len < 1e-12);
            for (double& v : x) v *= radius / len;
            data.points.push_back(std::move(x));
            data.labels.push_back(cls == 0 ? -1 : +1);
        }
    }
    return data;
}

double folded_curve_length(const ManifoldSpec& spec) {
    const double r = 0.5 * spec.gap;
    return 2.0 * spec.segment_length + r * (kPi - 2.0 * spec.spread_angle);
}

namespace {

// 2-d hairpin centerline at arc length s: lower arm (label -1) runs from the
// free end toward the apex arc, which wraps around -x and hands over to the
// upper arm. spread_angle = 0 gives exactly anti-parallel arms at distance
// `gap`.
void hairpin_2d(const ManifoldSpec& spec, double s, double& px, double& py) {
    const double r = 0.5 * spec.gap;
    const double a = spec.spread_angle;
    const double len = spec.segment_length;
    const double arc = r * (kPi - 2.0 * a);
    const double ca = std::cos(a), sa = std::sin(a);
    if (s <= len) {
        // direction u1 = (ca, -sa), tangent point r*n1, n1 = (-sa, -ca)
        const double t = len - s;
        px = -r * sa + t * ca;
        py = -r * ca - t * sa;
    } else if (s <= len + arc) {
        const double theta = -(kPi / 2.0 + a) - (s - len) / r; // clockwise around -x
        px = r * std::cos(theta);
        py = r * std::sin(theta);
    } else {
        const double t = s - len - arc;
        px = -r * sa + t * ca;
        py = r * ca + t * sa;
    }
}

} // namespace

Vec folded_curve_point(const ManifoldSpec& spec, double t) {
    if (!spec.basis) throw data_error("folded_curve_point: spec has no basis");
    double px = 0.0, py = 0.0;
    hairpin_2d(spec, t * folded_curve_length(spec), px, py);
    return embed(*spec.basis, Vec{px, py});
}

Dataset generate_folded_curve(const ManifoldSpec& spec, int n_per_class, const SeedSpec& seed) {
    if (spec.kind != ManifoldKind::folded_curve)
        throw data_error("generate_folded_curve: wrong manifold kind");
    if (n_per_class < 1) throw data_error("generate_folded_curve: n_per_class must be >= 1");
    if (spec.gap <= 0.0) throw data_error("generate_folded_curve: gap must be positive");
    if (spec.ambient_dim < 2) throw data_error("generate_folded_curve: need N >= 2");

    Rng root(seed);
    Dataset data;
    data.seed = seed.base_seed;
    data.manifold = spec;
    data.manifold->basis = resolve_basis(spec, 2, root); // embedding plane

    const double total = folded_curve_length(spec);
    Rng pts = root.substream(kPointStream);
    for (int cls = 0; cls < 2; ++cls) {
        for (int i = 0; i < n_per_class; ++i) {
            // Labels split at the arc-length midpoint (the apex).
            const double s = (cls == 0 ? 0.0 : 0.5 * total) + 0.5 * total * pts.next_uniform();
            double px = 0.0, py = 0.0;
            hairpin_2d(*data.manifold, s, px, py);
            data.points.push_back(embed(*data.manifold->basis, Vec{px, py}));
            data.labels.push_back(cls == 0 ? -1 : +1);
        }
    }
    add_ambient_noise(data, spec.ambient_noise, root);
    return data;
}

Dataset generate_dataset(const ManifoldSpec& spec, int n_per_class, const SeedSpec& seed) {
    switch (spec.kind) {
    case ManifoldKind::subspace_gaussians: return generate_subspace_gaussians(spec, n_per_class, seed);
    case ManifoldKind::concentric_spheres: return generate_concentric_spheres(spec, n_per_class, seed);
    case ManifoldKind::folded_curve: return generate_folded_curve(spec, n_per_class, seed);
    }
    throw data_error("generate_dataset: unknown kind");
}

std::string dataset_to_json(const Dataset& data) {
    nlohmann::json doc;
    doc["ambient_dim"] = data.dim();
    doc["intrinsic_dim"] = data.manifold ? data.manifold->intrinsic_dim : data.dim();
    if (data.manifold && data.manifold->basis) {
        nlohmann::json cols = nlohmann::json::array();
        for (const Vec& col : data.manifold->basis->columns) cols.push_back(col);
        doc["basis"] = cols;
    } else {
        doc["basis"] = nullptr;
    }
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec& p : data.points) pts.push_back(p);
    doc["points"] = pts;
    doc["labels"] = data.labels;
    doc["seed"] = data.seed;
    doc["kind"] = data.manifold ? to_string(data.manifold->kind) : "none";
    return doc.dump();
}

Dataset dataset_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("dataset JSON parse error: ") + e.what());
    }
    Dataset data;
    try {
        data.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& p : doc.at("points")) data.points.push_back(p.get<Vec>());
        data.labels = doc.at("labels").get<std::vector<int>>();
        const std::string kind = doc.at("kind").get<std::string>();
        if (kind != "none") {
            ManifoldSpec spec;
            spec.kind = manifold_kind_from_string(kind);
            spec.ambient_dim = doc.at("ambient_dim").get<int>();
            spec.intrinsic_dim = doc.at("intrinsic_dim").get<int>();
            if (!doc.at("basis").is_null()) {
                Basis basis;
                for (const auto& col : doc.at("basis")) basis.columns.push_back(col.get<Vec>());
                spec.basis = std::move(basis);
            }
            data.manifold = std::move(spec);
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("dataset JSON field error: ") + e.what());
    }
    if (data.points.size() != data.labels.size())
        throw data_error("dataset JSON: points and labels differ in length");
    for (int label : data.labels)
        if (label != -1 && label != 1) throw data_error("dataset JSON: labels must be -1 or +1");
    for (const Vec& p : data.points) {
        if (static_cast<int>(p.size()) != data.dim())
            throw data_error("dataset JSON: inconsistent point dimensions");
        if (!all_finite(p)) throw data_error("dataset JSON: non-finite point");
    }
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << dataset_to_json(data) << '\n';
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return dataset_from_json(buf.str());
}

} // namespace hdfl
