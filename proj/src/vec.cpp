#include "hdfl/vec.hpp"

#include <cmath>

#include "hdfl/errors.hpp"

namespace hdfl {

double dot(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double distance(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Vec add(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec scaled(const Vec& v, double c) {
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
    return r;
}

void axpy(double c, const Vec& x, Vec& y) {
    require_same_dim(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_same_dim(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size())
        throw data_error(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

void require_dim(const Vec& v, std::size_t dim, const char* what) {
    if (v.size() != dim)
        throw data_error(std::string(what) + ": expected dimension " + std::to_string(dim) +
                         ", got " + std::to_string(v.size()));
}

} // namespace hdfl
