#include "hdfl/basis.hpp"

#include <cmath>
#include <string>

#include "hdfl/errors.hpp"

namespace hdfl {

Basis random_orthonormal_basis(int ambient_dim, int intrinsic_dim, const SeedSpec& seed) {
    if (intrinsic_dim < 1 || ambient_dim < 1 || intrinsic_dim > ambient_dim)
        throw data_error("random_orthonormal_basis: need 1 <= M <= N, got M=" +
                         std::to_string(intrinsic_dim) + " N=" + std::to_string(ambient_dim));
    Rng rng(seed);
    Basis basis;
    basis.columns.reserve(static_cast<std::size_t>(intrinsic_dim));
    for (int m = 0; m < intrinsic_dim; ++m) {
        Vec col(static_cast<std::size_t>(ambient_dim));
        for (;;) {
            for (double& x : col) x = rng.next_gaussian();
            // Two orthogonalization passes against the accepted columns.
            for (int pass = 0; pass < 2; ++pass)
                for (const Vec& prev : basis.columns) axpy(-dot(prev, col), prev, col);
            const double len = norm(col);
            if (len > 1e-8) {
                for (double& x : col) x /= len;
                break;
            }
            // Degenerate draw (probability ~0); redraw from the stream.
        }
        basis.columns.push_back(std::move(col));
    }
    return basis;
}

Decomposition decompose(const Vec& v, const Basis& basis) {
    if (static_cast<int>(v.size()) != basis.ambient_dim())
        throw data_error("decompose: vector dimension " + std::to_string(v.size()) +
                         " does not match ambient dimension " +
                         std::to_string(basis.ambient_dim()));
    Vec parallel(v.size(), 0.0);
    for (const Vec& col : basis.columns) axpy(dot(col, v), col, parallel);
    return {parallel, sub(v, parallel)};
}

Vec embed(const Basis& basis, const Vec& coefficients) {
    if (static_cast<int>(coefficients.size()) != basis.intrinsic_dim())
        throw data_error("embed: expected " + std::to_string(basis.intrinsic_dim()) +
                         " coefficients, got " + std::to_string(coefficients.size()));
    Vec out(static_cast<std::size_t>(basis.ambient_dim()), 0.0);
    for (std::size_t j = 0; j < basis.columns.size(); ++j)
        axpy(coefficients[j], basis.columns[j], out);
    return out;
}

double gram_deviation(const Basis& basis) {
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.columns.size(); ++i)
        for (std::size_t j = i; j < basis.columns.size(); ++j) {
            const double g = dot(basis.columns[i], basis.columns[j]);
            worst = std::max(worst, std::fabs(g - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

} // namespace hdfl
