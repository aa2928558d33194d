#pragma once

#include "hdfl/rng.hpp"
#include "hdfl/vec.hpp"

namespace hdfl {

/// Orthonormal embedding of an M-dimensional subspace into R^N, stored as
/// M columns of length N. Generated bases satisfy max |B^T B - I| < 1e-10.
struct Basis {
    std::vector<Vec> columns;

    int ambient_dim() const { return columns.empty() ? 0 : static_cast<int>(columns[0].size()); }
    int intrinsic_dim() const { return static_cast<int>(columns.size()); }
};

/// Gaussian matrix followed by modified Gram-Schmidt with one
/// re-orthogonalization pass. Deterministic given the seed.
Basis random_orthonormal_basis(int ambient_dim, int intrinsic_dim, const SeedSpec& seed);

struct Decomposition {
    Vec parallel;      // B B^T v
    Vec perpendicular; // v - parallel
};

/// Splits v into its component inside span(basis) and the remainder.
Decomposition decompose(const Vec& v, const Basis& basis);

/// B * coefficients: maps intrinsic coordinates into ambient space.
Vec embed(const Basis& basis, const Vec& coefficients);

/// max |B^T B - I| over all entries; the orthonormality defect.
double gram_deviation(const Basis& basis);

} // namespace hdfl
