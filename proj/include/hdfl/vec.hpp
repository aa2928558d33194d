#pragma once

#include <string>
#include <vector>

namespace hdfl {

/// Points, weights and directions are plain dense vectors in R^N.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double norm_inf(const Vec& v);
double distance(const Vec& a, const Vec& b);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& v, double c);
/// y += c * x
void axpy(double c, const Vec& x, Vec& y);

bool all_finite(const Vec& v);

/// Throws data_error when the two dimensions differ; `what` names the
/// operation for the message.
void require_same_dim(const Vec& a, const Vec& b, const char* what);
void require_dim(const Vec& v, std::size_t dim, const char* what);

} // namespace hdfl
