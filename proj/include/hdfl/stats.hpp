#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hdfl {

/// Standard normal CDF, computed as erfc(-x/sqrt(2))/2. std::erfc is
/// correctly rounded to well below the 1e-7 absolute error this project
/// requires, including deep in the tails.
double normal_cdf(double x);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion (default 95%,
/// z = 1.959963984540054). Preferred over Wald near 0 and 1.
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

/// Median of a sample (average of the two middle values for even sizes).
double median(std::vector<double> values);

/// Linearly interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

double mean(const std::vector<double>& values);

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value via the normal
/// approximation with tie correction and continuity correction. Returns 1
/// when every observation is tied.
double rank_sum_p(const std::vector<double>& a, const std::vector<double>& b);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// FNV-1a 64-bit hash, rendered as 16 hex digits. Used for config hashes.
std::uint64_t fnv1a64(const std::string& text);
std::string fnv1a64_hex(const std::string& text);

/// Shortest decimal string that round-trips the double (std::to_chars).
/// All CSV/JSON emitters use this so identical values give identical bytes.
std::string format_double(double value);

/// 17-significant-digit decimal string; always round-trips bit-exactly.
/// Used for model serialization.
std::string format_double_exact(double value);
double parse_double(const std::string& text);

} // namespace hdfl
