#include "hdfl/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hdfl/errors.hpp"

namespace hdfl {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

Interval wilson_interval(long successes, long trials, double z) {
    if (trials <= 0) throw data_error("wilson_interval: trials must be >= 1");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double median(std::vector<double> values) {
    if (values.empty()) throw data_error("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw data_error("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw data_error("mean: empty sample");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw data_error("rank_sum_p: empty group");
    struct Obs {
        double value;
        int group;
    };
    std::vector<Obs> all;
    all.reserve(a.size() + b.size());
    for (double v : a) all.push_back({v, 0});
    for (double v : b) all.push_back({v, 1});
    std::stable_sort(all.begin(), all.end(),
                     [](const Obs& x, const Obs& y) { return x.value < y.value; });

    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;

    // Midranks for ties plus the tie-correction term sum(t^3 - t).
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (all[k].group == 0) rank_sum_a += midrank;
        tie_term += t * t * t - t;
        i = j;
    }

    const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const double mu = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0; // all observations tied
    double z = u - mu;
    // Continuity correction toward the mean.
    if (z > 0.5)
        z -= 0.5;
    else if (z < -0.5)
        z += 0.5;
    else
        z = 0.0;
    z /= std::sqrt(var);
    return 2.0 * (1.0 - normal_cdf(std::fabs(z)));
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw data_error("fit_slope: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw numeric_error("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return std::string(buf);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_double_exact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

double parse_double(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str()) throw data_error("parse_double: not a number: " + text);
    return v;
}

} // namespace hdfl
