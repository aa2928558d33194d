#include "hdfl/lid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hdfl/errors.hpp"
#include "hdfl/stats.hpp"

namespace hdfl {

LidEstimate lid_mle(const Vec& anchor, const Dataset& reference, int k) {
    if (k < 2) throw data_error("lid_mle: k must be >= 2");

    std::vector<double> dists;
    dists.reserve(reference.size());
    long zeros = 0;
    for (const Vec& p : reference.points) {
        const double d = distance(anchor, p);
        if (d == 0.0)
            ++zeros;
        else
            dists.push_back(d);
    }
    if (zeros > 1) throw data_error("lid_mle: reference duplicates the anchor");
    if (static_cast<int>(dists.size()) < k)
        throw data_error("lid_mle: reference has fewer than k points distinct from the anchor");

    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    const double r_k = dists[static_cast<std::size_t>(k - 1)];

    double sum = 0.0; // sum of ln(r_k / r_i) >= 0
    for (int i = 0; i < k; ++i) sum += std::log(r_k / dists[static_cast<std::size_t>(i)]);
    if (sum == 0.0) throw numeric_error("lid_mle: all k radii equal (infinite estimate)");

    LidEstimate est;
    est.value = static_cast<double>(k) / sum;
    est.k = k;
    est.estimator = "mle";
    return est;
}

LidEstimate twonn(const Dataset& data) {
    const std::size_t n = data.size();
    if (n < 3) throw data_error("twonn: need at least 3 points");

    double log_sum = 0.0;
    long used = 0;
    long excluded = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r1 = std::numeric_limits<double>::infinity();
        double r2 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = distance(data.points[i], data.points[j]);
            if (d < r1) {
                r2 = r1;
                r1 = d;
            } else if (d < r2) {
                r2 = d;
            }
        }
        if (r1 == 0.0) throw data_error("twonn: duplicate points");
        const double mu = r2 / r1;
        if (mu == 1.0) {
            ++excluded;
            continue;
        }
        log_sum += std::log(mu);
        ++used;
    }
    if (used == 0 || log_sum == 0.0)
        throw numeric_error("twonn: all neighbor ratios equal 1 (undefined estimate)");

    LidEstimate est;
    est.value = static_cast<double>(used) / log_sum;
    est.k = 2;
    est.estimator = "twonn";
    est.excluded = excluded;
    return est;
}

LidContrast lid_contrast(const std::vector<Vec>& natural, const std::vector<Vec>& adversarial,
                         const Dataset& reference, int k) {
    if (natural.empty() || adversarial.empty())
        throw data_error("lid_contrast: both groups must be non-empty");

    std::vector<double> nat, adv;
    nat.reserve(natural.size());
    adv.reserve(adversarial.size());
    for (const Vec& p : natural) nat.push_back(lid_mle(p, reference, k).value);
    for (const Vec& p : adversarial) adv.push_back(lid_mle(p, reference, k).value);

    LidContrast contrast;
    contrast.mean_natural = mean(nat);
    contrast.mean_adversarial = mean(adv);
    contrast.rank_sum_p = rank_sum_p(nat, adv);
    return contrast;
}

void write_lid_csv_header(std::ostream& out) {
    out << "anchor_index,group,estimator,k,value\n";
}

void write_lid_csv_row(std::ostream& out, const LidEstimate& estimate, const std::string& group) {
    out << estimate.anchor_index << ',' << group << ',' << estimate.estimator << ',' << estimate.k
        << ',' << format_double(estimate.value) << '\n';
}

} // namespace hdfl
