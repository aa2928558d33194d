#pragma once

#include <iosfwd>
#include <string>

#include "hdfl/dataset.hpp"
#include "hdfl/vec.hpp"

namespace hdfl {

struct LidEstimate {
    double value = 0.0;
    int k = 0;
    long anchor_index = -1; // -1 for global estimates
    std::string estimator;  // "mle" or "twonn"
    long excluded = 0;      // twonn: points dropped because mu == 1
};

/// Maximum-likelihood local intrinsic dimensionality from the k smallest
/// positive distances r_1 <= ... <= r_k to the reference set:
/// value = -[ (1/k) sum_i ln(r_i / r_k) ]^{-1}. The divisor is k (the i = k
/// term contributes 0), matching the LID convention rather than the k-1
/// variant. One zero distance (the anchor itself sitting in the reference)
/// is skipped; more than one raises a duplicate-anchor error, and all radii
/// equal raises numeric_error (the estimate would be infinite).
LidEstimate lid_mle(const Vec& anchor, const Dataset& reference, int k);

/// Global two-nearest-neighbor estimate: mu_i = r_2 / r_1 per point,
/// value = n / sum_i ln(mu_i) over the points with mu_i > 1 (ties excluded
/// and counted). Exact duplicate points raise data_error.
LidEstimate twonn(const Dataset& data);

struct LidContrast {
    double mean_natural = 0.0;
    double mean_adversarial = 0.0;
    double rank_sum_p = 0.0; // two-sided Wilcoxon rank-sum
};

/// Per-point lid_mle of both groups against the reference set, with a
/// rank-sum test on the two samples of estimates.
LidContrast lid_contrast(const std::vector<Vec>& natural, const std::vector<Vec>& adversarial,
                         const Dataset& reference, int k);

/// CSV header anchor_index,group,estimator,k,value.
void write_lid_csv_header(std::ostream& out);
void write_lid_csv_row(std::ostream& out, const LidEstimate& estimate, const std::string& group);

} // namespace hdfl
