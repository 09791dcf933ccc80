#pragma once

#include <cstddef>
#include <span>

namespace yardsale {

/// Sample mean with its standard error and a mean +/- 3 SE interval.
struct MeanEstimate {
    std::size_t count = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    bool operator==(const MeanEstimate&) const = default;
};

inline constexpr double kSigmaLevel = 3.0;

/// Two-pass estimate over `samples` in the given order. Empty input gives count 0 and zeros.
MeanEstimate estimate_mean(std::span<const double> samples);

/// Same, from running sums (sum x, sum x^2) of `count` samples.
MeanEstimate estimate_mean_from_sums(std::size_t count, double sum, double sum_sq);

/// z = (value - target) / std_error. A zero standard error yields 0 when value
/// equals target to within `exact_tol`, and +/-infinity otherwise.
double z_score(double value, double target, double std_error, double exact_tol = 0.0);

/// Two-sided z threshold holding the familywise error of `n_tests` tests at the
/// level of a single 3-sigma test (Bonferroni).
double familywise_z_threshold(std::size_t n_tests);

/// Median with a distribution-free interval from order statistics at rank
/// n/2 +/- 3 sqrt(n)/2. `values` is sorted internally.
struct MedianEstimate {
    double median = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};
MedianEstimate estimate_median(std::span<const double> values);

}  // namespace yardsale
