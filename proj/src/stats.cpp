#include "yardsale/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace yardsale {

namespace {

MeanEstimate with_interval(MeanEstimate e) {
    e.ci_low = e.mean - kSigmaLevel * e.std_error;
    e.ci_high = e.mean + kSigmaLevel * e.std_error;
    return e;
}

}  // namespace

MeanEstimate estimate_mean(std::span<const double> samples) {
    MeanEstimate e;
    e.count = samples.size();
    if (e.count == 0) return e;
    double sum = 0.0;
    for (double x : samples) sum += x;
    e.mean = sum / static_cast<double>(e.count);
    if (e.count > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - e.mean) * (x - e.mean);
        const double n = static_cast<double>(e.count);
        e.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return with_interval(e);
}

MeanEstimate estimate_mean_from_sums(std::size_t count, double sum, double sum_sq) {
    MeanEstimate e;
    e.count = count;
    if (count == 0) return e;
    const double n = static_cast<double>(count);
    e.mean = sum / n;
    if (count > 1) {
        const double var = std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0));
        e.std_error = std::sqrt(var / n);
    }
    return with_interval(e);
}

double z_score(double value, double target, double std_error, double exact_tol) {
    const double diff = value - target;
    if (std_error > 0.0) return diff / std_error;
    if (std::abs(diff) <= exact_tol) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

double familywise_z_threshold(std::size_t n_tests) {
    if (n_tests <= 1) return kSigmaLevel;
    // Two-sided tail of a single 3-sigma test, split across n_tests.
    const double alpha = std::erfc(kSigmaLevel / std::sqrt(2.0)) / static_cast<double>(n_tests);
    double lo = kSigmaLevel;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::erfc(mid / std::sqrt(2.0)) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

MedianEstimate estimate_median(std::span<const double> values) {
    MedianEstimate m;
    if (values.empty()) return m;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    m.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const double half_width = kSigmaLevel * std::sqrt(static_cast<double>(n)) / 2.0;
    const double centre = static_cast<double>(n) / 2.0;
    const auto clamp_rank = [n](double r) {
        return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n - 1)));
    };
    m.ci_low = sorted[clamp_rank(std::floor(centre - half_width))];
    m.ci_high = sorted[clamp_rank(std::ceil(centre + half_width) - 1.0)];
    return m;
}

}  // namespace yardsale
