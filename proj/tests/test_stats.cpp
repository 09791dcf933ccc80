#include "doctest.h"

#include <cmath>
#include <vector>

#include "yardsale/stats.hpp"

using namespace yardsale;

TEST_CASE("estimate_mean") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto e = estimate_mean(xs);
    CHECK(e.count == 4);
    CHECK(e.mean == 2.5);
    // sample sd = sqrt(5/3); se = sd / 2
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.ci_low == doctest::Approx(2.5 - 3 * e.std_error));
    const auto from_sums = estimate_mean_from_sums(4, 10, 30);
    CHECK(from_sums.mean == e.mean);
    CHECK(from_sums.std_error == doctest::Approx(e.std_error));
    CHECK(estimate_mean(std::vector<double>{}).count == 0);
    CHECK(estimate_mean(std::vector<double>{5}).std_error == 0.0);
}

TEST_CASE("z_score edge cases") {
    CHECK(z_score(1.0, 0.5, 0.25) == 2.0);
    CHECK(z_score(0.3, 0.3, 0.0) == 0.0);
    CHECK(std::isinf(z_score(0.31, 0.3, 0.0)));
}

TEST_CASE("familywise threshold") {
    CHECK(familywise_z_threshold(1) == 3.0);
    const double z = familywise_z_threshold(1000);
    // Two-sided tail at z equals the single 3-sigma tail divided by 1000.
    CHECK(std::erfc(z / std::sqrt(2.0)) == doctest::Approx(std::erfc(3 / std::sqrt(2.0)) / 1000).epsilon(1e-9));
    CHECK(z > 4.5);
    CHECK(z < 4.8);
}

TEST_CASE("estimate_median") {
    std::vector<double> xs;
    for (int i = 100; i >= 1; --i) xs.push_back(i);
    const auto m = estimate_median(xs);
    CHECK(m.median == 50.5);
    CHECK(m.ci_low <= m.median);
    CHECK(m.ci_high >= m.median);
    CHECK(m.ci_low == 36.0);  // rank floor(50 - 15) = 35 (0-based)
    CHECK(m.ci_high == 65.0);  // rank ceil(50 + 15) - 1 = 64
}
