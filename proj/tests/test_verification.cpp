#include "doctest.h"

#include <cmath>

#include "yardsale/errors.hpp"
#include "yardsale/verification.hpp"

using namespace yardsale;

namespace {

TrajectoryConfig config_with(std::vector<double> initial, double beta, double delta = 0.0) {
    TrajectoryConfig c;
    c.params.n_agents = initial.size();
    c.params.delta = delta;
    c.params.fraction = ConstantFraction{beta};
    c.initial = std::move(initial);
    c.condensation_epsilon = 1e-6;
    c.max_steps = 10'000'000;
    c.record_every = 1'000'000;
    c.key = {2026, 0};
    return c;
}

}  // namespace

TEST_CASE("win probabilities") {
    SUBCASE("uniform start over four agents") {
        const auto summary = run_ensemble(config_with({1, 1, 1, 1}, 0.3), 2000, 3, 1);
        const auto est = estimate_win_probabilities(summary);
        REQUIRE(est.size() == 4);
        for (const auto& e : est) {
            CHECK(e.initial_share == 0.25);
            CHECK(e.consistent);
            CHECK(std::abs(e.estimate - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / 2000));
        }
    }
    SUBCASE("absorbing start") {
        const auto summary = run_ensemble(config_with({1, 0}, 0.2), 50, 3, 1);
        const auto est = estimate_win_probabilities(summary);
        CHECK(est[0].estimate == 1.0);
        CHECK(est[1].estimate == 0.0);
        CHECK(est[0].consistent);
        CHECK(est[1].consistent);
    }
    SUBCASE("biased ensemble rejected") {
        const auto summary = run_ensemble(config_with({0.3, 0.7}, 0.2, 0.1), 20, 3, 1);
        CHECK_THROWS_AS(estimate_win_probabilities(summary), DomainError);
    }
    SUBCASE("unfinished ensemble rejected") {
        auto c = config_with({0.3, 0.7}, 0.2);
        c.max_steps = 3;
        const auto summary = run_ensemble(c, 20, 3, 1);
        CHECK_THROWS_AS(estimate_win_probabilities(summary), DomainError);
    }
}

TEST_CASE("increment bound") {
    auto c = config_with(std::vector<double>(6, 1.0), 0.1);
    SUBCASE("unbiased: gap consistent with zero") {
        const auto r = verify_increment_bound(c, 200, 2000, 1);
        CHECK(r.passed);
        CHECK(r.steps.size() == 200);
        CHECK(std::abs(r.total_gap_z) <= 3.0);
        CHECK(r.total_bias_term.mean == 0.0);
        for (const auto& s : r.steps) CHECK(s.mean_twice_stake_sq > 0.0);
    }
    SUBCASE("biased: gap positive and explained by the bias term") {
        c.params.delta = 0.2;
        const auto r = verify_increment_bound(c, 200, 2000, 1);
        CHECK(r.passed);
        CHECK(r.total_gap_z > 3.0);
        CHECK(std::abs(r.total_residual_z) <= 3.0);
        CHECK(r.total_bias_term.mean > 0.0);
    }
    SUBCASE("variants rejected") {
        c.params.tax_chi = 0.1;
        CHECK_THROWS_AS(verify_increment_bound(c, 10, 10, 1), DomainError);
    }
}

TEST_CASE("stake summability") {
    SUBCASE("condensed start never stakes anything") {
        auto c = config_with({1, 0, 0}, 0.3);
        const auto r = verify_stake_summability(c, 1000, 20, 1);
        CHECK(r.at_horizon.mean == 0.0);
        CHECK(r.bound == 0.0);
        CHECK(r.passed);
    }
    SUBCASE("two equal agents") {
        auto c = config_with({0.5, 0.5}, 0.1);
        const auto r = verify_stake_summability(c, 2000, 500, 1);
        CHECK(r.bound == 0.25);
        CHECK(r.monotone);
        CHECK(r.passed);
        CHECK(r.checkpoints == std::vector<std::uint64_t>{1, 10, 100, 1000, 2000});
        for (std::size_t i = 1; i < r.cumulative_stake_sq.size(); ++i)
            CHECK(r.cumulative_stake_sq[i].mean >= r.cumulative_stake_sq[i - 1].mean);
        CHECK(r.cumulative_stake_sq[0].mean == doctest::Approx(0.05 * 0.05));
    }
}

TEST_CASE("martingale check") {
    auto c = config_with({0.1, 0.2, 0.3, 0.4}, 0.2);
    const auto r = verify_martingale(c, {100, 10}, 2000, 1);
    CHECK(r.passed);
    CHECK(r.checks.size() == 8);
    CHECK(r.checks.front().step == 10);
    c.params.delta = 0.1;
    CHECK_THROWS_AS(verify_martingale(c, {10}, 100, 1), DomainError);
}

TEST_CASE("condensation time study") {
    auto base = config_with({0.25, 0.75}, 0.2);
    SUBCASE("already condensed at the threshold") {
        GridPoint p{2, 0.0, ConstantFraction{0.2}, 0.5, std::vector<double>{0.25, 0.75}};
        const auto t = condensation_time_study(base, {p}, 20, 1, 1);
        CHECK(t.rows[0].mean_steps.mean == 0.0);
        CHECK(t.rows[0].n_condensed == 20);
    }
    SUBCASE("more agents take longer; bias does not slow condensation") {
        std::vector<GridPoint> grid{{2, 0.0, ConstantFraction{0.2}, 1e-3, UniformInitial{}},
                                    {20, 0.0, ConstantFraction{0.2}, 1e-3, UniformInitial{}},
                                    {2, 0.3, ConstantFraction{0.2}, 1e-3, UniformInitial{}}};
        const auto t = condensation_time_study(base, grid, 200, 5, 1);
        CHECK(t.rows[1].mean_steps.mean > t.rows[0].mean_steps.mean);
        REQUIRE(t.diagnostics.size() == 1);
        CHECK(t.diagnostics[0].lower_delta_row == 0);
        CHECK(t.diagnostics[0].higher_delta_row == 2);
        CHECK(t.diagnostics[0].not_slower);
        CHECK(t.rows[2].median_steps.median <= t.rows[0].median_steps.median);
    }
    SUBCASE("taxation rejected") {
        base.params.tax_chi = 0.05;
        base.condensation_epsilon.reset();
        CHECK_THROWS_AS(condensation_time_study(base, {GridPoint{}}, 1, 1, 1), DomainError);
    }
}
