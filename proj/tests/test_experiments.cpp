#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "yardsale/errors.hpp"
#include "yardsale/experiments.hpp"
#include "yardsale/simulator.hpp"

using namespace yardsale;

namespace {

TrajectoryConfig two_agent(double x0, double beta, double delta = 0.0) {
    TrajectoryConfig c;
    c.params.n_agents = 2;
    c.params.delta = delta;
    c.params.fraction = ConstantFraction{beta};
    c.initial = std::vector<double>{x0, 1.0 - x0};
    c.condensation_epsilon = 1e-6;
    c.max_steps = 10'000'000;
    c.record_every = 1;
    c.key = {123, 0};
    return c;
}

}  // namespace

TEST_CASE("run_trajectory condenses in the two-agent game") {
    const auto rec = run_trajectory(two_agent(0.3, 0.2));
    CHECK(rec.stop_reason == StopReason::condensed);
    REQUIRE(rec.winner.has_value());
    CHECK(*rec.winner < 2);
    REQUIRE(rec.condensation_step.has_value());
    CHECK(*rec.condensation_step == rec.steps_run);
    CHECK(rec.final_wealth[*rec.winner] >= 1.0 - 1e-6);
    CHECK(rec.snapshots.size() == rec.steps_run + 1);
    CHECK(rec.snapshots.back().max_wealth >= 1.0 - 1e-6);
    for (const auto& s : rec.snapshots) CHECK(std::abs(s.total - 1.0) <= 1e-9);
}

TEST_CASE("run_trajectory boundaries and cadence") {
    auto c = two_agent(0.3, 0.2);
    c.max_steps = 0;
    CHECK_THROWS_AS(run_trajectory(c), DomainError);
    c.max_steps = 1;
    auto rec = run_trajectory(c);
    CHECK(rec.steps_run == 1);
    REQUIRE(rec.snapshots.size() == 2);
    CHECK(rec.snapshots[1].step == 1);
    CHECK(rec.snapshots[1].last_stake == doctest::Approx(0.2 * 0.3));
    CHECK(rec.stop_reason == StopReason::max_steps);
    CHECK_FALSE(rec.winner.has_value());

    c.condensation_epsilon.reset();
    c.max_steps = 20;
    c.record_every = 7;
    rec = run_trajectory(c);
    std::vector<std::uint64_t> steps;
    for (const auto& s : rec.snapshots) steps.push_back(s.step);
    CHECK(steps == std::vector<std::uint64_t>{0, 7, 14, 20});

    c.record_every = 0;
    CHECK_THROWS_AS(run_trajectory(c), DomainError);
}

TEST_CASE("already past the threshold at step 0") {
    auto c = two_agent(0.25, 0.2);
    c.condensation_epsilon = 0.5;
    const auto rec = run_trajectory(c);
    CHECK(rec.stop_reason == StopReason::condensed);
    CHECK(*rec.condensation_step == 0);
    CHECK(*rec.winner == 1);
    CHECK(rec.cumulative_stake_sq == 0.0);
    CHECK(rec.snapshots.size() == 1);
}

TEST_CASE("run_trajectory is deterministic and keyed") {
    auto c = two_agent(0.4, 0.1);
    CHECK(run_trajectory(c) == run_trajectory(c));
    auto d = c;
    d.key.trajectory_index = 1;
    CHECK_FALSE(run_trajectory(c) == run_trajectory(d));
}

TEST_CASE("cumulative stake is nondecreasing in run length") {
    TrajectoryConfig c;
    c.params.n_agents = 6;
    c.condensation_epsilon.reset();
    double previous = -1.0;
    for (std::uint64_t steps : {1, 10, 100, 1000, 5000}) {
        c.max_steps = steps;
        c.record_every = steps;
        const double cum = run_trajectory(c).cumulative_stake_sq;
        CHECK(cum >= previous);
        previous = cum;
    }
}

TEST_CASE("taxation: unreachable stop rejected, floor respected") {
    TrajectoryConfig c;
    c.params.n_agents = 10;
    c.params.tax_chi = 0.1;
    c.condensation_epsilon = 1e-6;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.condensation_epsilon = 0.095;  // >= chi (N-1)/N = 0.09, reachable in principle
    CHECK_NOTHROW(c.validate());
    c.condensation_epsilon.reset();
    c.max_steps = 20000;
    c.record_every = 1;
    const auto rec = run_trajectory(c);
    CHECK(rec.stop_reason == StopReason::max_steps);
    Simulator sim(c.params, uniform_state(10), {1, 2});
    const double floor = 0.1 / 10.0;
    bool ok = true;
    for (int i = 0; i < 20000; ++i) {
        sim.advance();
        for (double x : sim.wealth()) ok = ok && x >= floor;
    }
    CHECK(ok);
}

TEST_CASE("zero wealth is absorbing without tax") {
    TrajectoryConfig c;
    c.params.n_agents = 4;
    c.params.fraction = UniformFraction{0.1, 0.9};
    Simulator sim(c.params, make_state({0.5, 0.0, 0.5, 0.0}), {4, 4});
    for (int i = 0; i < 10000; ++i) {
        sim.advance();
        REQUIRE(sim.wealth()[1] == 0.0);
        REQUIRE(sim.wealth()[3] == 0.0);
    }
}

TEST_CASE("run_ensemble") {
    auto c = two_agent(0.3, 0.2);
    c.record_every = 10;

    SUBCASE("a single trajectory reproduces its record") {
        const auto summary = run_ensemble(c, 1, 55, 1);
        auto single = c;
        single.key = {55, 0};
        const auto rec = run_trajectory(single);
        CHECK(summary.n_trajectories == 1);
        CHECK(summary.n_condensed == 1);
        CHECK(summary.win_counts[*rec.winner] == 1);
        CHECK(summary.cumulative_stake_sq.mean == rec.cumulative_stake_sq);
        CHECK(summary.condensation_step.mean == static_cast<double>(*rec.condensation_step));
        std::size_t grid = 0;
        for (const auto& s : rec.snapshots)
            if (s.step % 10 == 0) CHECK(summary.mean_norm_sq.at(grid++) == s.norm_sq);
        if (rec.steps_run % 10 != 0) CHECK(summary.mean_norm_sq.at(grid++) == rec.snapshots.back().norm_sq);
        CHECK(summary.mean_norm_sq.size() == grid);
    }
    SUBCASE("thread count does not change a bit") {
        const auto one = run_ensemble(c, 150, 9, 1);
        const auto three = run_ensemble(c, 150, 9, 3);
        const auto eight = run_ensemble(c, 150, 9, 8);
        CHECK(one == three);
        CHECK(one == eight);
        std::uint64_t wins = 0;
        for (auto w : one.win_counts) wins += w;
        CHECK(wins == one.n_condensed);
        CHECK(one.config.key.master_seed == 9);
    }
    SUBCASE("zero trajectories rejected") { CHECK_THROWS_AS(run_ensemble(c, 0, 1), DomainError); }
}

TEST_CASE("mean concentration grows along the run") {
    for (double delta : {0.0, 0.3}) {
        TrajectoryConfig c;
        c.params.n_agents = 10;
        c.params.delta = delta;
        c.condensation_epsilon.reset();
        c.max_steps = 500;
        c.record_every = 50;
        const auto summary = run_ensemble(c, 2000, 31, 1);
        REQUIRE(summary.mean_norm_sq.size() == 11);
        CHECK(summary.mean_norm_sq.front() == doctest::Approx(0.1));
        for (std::size_t i = 1; i < summary.mean_norm_sq.size(); ++i)
            CHECK(summary.mean_norm_sq[i] > summary.mean_norm_sq[i - 1]);
    }
}

TEST_CASE("parallel_for reports the lowest failing index") {
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hit[i] = 1; });
    for (int h : hit) CHECK(h == 1);
    try {
        parallel_for(50, 1, [](std::size_t i) {
            if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "7");
    }
}

TEST_CASE("default_thread_count honours YARDSALE_THREADS") {
    setenv("YARDSALE_THREADS", "3", 1);
    CHECK(default_thread_count() == 3);
    setenv("YARDSALE_THREADS", "zero", 1);
    CHECK(default_thread_count() >= 1);
    unsetenv("YARDSALE_THREADS");
}
