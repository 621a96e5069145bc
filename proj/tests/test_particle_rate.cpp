#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kinetic/particle_rate.hpp"

using namespace kinetic;

TEST_CASE("spec validation") {
    ParticleRateSpec spec;
    spec.N_list = {100, 200};
    spec.reference_N = 800;
    CHECK_NOTHROW(spec.validate());

    spec.reference_N = 500;  // below 4x the ladder top
    CHECK_THROWS_AS(spec.validate(), SizeMismatch);

    spec.reference_N = 800;
    spec.N_list = {200, 100};
    CHECK_THROWS_AS(spec.validate(), SizeMismatch);

    spec.N_list = {100};
    CHECK_THROWS_AS(spec.validate(), SizeMismatch);
}

TEST_CASE("V_N rate per dimension") {
    CHECK(v_n_rate(400, 1) == doctest::Approx(0.05));
    CHECK(v_n_rate(400, 2) == doctest::Approx(std::log(401.0) / 20.0));
    CHECK(v_n_rate(1000, 3) == doctest::Approx(0.1));
}

TEST_CASE("monotone trend allows one inversion") {
    CHECK(monotone_decreasing_trend({4.0, 3.0, 2.0, 1.0}));
    CHECK(monotone_decreasing_trend({4.0, 3.0, 3.5, 1.0}));
    CHECK(!monotone_decreasing_trend({4.0, 5.0, 3.5, 4.0}));
}

TEST_CASE("identical configuration and stream give zero observable error") {
    const auto m = ModelSpec::synthetic1d(0.5, 1.0);
    const PartitionSchedule schedule(0.0, 0.5, 8);
    auto run = [&](std::uint64_t tag) {
        const std::uint64_t s = root_stream(55).child(tag).key();
        auto state = initial_state(m, 256, s, tag);
        return simulate_terminal(state, schedule, m, s);
    };
    const auto a = run(3);
    const auto b = run(3);
    const TestFunction f = TestFunction::tanh_coordinate(0, 1.0);
    double ea = 0.0, eb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ea += f(a.point(i));
        eb += f(b.point(i));
    }
    CHECK(ea == eb);
}

TEST_CASE("rate_particles smoke run") {
    ParticleRateSpec spec;
    spec.N_list = {64, 128, 256};
    spec.reference_N = 1024;
    const auto m = ModelSpec::synthetic1d(0.5, 1.0);
    const auto res = rate_particles(spec, m, 0.5, 16, 8, 5, {}, 2, 128);
    REQUIRE(res.report.pairs.size() == 3);
    CHECK(res.expected_slope == -0.5);
    // all ladder entries fit under the pair cap here
    CHECK(res.chaos_N.size() == 3);
    for (double v : res.chaos_pairs) CHECK(v > 0.0);
    // errors shrink from the smallest to the largest N
    CHECK(res.report.pairs.front().second > res.report.pairs.back().second);
}
