#include <cmath>

#include "doctest.h"
#include "sandpile/engine.hpp"
#include "sandpile/error.hpp"
#include "sandpile/observables.hpp"

using namespace sandpile;

TEST_CASE("boundaries are the support endpoints") {
    const auto single = Configuration::from_sites({{0, 1}});
    CHECK(boundaries(single) == std::pair<std::int64_t, std::int64_t>{0, 0});

    const auto pair = Configuration::from_sites({{-1, 1}, {1, 1}});
    CHECK(boundaries(pair) == std::pair<std::int64_t, std::int64_t>{-1, 1});

    // An interior vacancy does not move the boundaries.
    const auto holed = Configuration::from_sites({{-2, 1}, {-1, 1}, {1, 1}, {2, 1}});
    CHECK(boundaries(holed) == std::pair<std::int64_t, std::int64_t>{-2, 2});

    const auto empty = Configuration::from_sites({});
    CHECK_THROWS_AS(boundaries(empty), Error);
}

TEST_CASE("find_hole returns the unique interior vacancy") {
    const auto full = Configuration::from_sites({{-1, 1}, {0, 1}});
    CHECK(!find_hole(full, -1, 0).has_value());

    const auto holed = Configuration::from_sites({{-1, 1}, {1, 1}});
    CHECK(find_hole(holed, -1, 1) == 0);

    const auto two_vacancies = Configuration::from_sites({{-2, 1}, {0, 1}, {2, 1}});
    CHECK_THROWS_AS(find_hole(two_vacancies, -2, 2), Error);
}

TEST_CASE("stabilized piles never produce a second vacancy") {
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const InstructionSource source(seed, 0.5);
        const auto out = stabilize(20, source, {});
        // find_hole throws MULTIPLE_HOLES if the structure theorem failed.
        const auto hole = find_hole(out.config, out.left, out.right);
        CHECK(hole == out.hole);
    }
}

TEST_CASE("mass sums are exact") {
    const auto origin = Configuration::from_sites({{0, 5}});
    CHECK(mass_center(origin) == 0);
    CHECK(square_mass(origin) == 0);

    const auto symmetric = Configuration::from_sites({{-1, 1}, {1, 1}});
    CHECK(mass_center(symmetric) == 0);
    CHECK(square_mass(symmetric) == 2);

    const auto skewed = Configuration::from_sites({{-1, 1}, {0, 1}, {2, 1}});
    CHECK(mass_center(skewed) == 1);
    CHECK(square_mass(skewed) == 5);
}

TEST_CASE("squared mass of a full interval {1..m} is m^3/3 + m^2/2 + m/6") {
    for (std::int64_t m = 1; m <= 20; ++m) {
        std::int64_t direct = 0;
        for (std::int64_t i = 1; i <= m; ++i) direct += i * i;
        CHECK(6 * direct == 2 * m * m * m + 3 * m * m + m);
    }
}

TEST_CASE("full-interval mass center closed form on stabilized piles") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const InstructionSource source(seed, 0.45);
        const auto out = stabilize(30, source, {});
        const std::int64_t interval_sum = (out.left + out.right) * (out.right - out.left + 1) / 2;
        if (out.hole)
            CHECK(out.mass_center == interval_sum - *out.hole);
        else
            CHECK(out.mass_center == interval_sum);
    }
}

TEST_CASE("fluctuation sample arithmetic") {
    StabilizationOutcome out;
    out.left = -1;
    out.right = 0;
    out.topplings = 1;
    out.mass_center = -1;
    out.square_mass = 1;

    const auto f = fluctuation_sample(out, 2);
    CHECK(f.left_fluct == doctest::Approx(0.0));
    CHECK(f.right_fluct == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(f.scaled_k == doctest::Approx(1.0 / 8));
    CHECK(f.scaled_m2 == doctest::Approx(1.0 / 8));
    CHECK(!f.hole_present);

    StabilizationOutcome sym;
    sym.left = -1;
    sym.right = 1;
    sym.hole = 0;
    const auto g = fluctuation_sample(sym, 2);
    CHECK(g.left_fluct == doctest::Approx(0.0));
    CHECK(g.right_fluct == doctest::Approx(0.0));
    CHECK(g.hole_present);
}

TEST_CASE("odd n keeps the half-integer centering exact") {
    StabilizationOutcome out;
    out.left = -2;
    out.right = 1;
    const auto f = fluctuation_sample(out, 3);
    // (2L+n)/(2 sqrt n) = (-4+3)/(2 sqrt 3)
    CHECK(f.left_fluct == doctest::Approx(-1.0 / (2.0 * std::sqrt(3.0))));
    CHECK(f.right_fluct == doctest::Approx(-1.0 / (2.0 * std::sqrt(3.0))));
}
