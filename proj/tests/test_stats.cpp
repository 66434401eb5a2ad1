#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "sandpile/error.hpp"
#include "sandpile/stats.hpp"

using namespace sandpile;

TEST_CASE("normal cdf against table values") {
    CHECK(std::fabs(normal_cdf(0.0, 0.0, 1.0) - 0.5) <= 1.5e-7);
    CHECK(std::fabs(normal_cdf(1.0, 0.0, 1.0) - 0.8413447461) <= 1.5e-7);
    CHECK(std::fabs(normal_cdf(-1.0, 0.0, 1.0) - 0.1586552539) <= 1.5e-7);
    CHECK(std::fabs(normal_cdf(1.96, 0.0, 1.0) - 0.9750021049) <= 1.5e-7);
    // Location-scale: x = mean + sigma matches Phi(1).
    CHECK(std::fabs(normal_cdf(3.5, 2.0, 2.25) - 0.8413447461) <= 1.5e-7);
}

TEST_CASE("normal cdf reflection symmetry and monotonicity") {
    for (double x = -6.0; x <= 6.0; x += 0.01)
        CHECK(std::fabs(normal_cdf(x, 0.0, 1.0) + normal_cdf(-x, 0.0, 1.0) - 1.0) <= 3e-7);

    double prev = -1.0;
    for (double x = -10.0; x <= 10.0; x += 1e-3) {
        const double c = normal_cdf(x, 0.5, 2.0);
        CHECK(c >= prev);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        prev = c;
    }
    CHECK_THROWS_AS(normal_cdf(0.0, 0.0, 0.0), Error);
    CHECK_THROWS_AS(normal_cdf(0.0, 0.0, -1.0), Error);
}

TEST_CASE("normal quantile and chi-square quantile against tables") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-6));
    CHECK(normal_quantile(0.001) == doctest::Approx(-3.090232306).epsilon(1e-6));

    CHECK(chi_square_quantile(0.95, 5) == doctest::Approx(11.0705).epsilon(0.01));
    CHECK(chi_square_quantile(0.99, 2) == doctest::Approx(9.2103).epsilon(0.01));
    CHECK(chi_square_quantile(0.999, 9) == doctest::Approx(27.877).epsilon(0.01));
    CHECK_THROWS_AS(chi_square_quantile(0.95, 0), std::invalid_argument);
}

TEST_CASE("KS accepts inverse-CDF grids and rejects point masses") {
    const int m = 1000;
    std::vector<double> grid(m);
    for (int i = 0; i < m; ++i)
        grid[static_cast<std::size_t>(i)] = normal_quantile((i + 0.5) / m);
    auto phi = [](double x) { return normal_cdf(x, 0.0, 1.0); };
    for (double alpha : {0.05, 0.01, 0.001}) {
        const auto r = ks_test("grid", grid, phi, alpha);
        CHECK(r.statistic <= 0.5 / m + 1e-6);
        CHECK(r.pass);
    }

    const std::vector<double> point(100, 0.0);
    const auto r = ks_test("degenerate", point, phi, 0.001);
    CHECK(r.statistic >= 0.5);
    CHECK(!r.pass);
}

TEST_CASE("KS guards") {
    auto phi = [](double x) { return normal_cdf(x, 0.0, 1.0); };
    const std::vector<double> few(49, 0.1);
    CHECK_THROWS_AS(ks_test("few", few, phi, 0.05), Error);
    const std::vector<double> enough(50, 0.1);
    CHECK_THROWS_AS(ks_test("alpha", enough, phi, 0.2), std::invalid_argument);
}

TEST_CASE("KS statistic is invariant under a common monotone transform") {
    const int m = 200;
    std::vector<double> base(m), transformed(m);
    for (int i = 0; i < m; ++i) {
        // deliberately non-normal sample
        const double u = (i + 0.5) / m;
        base[static_cast<std::size_t>(i)] = u * u;
        transformed[static_cast<std::size_t>(i)] = std::exp(u * u);
    }
    auto ref = [](double x) { return normal_cdf(x, 0.2, 0.3); };
    auto ref_transformed = [&](double x) { return ref(std::log(x)); };
    const auto a = ks_test("plain", base, ref, 0.05);
    const auto b = ks_test("warped", transformed, ref_transformed, 0.05);
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
}

TEST_CASE("chi-square goodness of fit") {
    SUBCASE("exact proportions give statistic zero") {
        const auto r = chi_square_gof("exact", {300, 300, 400}, {0.3, 0.3, 0.4}, 0.01);
        CHECK(r.statistic == doctest::Approx(0.0));
        CHECK(r.pass);
    }
    SUBCASE("a 20% shift in one category at 1e5 trials fails") {
        // true {1/3,1/3,1/3}, one category depressed by 20%
        const std::int64_t n = 100000;
        const auto low = static_cast<std::int64_t>(n / 3.0 * 0.8);
        const std::int64_t rest = n - low;
        const auto r = chi_square_gof("shift", {low, rest / 2, rest - rest / 2},
                                      {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.01);
        CHECK(!r.pass);
    }
    SUBCASE("small expectations are pooled") {
        const auto r = chi_square_gof("pool", {190, 5, 3, 2}, {0.96, 0.02, 0.01, 0.01}, 0.05);
        CHECK(r.params["dof"] == 1);
        CHECK(r.pass);
    }
    SUBCASE("guards") {
        CHECK_THROWS_AS(chi_square_gof("tiny", {3, 2}, {0.5, 0.5}, 0.05), Error);
        CHECK_THROWS_AS(chi_square_gof("sum", {10, 10}, {0.5, 0.6}, 0.05),
                        std::invalid_argument);
        CHECK_THROWS_AS(chi_square_gof("len", {10, 10}, {1.0}, 0.05), std::invalid_argument);
    }
}

TEST_CASE("total variation distance") {
    using Law = std::map<int, double>;
    const Law a{{0, 0.5}, {1, 0.5}};
    CHECK(tv_distance(a, a) == doctest::Approx(0.0));

    const Law b{{2, 0.5}, {3, 0.5}};
    CHECK(tv_distance(a, b) == doctest::Approx(1.0));

    const Law c{{0, 0.25}, {1, 0.25}, {2, 0.5}};
    CHECK(tv_distance(a, c) == doctest::Approx(tv_distance(c, a)));
    const Law set[] = {a, b, c};
    for (const auto& x : set)
        for (const auto& y : set)
            for (const auto& z : set)
                CHECK(tv_distance(x, z) <= tv_distance(x, y) + tv_distance(y, z) + 1e-12);
}

TEST_CASE("report pass flag follows statistic <= threshold") {
    CHECK(TestReport::make("a", 0.5, 0.5, 1).pass);
    CHECK(!TestReport::make("b", 0.5001, 0.5, 1).pass);
}
