#include <cmath>
#include <vector>

#include "doctest.h"
#include "sandpile/error.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/rng.hpp"

using namespace sandpile;

namespace {

std::vector<double> random_fixture(std::uint64_t seed, int count, double scale) {
    SplitMix64 rng(seed);
    std::vector<double> v(static_cast<std::size_t>(count));
    for (auto& x : v)
        x = scale * (static_cast<double>(rng.next() >> 11) * 0x1.0p-53 - 0.3);
    return v;
}

std::pair<double, double> two_pass(const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, ss / static_cast<double>(v.size() - 1)};
}

bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("streaming statistics agree with a two-pass computation") {
    const auto v = random_fixture(11, 5000, 37.0);
    StreamingStats s;
    for (double x : v) s.add(x);
    const auto [mean, var] = two_pass(v);
    CHECK(close_rel(s.mean, mean, 1e-9));
    CHECK(close_rel(s.variance(), var, 1e-9));
    CHECK(s.count == 5000);
}

TEST_CASE("merge equals the concatenated sample, any split") {
    const auto v = random_fixture(12, 3000, 5.0);
    const auto [mean, var] = two_pass(v);
    for (std::size_t split : {1u, 137u, 1500u, 2999u}) {
        StreamingStats a, b;
        for (std::size_t i = 0; i < split; ++i) a.add(v[i]);
        for (std::size_t i = split; i < v.size(); ++i) b.add(v[i]);
        StreamingStats m = a;
        m.merge(b);
        CHECK(m.count == 3000);
        CHECK(close_rel(m.mean, mean, 1e-9));
        CHECK(close_rel(m.variance(), var, 1e-9));
    }

    SUBCASE("empty is the identity") {
        StreamingStats a;
        for (double x : v) a.add(x);
        StreamingStats m = a;
        m.merge(StreamingStats{});
        CHECK(m.count == a.count);
        CHECK(m.mean == a.mean);
        CHECK(m.m2 == a.m2);
        StreamingStats e;
        e.merge(a);
        CHECK(e.mean == a.mean);
    }
}

TEST_CASE("histogram bins are half-open with explicit out-of-range buckets") {
    Histogram h({0.0, 1.0});
    h.add(0.5);
    CHECK(h.counts == std::vector<std::int64_t>{1});
    CHECK(h.underflow == 0);
    CHECK(h.overflow == 0);

    Histogram h2({0.0, 1.0, 2.0});
    h2.add(1.0);  // interior edge goes right
    CHECK(h2.counts == std::vector<std::int64_t>{0, 1});
    h2.add(-0.1);
    h2.add(2.0);  // top edge overflows
    CHECK(h2.underflow == 1);
    CHECK(h2.overflow == 1);

    CHECK_THROWS_AS(Histogram({1.0, 0.0}), Error);
    CHECK_THROWS_AS(Histogram({0.0, 0.0, 1.0}), Error);
    CHECK_THROWS_AS(Histogram({0.0}), Error);
}

TEST_CASE("histogram totals equal the sample count") {
    const auto v = random_fixture(13, 2000, 3.0);
    const auto h = histogram(v, {-0.5, -0.1, 0.0, 0.4, 1.1});
    CHECK(h.total() == 2000);
}

TEST_CASE("default fluctuation edges span 4 sigma both ways") {
    const auto edges = fluctuation_histogram_edges(0.5);
    REQUIRE(edges.size() == 62);
    const double sigma = std::sqrt(1.0 / 24);
    CHECK(edges.front() == doctest::Approx(-4 * sigma));
    CHECK(edges.back() == doctest::Approx(4 * sigma));
}

TEST_CASE("batch of stable singletons") {
    BatchParams params;
    params.n = 1;
    params.trials = 100;
    params.base_seed = 3;
    const auto s = run_batch(params);
    CHECK(s.trials == 100);
    CHECK(s.total_topplings == 0);
    CHECK(s.observables.at("K").mean == 0.0);
    CHECK(s.observables.at("K").variance() == 0.0);
    CHECK(s.observables.at("L").variance() == 0.0);
    CHECK(s.observables.at("R").max == 0.0);
}

TEST_CASE("empirical hole frequency at n=2 matches the p/(2-p) law") {
    BatchParams params;
    params.n = 2;
    params.p = 0.5;
    params.trials = 100000;
    params.base_seed = 7;
    const auto s = run_batch(params);
    const double freq = s.observables.at("hole_present").mean;
    const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / 100000.0);
    CHECK(std::fabs(freq - 1.0 / 3) <= 4 * sigma);
}

TEST_CASE("scaled toppling count approaches 1/(24p)") {
    BatchParams params;
    params.n = 100;
    params.p = 0.5;
    params.trials = 5000;
    params.base_seed = 1;
    const auto s = run_batch(params);
    CHECK(std::fabs(s.observables.at("scaled_K").mean - 1.0 / 12) <= 0.1 / 12);
}

TEST_CASE("mass center stays a martingale empirically") {
    BatchParams params;
    params.n = 20;
    params.p = 0.5;
    params.trials = 2000;
    params.base_seed = 21;
    const auto s = run_batch(params);
    const auto& m = s.observables.at("M");
    CHECK(std::fabs(m.mean) <= 4 * m.stddev() / std::sqrt(2000.0));
}

TEST_CASE("batches are deterministic and worker-count independent") {
    BatchParams params;
    params.n = 25;
    params.p = 0.4;
    params.trials = 400;
    params.base_seed = 77;
    params.keep_trials = true;
    params.keep_samples = true;
    params.histogram_edges = fluctuation_histogram_edges(0.4);

    params.workers = 2;
    const auto a = run_batch(params);
    const auto b = run_batch(params);
    CHECK(a.observables.at("K").mean == b.observables.at("K").mean);
    CHECK(a.total_topplings == b.total_topplings);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].seed == b.records[i].seed);
        CHECK(a.records[i].right == b.records[i].right);
    }

    for (int workers : {1, 3}) {
        params.workers = workers;
        const auto c = run_batch(params);
        CHECK(c.histograms.at("right_fluct").counts == a.histograms.at("right_fluct").counts);
        CHECK(c.samples.at("left_fluct") == a.samples.at("left_fluct"));
        REQUIRE(c.records.size() == a.records.size());
        CHECK(c.records[137].index == 137);
        CHECK(c.records[137].topplings == a.records[137].topplings);
        CHECK(close_rel(c.observables.at("S").mean, a.observables.at("S").mean, 1e-9));
        CHECK(close_rel(c.observables.at("S").variance(), a.observables.at("S").variance(),
                        1e-9));
    }
}

TEST_CASE("retained samples respect the cap by trial index") {
    BatchParams params;
    params.n = 2;
    params.p = 0.5;
    params.trials = 100;
    params.base_seed = 5;
    params.keep_samples = true;
    params.sample_cap = 50;
    params.workers = 2;
    const auto s = run_batch(params);
    CHECK(s.samples.at("right_fluct").size() == 50);
}

TEST_CASE("summary merge rejects mismatched schemas") {
    BatchParams params;
    params.n = 2;
    params.p = 0.5;
    params.trials = 10;
    const auto a = run_batch(params);

    BatchParams reduced = params;
    reduced.observables = {"K", "R"};
    const auto b = run_batch(reduced);
    CHECK_THROWS_AS(merge(a, b), Error);

    BatchParams hist1 = params;
    hist1.histogram_edges = {0.0, 1.0};
    BatchParams hist2 = params;
    hist2.histogram_edges = {0.0, 2.0};
    CHECK_THROWS_AS(merge(run_batch(hist1), run_batch(hist2)), Error);
}

TEST_CASE("engine failures carry the derived trial seed") {
    BatchParams params;
    params.n = 4;
    params.p = 0.5;
    params.trials = 3;
    params.base_seed = 9;
    params.max_topplings = 1;
    params.workers = 1;
    try {
        run_batch(params);
        FAIL("expected NO_TERMINATION");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoTermination);
        CHECK(std::string(e.what()).find("trial 0") != std::string::npos);
        CHECK(std::string(e.what()).find(std::to_string(trial_seed(9, 0))) !=
              std::string::npos);
    }
}

TEST_CASE("parameter validation") {
    BatchParams params;
    params.n = 0;
    CHECK_THROWS_AS(run_batch(params), std::invalid_argument);
    params.n = 1;
    params.trials = 0;
    CHECK_THROWS_AS(run_batch(params), std::invalid_argument);
    params.trials = 1;
    params.p = 1.0;
    CHECK_THROWS_AS(run_batch(params), std::invalid_argument);
}
