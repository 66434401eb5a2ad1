#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace sandpile {

// Result of a single verification check; pass <=> statistic <= threshold.
struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::int64_t sample_size = 0;
    nlohmann::ordered_json params;  // n, p, trials, seed, ...

    static TestReport make(std::string name, double statistic, double threshold,
                           std::int64_t sample_size, nlohmann::ordered_json params = {}) {
        TestReport r;
        r.name = std::move(name);
        r.statistic = statistic;
        r.threshold = threshold;
        r.pass = statistic <= threshold;
        r.sample_size = sample_size;
        r.params = std::move(params);
        return r;
    }
};

double normal_pdf(double x, double mean, double variance);

// Phi((x-mean)/sqrt(variance)). Abramowitz & Stegun 26.2.17 polynomial,
// absolute error < 7.5e-8. Throws NON_POSITIVE_VARIANCE.
double normal_cdf(double x, double mean, double variance);

// Inverse standard normal CDF, rational approximation by P. J. Acklam
// (relative error < 1.15e-9).
double normal_quantile(double prob);

// Chi-square quantile via the Wilson-Hilferty cube approximation; accurate
// to well under 1% for the degrees of freedom and tail levels used here.
double chi_square_quantile(double prob, std::int64_t dof);

// One-sample Kolmogorov-Smirnov test against a reference CDF. D is the sup
// distance between the empirical CDF and the reference over the sorted
// sample; the threshold is c(alpha)/sqrt(m) with the asymptotic critical
// coefficients c(0.05)=1.358, c(0.01)=1.628, c(0.001)=1.949 (Smirnov's
// asymptotic law, e.g. NIST/SEMATECH e-Handbook sec. 1.3.5.16).
TestReport ks_test(std::string name, std::vector<double> samples,
                   const std::function<double(double)>& reference_cdf, double alpha,
                   nlohmann::ordered_json params = {});

// Pearson chi-square goodness of fit of observed counts against expected
// probabilities. Categories are pooled smallest-first until every expected
// count reaches 5; throws EXPECTED_TOO_SMALL when pooling cannot get there.
TestReport chi_square_gof(std::string name, const std::vector<std::int64_t>& observed,
                          const std::vector<double>& expected_probs, double alpha,
                          nlohmann::ordered_json params = {});

// Total-variation distance between two finite distributions over the union
// of their supports.
template <class Key>
double tv_distance(const std::map<Key, double>& a, const std::map<Key, double>& b) {
    double sum = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            sum += std::abs(ia->second);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            sum += std::abs(ib->second);
            ++ib;
        } else {
            sum += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return sum / 2.0;
}

}  // namespace sandpile
