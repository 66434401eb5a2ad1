#include "sandpile/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sandpile/error.hpp"

namespace sandpile {

double normal_pdf(double x, double mean, double variance) {
    if (!(variance > 0.0)) throw Error(Errc::NonPositiveVariance, "variance must be > 0");
    const double z = (x - mean) / std::sqrt(variance);
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI * variance);
}

double normal_cdf(double x, double mean, double variance) {
    if (!(variance > 0.0)) throw Error(Errc::NonPositiveVariance, "variance must be > 0");
    const double z = (x - mean) / std::sqrt(variance);
    // Abramowitz & Stegun 26.2.17, |error| < 7.5e-8. Evaluated on |z| and
    // reflected, which keeps the tail symmetric by construction.
    const double az = std::fabs(z);
    const double t = 1.0 / (1.0 + 0.2316419 * az);
    const double poly =
        t * (0.319381530 +
             t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    const double phi = std::exp(-0.5 * az * az) / std::sqrt(2.0 * M_PI);
    const double upper = phi * poly;  // P(Z > az)
    return z >= 0.0 ? 1.0 - upper : upper;
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("quantile level must lie strictly inside (0,1)");
    // P. J. Acklam's rational approximation for the inverse normal CDF,
    // relative error < 1.15e-9 over the full range.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (prob < plow) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (prob > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = prob - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double chi_square_quantile(double prob, std::int64_t dof) {
    if (dof < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
    // Wilson-Hilferty: chi2_q(k) ~ k(1 - 2/(9k) + z_q sqrt(2/(9k)))^3.
    const double k = static_cast<double>(dof);
    const double z = normal_quantile(prob);
    const double u = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * u * u * u;
}

namespace {

double ks_critical_coefficient(double alpha) {
    if (alpha == 0.05) return 1.358;
    if (alpha == 0.01) return 1.628;
    if (alpha == 0.001) return 1.949;
    throw std::invalid_argument("KS alpha must be one of 0.05, 0.01, 0.001");
}

}  // namespace

TestReport ks_test(std::string name, std::vector<double> samples,
                   const std::function<double(double)>& reference_cdf, double alpha,
                   nlohmann::ordered_json params) {
    const double coefficient = ks_critical_coefficient(alpha);
    const auto m = static_cast<std::int64_t>(samples.size());
    if (m < 50)
        throw Error(Errc::TooFewSamples,
                    "KS needs >= 50 samples, got " + std::to_string(m));
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
        const double f = reference_cdf(samples[static_cast<std::size_t>(i)]);
        const double above = static_cast<double>(i + 1) / static_cast<double>(m) - f;
        const double below = f - static_cast<double>(i) / static_cast<double>(m);
        d = std::max({d, above, below});
    }
    const double threshold = coefficient / std::sqrt(static_cast<double>(m));
    params["alpha"] = alpha;
    return TestReport::make(std::move(name), d, threshold, m, std::move(params));
}

TestReport chi_square_gof(std::string name, const std::vector<std::int64_t>& observed,
                          const std::vector<double>& expected_probs, double alpha,
                          nlohmann::ordered_json params) {
    if (observed.size() != expected_probs.size())
        throw std::invalid_argument("observed and expected lengths differ");
    const double prob_total = std::accumulate(expected_probs.begin(), expected_probs.end(), 0.0);
    if (std::fabs(prob_total - 1.0) > 1e-12)
        throw std::invalid_argument("expected probabilities sum to " + std::to_string(prob_total));
    const std::int64_t total =
        std::accumulate(observed.begin(), observed.end(), std::int64_t{0});

    // Pool smallest expected counts first until every group reaches 5.
    std::vector<std::size_t> order(observed.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return expected_probs[x] < expected_probs[y];
    });
    std::vector<std::pair<double, double>> groups;  // (observed, expected)
    double obs_acc = 0.0, exp_acc = 0.0;
    for (std::size_t idx : order) {
        obs_acc += static_cast<double>(observed[idx]);
        exp_acc += expected_probs[idx] * static_cast<double>(total);
        if (exp_acc >= 5.0) {
            groups.emplace_back(obs_acc, exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (exp_acc > 0.0 || obs_acc > 0.0) {
        if (!groups.empty()) {
            groups.back().first += obs_acc;
            groups.back().second += exp_acc;
        } else {
            groups.emplace_back(obs_acc, exp_acc);
        }
    }
    if (groups.size() < 2 || groups.front().second < 5.0)
        throw Error(Errc::ExpectedTooSmall,
                    "cannot pool categories to expected count >= 5");

    double statistic = 0.0;
    for (const auto& [obs, exp] : groups) {
        const double diff = obs - exp;
        statistic += diff * diff / exp;
    }
    const auto dof = static_cast<std::int64_t>(groups.size()) - 1;
    const double threshold = chi_square_quantile(1.0 - alpha, dof);
    params["alpha"] = alpha;
    params["dof"] = dof;
    params["categories"] = observed.size();
    return TestReport::make(std::move(name), statistic, threshold, total, std::move(params));
}

}  // namespace sandpile
