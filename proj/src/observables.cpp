#include "sandpile/observables.hpp"

#include <cmath>
#include <string>

#include "sandpile/error.hpp"

namespace sandpile {

std::pair<std::int64_t, std::int64_t> boundaries(const Configuration& cfg) {
    std::int64_t left = 0;
    bool found = false;
    for (std::size_t i = 0; i < cfg.counts.size(); ++i) {
        if (cfg.counts[i] > 0) {
            left = cfg.site_of(i);
            found = true;
            break;
        }
    }
    if (!found) throw Error(Errc::EmptyConfiguration, "no occupied site");
    std::int64_t right = left;
    for (std::size_t i = cfg.counts.size(); i-- > 0;) {
        if (cfg.counts[i] > 0) {
            right = cfg.site_of(i);
            break;
        }
    }
    return {left, right};
}

std::optional<std::int64_t> find_hole(const Configuration& cfg, std::int64_t left,
                                      std::int64_t right) {
    std::optional<std::int64_t> hole;
    for (std::int64_t v = left + 1; v < right; ++v) {
        if (cfg.count(v) == 0) {
            if (hole)
                throw Error(Errc::MultipleHoles, "vacancies at " + std::to_string(*hole) +
                                                     " and " + std::to_string(v));
            hole = v;
        }
    }
    return hole;
}

std::int64_t mass_center(const Configuration& cfg) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < cfg.counts.size(); ++i)
        sum += cfg.site_of(i) * cfg.counts[i];
    return sum;
}

std::int64_t square_mass(const Configuration& cfg) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < cfg.counts.size(); ++i) {
        const std::int64_t v = cfg.site_of(i);
        sum += v * v * cfg.counts[i];
    }
    return sum;
}

FluctuationSample fluctuation_sample(const StabilizationOutcome& outcome, std::int64_t n) {
    FluctuationSample f;
    f.n = n;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double n3 = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n);
    // 2L+n and 2R-n stay exact integers even for odd n.
    f.left_fluct = static_cast<double>(2 * outcome.left + n) / (2.0 * sqrt_n);
    f.right_fluct = static_cast<double>(2 * outcome.right - n) / (2.0 * sqrt_n);
    f.scaled_k = static_cast<double>(outcome.topplings) / n3;
    f.scaled_s = static_cast<double>(outcome.square_mass) / n3;
    f.scaled_m2 = static_cast<double>(outcome.mass_center) *
                  static_cast<double>(outcome.mass_center) / n3;
    f.hole_present = outcome.hole.has_value();
    return f;
}

}  // namespace sandpile
