#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sandpile/error.hpp"
#include "sandpile/instruction.hpp"

namespace sandpile {

// Particle configuration on a bounded arena of consecutive sites, stored as
// flat arrays with offset indexing. For n particles started at the origin the
// arena is [-n-1, n+1]; stabilization provably never touches |site| >= n, so
// the outermost cells act as tripwires for engine bugs.
struct Configuration {
    std::int64_t particles = 0;  // invariant: sum of counts
    std::int64_t origin = 0;     // array index of site 0
    std::int64_t steps = 0;      // topplings performed so far
    std::vector<std::int32_t> counts;
    std::vector<std::int64_t> odometer;

    static Configuration single_source(std::int64_t n) {
        if (n < 1) throw std::invalid_argument("particle count must be >= 1");
        Configuration c;
        c.particles = n;
        c.origin = n + 1;
        c.counts.assign(static_cast<std::size_t>(2 * n + 3), 0);
        c.odometer.assign(c.counts.size(), 0);
        c.counts[static_cast<std::size_t>(c.origin)] = static_cast<std::int32_t>(n);
        return c;
    }

    // Arbitrary placement, mostly for tests and the stateless selectors.
    // The arena is sized like single_source for the total particle count.
    static Configuration from_sites(std::initializer_list<std::pair<std::int64_t, std::int32_t>> sites) {
        std::int64_t n = 0;
        for (const auto& [site, cnt] : sites) n += cnt;
        Configuration c = single_source(n > 0 ? n : 1);
        c.counts.assign(c.counts.size(), 0);
        c.particles = n;
        for (const auto& [site, cnt] : sites) {
            if (site < c.min_site() || site > c.max_site())
                throw std::invalid_argument("site outside arena");
            c.counts[c.index_of(site)] = cnt;
        }
        return c;
    }

    std::size_t index_of(std::int64_t site) const noexcept {
        return static_cast<std::size_t>(site + origin);
    }
    std::int64_t site_of(std::size_t index) const noexcept {
        return static_cast<std::int64_t>(index) - origin;
    }
    std::int64_t min_site() const noexcept { return -origin; }
    std::int64_t max_site() const noexcept {
        return static_cast<std::int64_t>(counts.size()) - 1 - origin;
    }

    std::int32_t count(std::int64_t site) const { return counts.at(index_of(site)); }
    std::int64_t odometer_at(std::int64_t site) const { return odometer.at(index_of(site)); }

    bool stable() const noexcept {
        for (auto c : counts)
            if (c >= 2) return false;
        return true;
    }

    std::int64_t total() const noexcept {
        return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    }
};

// Execute one toppling at `site` with the given instruction. None leaves the
// counts untouched but still consumes the instruction: the odometer and the
// step counter advance in all four cases.
inline void topple(Configuration& cfg, std::int64_t site, Instruction instr) {
    const std::size_t i = cfg.index_of(site);
    if (cfg.counts[i] < 2)
        throw Error(Errc::ToppleStableSite,
                    "site " + std::to_string(site) + " holds " +
                        std::to_string(cfg.counts[i]) + " particles");
    if (site <= cfg.min_site() || site >= cfg.max_site())
        throw Error(Errc::ArenaOverflow,
                    "toppling reached arena boundary at site " + std::to_string(site));
    const std::int32_t left = sends_left(instr);
    const std::int32_t right = sends_right(instr);
    cfg.counts[i] -= left + right;
    cfg.counts[i - 1] += left;
    cfg.counts[i + 1] += right;
    ++cfg.odometer[i];
    ++cfg.steps;
}

}  // namespace sandpile
