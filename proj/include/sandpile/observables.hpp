#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "sandpile/configuration.hpp"
#include "sandpile/engine.hpp"

namespace sandpile {

// Leftmost and rightmost occupied sites. Throws EMPTY_CONFIGURATION when no
// site is occupied.
std::pair<std::int64_t, std::int64_t> boundaries(const Configuration& cfg);

// The unique vacant site strictly between left and right, or nullopt. More
// than one interior vacancy is impossible for a stabilized pile and signals
// an engine bug (MULTIPLE_HOLES).
std::optional<std::int64_t> find_hole(const Configuration& cfg, std::int64_t left,
                                      std::int64_t right);

// sum x * count(x), exact.
std::int64_t mass_center(const Configuration& cfg);

// sum x^2 * count(x), exact.
std::int64_t square_mass(const Configuration& cfg);

// Rescaled observables of one run. All fields derive from exact integers
// with a single terminal conversion to double; n/2 is kept exact via 2L+n.
struct FluctuationSample {
    std::int64_t n = 0;
    double left_fluct = 0;   // (L + n/2) / sqrt(n)
    double right_fluct = 0;  // (R - n/2) / sqrt(n)
    double scaled_k = 0;     // K / n^3
    double scaled_s = 0;     // S / n^3
    double scaled_m2 = 0;    // M^2 / n^3
    bool hole_present = false;
};

FluctuationSample fluctuation_sample(const StabilizationOutcome& outcome, std::int64_t n);

// Identity of a final shape for cross-checking laws: boundaries plus the
// optional vacancy position.
struct BoundarySignature {
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::optional<std::int64_t> hole;

    auto operator<=>(const BoundarySignature&) const = default;
};

}  // namespace sandpile
