#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sandpile/configuration.hpp"
#include "sandpile/instruction.hpp"
#include "sandpile/policy.hpp"

namespace sandpile {

struct StabilizeOptions {
    TopplePolicy policy{};
    bool trace = false;           // record (M_k, S_k) after every step
    std::uint64_t max_topplings = 0;  // 0: default cap 100 * n^3 / (2p)
};

struct StabilizationOutcome {
    Configuration config;  // final stable configuration; steps == topplings
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::optional<std::int64_t> hole;  // the unique interior vacancy, if any
    std::int64_t topplings = 0;
    std::int64_t mass_center = 0;  // sum x*count(x), tracked incrementally
    std::int64_t square_mass = 0;  // sum x^2*count(x), tracked incrementally
    // (mass_center_k, square_mass_k) for k = 0..topplings when tracing.
    std::vector<std::pair<std::int64_t, std::int64_t>> trace;
};

std::uint64_t default_toppling_cap(std::int64_t n, double p);

// Stabilize n particles dropped at the origin, consuming the instruction
// stacks of `source` under the given toppling order.
StabilizationOutcome stabilize(std::int64_t n, const InstructionSource& source,
                               const StabilizeOptions& options = {});

// Full re-derivation of every structural invariant of a finished run:
// stability, particle conservation, boundary occupancy, at most one interior
// vacancy, width in {n-1, n}, and agreement of the incrementally tracked
// mass sums with a recomputation from the final counts. Throws on violation.
void validate_outcome(const StabilizationOutcome& outcome);

}  // namespace sandpile
