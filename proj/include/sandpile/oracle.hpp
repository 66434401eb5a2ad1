#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sandpile/observables.hpp"
#include "sandpile/rational.hpp"

namespace sandpile {

// Exact finite-n law of the stabilized pile, obtained by enumerating the
// reachable configuration chain and solving its absorption problem with
// rational arithmetic. A correctness anchor for the Monte Carlo engine, not
// a scaling tool.

enum class SelectionOrder { Leftmost, Fifo };

struct OracleOptions {
    std::int64_t state_limit = 200000;
};

inline constexpr std::int64_t kOracleDefaultMaxN = 6;

// Chain node: counts over sites [-n, n]; Fifo nodes additionally carry the
// pending queue of unstable sites, because FIFO selection is a function of
// history, not of the counts alone.
struct ChainNode {
    std::vector<std::int32_t> counts;
    std::vector<std::int32_t> queue;

    auto operator<=>(const ChainNode&) const = default;
};

// Outgoing arcs of a transient node, indexed by instruction kind. Under the
// Leftmost order the None outcome is a genuine self-loop (selection depends
// only on the counts) and is collapsed analytically: the remaining outcomes
// carry conditional probabilities (1-p)/(2-p), (1-p)/(2-p), p/(2-p) and each
// collapsed step stands for 1/(p(2-p)) raw topplings in expectation. Under
// Fifo the None outcome rotates the queue, so it is kept as a real arc with
// probability (1-p)^2 and expected steps need no rescaling.
struct ChainArcs {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t both = -1;
    std::int32_t none = -1;  // -1 when collapsed (Leftmost)
};

struct ChainGraph {
    std::int64_t n = 0;
    SelectionOrder order = SelectionOrder::Leftmost;
    std::vector<ChainNode> nodes;  // node 0 is the start n*delta_0
    std::vector<bool> absorbing;
    std::vector<ChainArcs> arcs;  // parallel to nodes; unused for absorbing
    std::int64_t transient_count = 0;
    std::int64_t absorbing_count = 0;
};

ChainGraph enumerate_states(std::int64_t n, SelectionOrder order = SelectionOrder::Leftmost,
                            const OracleOptions& options = {});

struct ExactOutcome {
    std::vector<std::int32_t> counts;  // over sites [-n, n]
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::optional<std::int64_t> hole;
    std::int64_t mass_center = 0;
    std::int64_t square_mass = 0;
    Rational probability;
};

struct ExactDistribution {
    std::int64_t n = 0;
    Rational p;
    SelectionOrder order = SelectionOrder::Leftmost;
    std::vector<ExactOutcome> support;  // sorted by counts, probabilities sum to 1
    Rational expected_topplings;        // E[K], raw steps including None
    Rational mean_mass_center;          // E[M]
    Rational mean_mass_center_sq;       // E[M^2]
    Rational mean_square_mass;          // E[S]
};

ExactDistribution absorption_distribution(std::int64_t n, const Rational& p,
                                          SelectionOrder order = SelectionOrder::Leftmost,
                                          const OracleOptions& options = {});

struct ExactMarginals {
    std::map<std::int64_t, Rational> left_law;
    std::map<std::int64_t, Rational> right_law;
    std::map<std::int64_t, Rational> hole_position_law;  // conditional on presence, unnormalized
    Rational hole_present;
    std::map<BoundarySignature, Rational> joint;  // law of (L, R, hole)
    Rational expected_topplings;
    Rational mean_square_mass;
};

ExactMarginals marginals(const ExactDistribution& dist);

}  // namespace sandpile
