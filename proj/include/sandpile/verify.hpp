#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sandpile/rational.hpp"
#include "sandpile/stats.hpp"

namespace sandpile {

// Verification checks backing the `verify` command and the acceptance
// suite. Each returns one TestReport per sub-check; reports whose params
// carry "diagnostic": true are informational and excluded from pass/fail
// aggregation.

struct VerifyDefaults {
    std::uint64_t seed = 1;
    int workers = 0;
};

// Structural invariants over full batches: counts in {0,1}, n occupied
// sites, at most one interior vacancy, width in {n-1, n}, and no step with
// two adjacent vacant toppled sites. Zero violations pass.
std::vector<TestReport> verify_structure(std::int64_t n, double p, std::int64_t trials,
                                         const VerifyDefaults& d = {});

// On fixed instruction stacks the final counts and odometer are identical
// under every toppling order; compares Leftmost, FIFO and Random bit for bit.
std::vector<TestReport> verify_abelian(std::int64_t n, double p, std::int64_t seeds,
                                       const VerifyDefaults& d = {});

// Exact one-step identities, summed over the four instruction outcomes with
// rational weights: E[dM] = 0, E[(dM)^2] = 2p(1-p), E[dS] = 2p.
std::vector<TestReport> verify_identities();

// Exact absorption-law identities for n <= n_max:
// E[K] <= n^3/(2p), E[M] = 0, E[M^2] = 2p(1-p)E[K] <= (1-p)n^3,
// E[S] = 2pE[K], reflection symmetry, one-vacancy structure of the support,
// and for small n equality of the Leftmost and FIFO enumerations.
std::vector<TestReport> verify_oracle_identities(std::int64_t n_max = 5,
                                                 const VerifyDefaults& d = {});

// Monte Carlo vs exact law of (L, R, hole): total variation and chi-square.
std::vector<TestReport> verify_oracle_mc(std::int64_t n, const Rational& p,
                                         std::int64_t trials, const VerifyDefaults& d = {});

// Limit-shape containment events at tolerance eps.
std::vector<TestReport> verify_lln(std::int64_t n, double p, std::int64_t trials, double eps,
                                   double min_probability, const VerifyDefaults& d = {});

// Scaled means: K/n^3 vs 1/(24p), S/n^3 vs 1/12, M^2/n^3 vs (1-p)/12.
std::vector<TestReport> verify_moments(std::int64_t n, double p, std::int64_t trials,
                                       const VerifyDefaults& d = {});

// Boundary-fluctuation CLT: mean, variance and KS tests against
// N(0, (1-p)/12) for both boundaries, plus a diagnostic KS against the
// lattice-discretized normal (integer boundaries make the finite-n law a
// lattice distribution; the diagnostic separates discretization error from
// genuine non-normality).
std::vector<TestReport> verify_clt(std::int64_t n, double p, std::int64_t trials,
                                   const VerifyDefaults& d = {});

bool all_pass(const std::vector<TestReport>& reports);

}  // namespace sandpile
