#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sandpile/engine.hpp"
#include "sandpile/error.hpp"
#include "sandpile/observables.hpp"
#include "sandpile/policy.hpp"

namespace sandpile {

// Streaming mean/variance accumulator (Welford) with the parallel merge rule
// of Chan et al.; see the Wikipedia page "Algorithms for calculating
// variance", online and parallel algorithms.
struct StreamingStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x) noexcept {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
        if (x < min) min = x;
        if (x > max) max = x;
    }

    void merge(const StreamingStats& o) noexcept {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double delta = o.mean - mean;
        const auto total = count + o.count;
        mean += delta * static_cast<double>(o.count) / static_cast<double>(total);
        m2 += o.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(o.count) / static_cast<double>(total);
        count = total;
        if (o.min < min) min = o.min;
        if (o.max > max) max = o.max;
    }

    double variance() const noexcept {  // sample variance
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
    double stddev() const noexcept;
};

// Fixed-edge histogram with half-open bins [e_i, e_{i+1}) and explicit
// underflow/overflow buckets.
struct Histogram {
    std::vector<double> edges;
    std::vector<std::int64_t> counts;
    std::int64_t underflow = 0;
    std::int64_t overflow = 0;

    Histogram() = default;
    explicit Histogram(std::vector<double> edges);  // NON_MONOTONE_EDGES

    void add(double x) noexcept;
    void merge(const Histogram& o);  // SCHEMA_MISMATCH on differing edges
    std::int64_t total() const noexcept;
};

// Bin a batch of samples at once.
Histogram histogram(const std::vector<double>& samples, std::vector<double> edges);

// Default CLT histogram: 61 bins spanning [-4s, 4s] with s^2 = (1-p)/12.
std::vector<double> fluctuation_histogram_edges(double p, int bins = 61);

inline const std::vector<std::string> kAllObservables = {
    "K", "L", "R", "M", "S", "hole_present", "left_fluct", "right_fluct",
    "scaled_K", "scaled_S", "scaled_M2"};

struct BatchParams {
    std::int64_t n = 1;
    double p = 0.5;
    std::int64_t trials = 1;
    std::uint64_t base_seed = 0;
    TopplePolicy policy{};
    int workers = 0;                        // 0: hardware concurrency
    std::vector<std::string> observables;   // empty: all
    bool keep_trials = false;               // per-trial records for CSV
    bool keep_samples = false;              // raw fluctuation samples for KS
    std::int64_t sample_cap = 1000000;      // retained samples per observable
    std::vector<double> histogram_edges;    // empty: no histograms
    std::uint64_t max_topplings = 0;        // 0: engine default cap
};

struct TrialRecord {
    std::int64_t index = 0;
    std::uint64_t seed = 0;
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::optional<std::int64_t> hole;
    std::int64_t topplings = 0;
    std::int64_t mass_center = 0;
    std::int64_t square_mass = 0;
    double right_fluct = 0;
    double left_fluct = 0;
};

struct BatchSummary {
    BatchParams params;
    std::int64_t trials = 0;
    std::int64_t total_topplings = 0;
    double wall_seconds = 0.0;  // measured; never serialized to data files
    std::map<std::string, StreamingStats> observables;
    std::map<std::string, Histogram> histograms;  // left_fluct / right_fluct
    std::vector<TrialRecord> records;             // when keep_trials, in trial order
    std::map<std::string, std::vector<double>> samples;  // when keep_samples
};

// Runs `trials` independent stabilizations with per-trial derived seeds,
// validating every outcome, and aggregates observables. Deterministic for a
// fixed parameter set; histogram and record content do not depend on the
// worker count at all, floating accumulators only through summation order.
BatchSummary run_batch(const BatchParams& params);

// Parallel-statistics combination of two partial summaries.
// Throws SCHEMA_MISMATCH if observable keys or histogram edges differ.
BatchSummary merge(const BatchSummary& a, const BatchSummary& b);

}  // namespace sandpile
