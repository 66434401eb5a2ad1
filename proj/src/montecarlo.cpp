#include "sandpile/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "sandpile/rng.hpp"

namespace sandpile {

double StreamingStats::stddev() const noexcept { return std::sqrt(variance()); }

Histogram::Histogram(std::vector<double> e) : edges(std::move(e)) {
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw Error(Errc::NonMonotoneEdges, "histogram edges must be strictly increasing");
    counts.assign(edges.size() - 1, 0);
}

void Histogram::add(double x) noexcept {
    if (x < edges.front()) {
        ++underflow;
        return;
    }
    if (x >= edges.back()) {
        ++overflow;
        return;
    }
    // Half-open bins: a sample on an interior edge belongs to the bin to its right.
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
}

void Histogram::merge(const Histogram& o) {
    if (edges != o.edges)
        throw Error(Errc::SchemaMismatch, "histogram bin edges differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    underflow += o.underflow;
    overflow += o.overflow;
}

std::int64_t Histogram::total() const noexcept {
    std::int64_t sum = underflow + overflow;
    for (auto c : counts) sum += c;
    return sum;
}

Histogram histogram(const std::vector<double>& samples, std::vector<double> edges) {
    Histogram h(std::move(edges));
    for (double x : samples) h.add(x);
    return h;
}

std::vector<double> fluctuation_histogram_edges(double p, int bins) {
    const double sigma = std::sqrt((1.0 - p) / 12.0);
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = -4.0 * sigma + 8.0 * sigma * static_cast<double>(i) / bins;
    return edges;
}

namespace {

const std::vector<std::string>& batch_observables(const BatchParams& params) {
    return params.observables.empty() ? kAllObservables : params.observables;
}

double observable_value(const std::string& key, const TrialRecord& rec,
                        const FluctuationSample& f) {
    if (key == "K") return static_cast<double>(rec.topplings);
    if (key == "L") return static_cast<double>(rec.left);
    if (key == "R") return static_cast<double>(rec.right);
    if (key == "M") return static_cast<double>(rec.mass_center);
    if (key == "S") return static_cast<double>(rec.square_mass);
    if (key == "hole_present") return rec.hole ? 1.0 : 0.0;
    if (key == "left_fluct") return f.left_fluct;
    if (key == "right_fluct") return f.right_fluct;
    if (key == "scaled_K") return f.scaled_k;
    if (key == "scaled_S") return f.scaled_s;
    if (key == "scaled_M2") return f.scaled_m2;
    throw std::invalid_argument("unknown observable '" + key + "'");
}

BatchSummary empty_summary(const BatchParams& params) {
    BatchSummary s;
    s.params = params;
    for (const std::string& key : batch_observables(params)) s.observables[key];
    if (!params.histogram_edges.empty()) {
        s.histograms.emplace("left_fluct", Histogram(params.histogram_edges));
        s.histograms.emplace("right_fluct", Histogram(params.histogram_edges));
    }
    return s;
}

BatchSummary run_range(const BatchParams& params, std::int64_t lo, std::int64_t hi) {
    BatchSummary s = empty_summary(params);
    const auto& keys = batch_observables(params);

    StabilizeOptions opt;
    opt.policy = params.policy;
    opt.max_topplings = params.max_topplings;

    for (std::int64_t i = lo; i < hi; ++i) {
        const std::uint64_t seed = trial_seed(params.base_seed, i);
        try {
            // Random order draws its own stream so instruction stacks stay
            // comparable across policies for a given seed.
            if (params.policy.kind == PolicyKind::Random)
                opt.policy.policy_seed = mix64(seed ^ kSiteStride);
            const InstructionSource source(seed, params.p);
            const StabilizationOutcome out = stabilize(params.n, source, opt);
            validate_outcome(out);
            const FluctuationSample f = fluctuation_sample(out, params.n);

            TrialRecord rec;
            rec.index = i;
            rec.seed = seed;
            rec.left = out.left;
            rec.right = out.right;
            rec.hole = out.hole;
            rec.topplings = out.topplings;
            rec.mass_center = out.mass_center;
            rec.square_mass = out.square_mass;
            rec.right_fluct = f.right_fluct;
            rec.left_fluct = f.left_fluct;

            for (const std::string& key : keys)
                s.observables[key].add(observable_value(key, rec, f));
            for (auto& [key, hist] : s.histograms)
                hist.add(key == "left_fluct" ? f.left_fluct : f.right_fluct);
            if (params.keep_samples && i < params.sample_cap) {
                s.samples["left_fluct"].push_back(f.left_fluct);
                s.samples["right_fluct"].push_back(f.right_fluct);
            }
            if (params.keep_trials) s.records.push_back(rec);

            ++s.trials;
            s.total_topplings += out.topplings;
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " [trial " + std::to_string(i) +
                                      ", derived seed " + std::to_string(seed) + "]");
        }
    }
    return s;
}

}  // namespace

BatchSummary merge(const BatchSummary& a, const BatchSummary& b) {
    auto keys_of = [](const BatchSummary& s) {
        std::vector<std::string> keys;
        for (const auto& [k, v] : s.observables) keys.push_back(k);
        return keys;
    };
    if (keys_of(a) != keys_of(b))
        throw Error(Errc::SchemaMismatch, "observable sets differ");
    BatchSummary out = a;
    for (const auto& [key, stats] : b.observables) out.observables[key].merge(stats);
    if (a.histograms.size() != b.histograms.size())
        throw Error(Errc::SchemaMismatch, "histogram sets differ");
    for (const auto& [key, hist] : b.histograms) {
        auto it = out.histograms.find(key);
        if (it == out.histograms.end())
            throw Error(Errc::SchemaMismatch, "histogram sets differ");
        it->second.merge(hist);
    }
    out.trials += b.trials;
    out.total_topplings += b.total_topplings;
    out.wall_seconds += b.wall_seconds;
    out.records.insert(out.records.end(), b.records.begin(), b.records.end());
    for (const auto& [key, vec] : b.samples) {
        auto& dst = out.samples[key];
        dst.insert(dst.end(), vec.begin(), vec.end());
    }
    return out;
}

BatchSummary run_batch(const BatchParams& params) {
    if (params.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (params.n < 1) throw std::invalid_argument("particle count must be >= 1");
    if (!(params.p > 0.0 && params.p < 1.0))
        throw std::invalid_argument("toppling probability must lie strictly inside (0,1)");

    const auto t0 = std::chrono::steady_clock::now();

    int workers = params.workers > 0
                      ? params.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<std::int64_t>(workers) > params.trials)
        workers = static_cast<int>(params.trials);

    std::vector<BatchSummary> parts(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    const std::int64_t chunk = (params.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(params.trials, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            try {
                parts[static_cast<std::size_t>(w)] = run_range(params, lo, hi);
            } catch (...) {
                failures[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    // Contiguous blocks merged in worker order keep records and samples in
    // trial order and make the aggregation independent of scheduling.
    BatchSummary result = parts[0];
    for (std::size_t w = 1; w < parts.size(); ++w) result = merge(result, parts[w]);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace sandpile
