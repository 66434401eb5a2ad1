#include "sandpile/engine.hpp"

#include <cmath>
#include <string>

#include "sandpile/error.hpp"
#include "sandpile/observables.hpp"

namespace sandpile {

std::uint64_t default_toppling_cap(std::int64_t n, double p) {
    // 100x the E[K] <= n^3/(2p) bound; reaching it means the engine is broken.
    const double cap = 100.0 * static_cast<double>(n) * static_cast<double>(n) *
                       static_cast<double>(n) / (2.0 * p);
    return cap < 1000.0 ? 1000 : static_cast<std::uint64_t>(cap);
}

namespace {

[[noreturn]] void throw_adjacent_vacancy(std::int64_t site, std::uint64_t seed) {
    throw Error(Errc::InvariantViolation, "adjacent vacant toppled sites around " +
                                              std::to_string(site) + " (seed=" +
                                              std::to_string(seed) + ")");
}

[[noreturn]] void throw_no_termination(std::uint64_t cap, std::int64_t n, std::uint64_t seed) {
    throw Error(Errc::NoTermination, "toppling cap " + std::to_string(cap) + " exceeded (n=" +
                                         std::to_string(n) + ", seed=" + std::to_string(seed) +
                                         ")");
}

void finish_outcome(StabilizationOutcome& out, std::int64_t m, std::int64_t s) {
    out.topplings = out.config.steps;
    out.mass_center = m;
    out.square_mass = s;
    auto [left, right] = boundaries(out.config);
    out.left = left;
    out.right = right;
    out.hole = find_hole(out.config, left, right);
}

void trace_step(StabilizationOutcome& out, std::int64_t m, std::int64_t s) {
    out.trace.emplace_back(m, s);
    if (out.config.total() != out.config.particles)
        throw Error(Errc::InvariantViolation,
                    "particle count drifted at step " + std::to_string(out.config.steps));
}

// Leftmost-order fast path. The selection cursor, toppling rule, mass-sum
// updates and the vacancy tripwire are fused into one branch-light loop over
// raw arrays; this is where virtually all simulation time is spent.
StabilizationOutcome stabilize_leftmost(std::int64_t n, const InstructionSource& source,
                                        const StabilizeOptions& options) {
    StabilizationOutcome out;
    out.config = Configuration::single_source(n);
    Configuration& cfg = out.config;

    const std::int64_t last = static_cast<std::int64_t>(cfg.counts.size()) - 1;
    const std::int64_t origin = cfg.origin;
    std::vector<std::uint64_t> stream_base(cfg.counts.size());
    for (std::int64_t i = 0; i <= last; ++i)
        stream_base[static_cast<std::size_t>(i)] = source.site_stream(i - origin);

    const std::uint64_t cap =
        options.max_topplings ? options.max_topplings : default_toppling_cap(n, source.p());
    const bool trace = options.trace;

    std::int32_t* const counts = cfg.counts.data();
    std::int64_t* const odometer = cfg.odometer.data();
    const std::uint64_t* const stream = stream_base.data();

    std::int64_t steps = 0;
    std::int64_t m = 0;
    std::int64_t s = 0;
    if (trace) out.trace.emplace_back(m, s);

    std::int64_t i = origin;  // leftmost unstable index; nothing unstable left of it
    while (counts[i] < 2) {
        if (++i > last) {
            finish_outcome(out, m, s);
            return out;
        }
    }

    for (;;) {
        if (i == 0 || i == last) {
            cfg.steps = steps;
            throw Error(Errc::ArenaOverflow,
                        "toppling reached arena boundary at site " + std::to_string(i - origin));
        }
        if (static_cast<std::uint64_t>(steps) >= cap) {
            cfg.steps = steps;
            throw_no_termination(cap, n, source.seed());
        }

        const auto u = static_cast<std::uint64_t>(odometer[i]);
        const Instruction instr = source.decode(stream[i], u);
        const auto l = static_cast<std::int64_t>(sends_left(instr));
        const auto r = static_cast<std::int64_t>(sends_right(instr));
        const std::int64_t moved = l + r;
        const std::int64_t drift = r - l;
        const std::int32_t remaining = counts[i] - static_cast<std::int32_t>(moved);
        counts[i] = remaining;
        counts[i - 1] += static_cast<std::int32_t>(l);
        counts[i + 1] += static_cast<std::int32_t>(r);
        odometer[i] = static_cast<std::int64_t>(u + 1);
        ++steps;
        m += drift;
        s += 2 * drift * (i - origin) + moved;

        // Two adjacent vacant sites that both toppled before are impossible:
        // the later of the two must have sent a particle into the other.
        // Only the toppled site can have just become vacant.
        if (remaining == 0) {
            if ((counts[i - 1] == 0 && odometer[i - 1] > 0) ||
                (counts[i + 1] == 0 && odometer[i + 1] > 0)) {
                cfg.steps = steps;
                throw_adjacent_vacancy(i - origin, source.seed());
            }
        }
        if (trace) {
            cfg.steps = steps;
            trace_step(out, m, s);
        }

        // A toppling at i can destabilize a site left of i only at i-1.
        i -= (counts[i - 1] >= 2);
        while (counts[i] < 2) {
            if (++i > last) {
                cfg.steps = steps;
                finish_outcome(out, m, s);
                return out;
            }
        }
    }
}

template <class Selector>
StabilizationOutcome stabilize_with(std::int64_t n, const InstructionSource& source,
                                    Selector selector, const StabilizeOptions& options) {
    StabilizationOutcome out;
    out.config = Configuration::single_source(n);
    Configuration& cfg = out.config;

    std::vector<std::uint64_t> stream_base(cfg.counts.size());
    for (std::size_t i = 0; i < stream_base.size(); ++i)
        stream_base[i] = source.site_stream(cfg.site_of(i));

    const std::uint64_t cap =
        options.max_topplings ? options.max_topplings : default_toppling_cap(n, source.p());

    std::int64_t m = 0;
    std::int64_t s = 0;
    if (options.trace) out.trace.emplace_back(m, s);

    selector.reset(cfg);
    while (auto selected = selector.next(cfg)) {
        const std::int64_t v = *selected;
        if (static_cast<std::uint64_t>(cfg.steps) >= cap)
            throw_no_termination(cap, n, source.seed());

        const std::size_t i = cfg.index_of(v);
        const Instruction instr = source.decode(stream_base[i], cfg.odometer[i]);
        topple(cfg, v, instr);
        m += delta_mass_center(instr);
        s += delta_square_mass(instr, v);

        // Two adjacent vacant sites that both toppled before are impossible:
        // the later of the two must have sent a particle into the other.
        // Only the toppled site can have just become vacant, so the check is
        // O(1) per step and stays on permanently.
        if (cfg.counts[i] == 0) {
            if ((cfg.counts[i - 1] == 0 && cfg.odometer[i - 1] > 0) ||
                (cfg.counts[i + 1] == 0 && cfg.odometer[i + 1] > 0))
                throw_adjacent_vacancy(v, source.seed());
        }

        selector.toppled(cfg, v, instr);
        if (options.trace) trace_step(out, m, s);
    }

    finish_outcome(out, m, s);
    return out;
}

}  // namespace

StabilizationOutcome stabilize(std::int64_t n, const InstructionSource& source,
                               const StabilizeOptions& options) {
    switch (options.policy.kind) {
        case PolicyKind::Leftmost:
            return stabilize_leftmost(n, source, options);
        case PolicyKind::FifoQueue:
            return stabilize_with(n, source, FifoSelector{}, options);
        case PolicyKind::Random:
            return stabilize_with(n, source, RandomSelector{options.policy.policy_seed}, options);
    }
    throw std::invalid_argument("unknown toppling policy");
}

void validate_outcome(const StabilizationOutcome& outcome) {
    const Configuration& cfg = outcome.config;
    const std::int64_t n = cfg.particles;

    std::int64_t total = 0;
    for (auto c : cfg.counts) {
        if (c < 0 || c > 1)
            throw Error(Errc::InvariantViolation,
                        "final count " + std::to_string(c) + " outside {0,1}");
        total += c;
    }
    if (total != n)
        throw Error(Errc::InvariantViolation, "particles not conserved: " + std::to_string(total) +
                                                  " of " + std::to_string(n));

    auto [left, right] = boundaries(cfg);
    if (left != outcome.left || right != outcome.right)
        throw Error(Errc::InvariantViolation, "recorded boundaries disagree with final counts");
    if (cfg.count(left) != 1 || cfg.count(right) != 1)
        throw Error(Errc::InvariantViolation, "boundary site not occupied");

    const auto hole = find_hole(cfg, left, right);  // throws on two vacancies
    if (hole != outcome.hole)
        throw Error(Errc::InvariantViolation, "recorded hole disagrees with final counts");

    const std::int64_t width = right - left;
    if (width != n - 1 && width != n)
        throw Error(Errc::InvariantViolation, "width " + std::to_string(width) +
                                                  " outside {n-1, n} for n=" + std::to_string(n));
    if ((width == n) != hole.has_value())
        throw Error(Errc::InvariantViolation, "width and vacancy are inconsistent");

    // The incrementally tracked sums must match a recomputation exactly.
    if (mass_center(cfg) != outcome.mass_center)
        throw Error(Errc::InvariantViolation, "mass center mismatch between paths");
    if (square_mass(cfg) != outcome.square_mass)
        throw Error(Errc::InvariantViolation, "squared mass mismatch between paths");
}

}  // namespace sandpile
