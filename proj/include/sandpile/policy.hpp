#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sandpile/configuration.hpp"
#include "sandpile/rng.hpp"

namespace sandpile {

enum class PolicyKind { Leftmost, FifoQueue, Random };

struct TopplePolicy {
    PolicyKind kind = PolicyKind::Leftmost;
    std::uint64_t policy_seed = 0;  // Random only
};

// Selectors pick the next site to topple. They only ever return sites with
// count >= 2 and return nullopt exactly when the configuration is stable.
// The engine calls toppled() after every toppling so selectors can maintain
// their bookkeeping incrementally.

// Canonical order: always the leftmost unstable site. A toppling at v can
// create a new unstable site left of v only at v-1, so the cursor backs up
// by at most one per toppling and selection is amortized O(1).
class LeftmostSelector {
public:
    void reset(const Configuration& cfg) {
        cursor_ = 0;
        last_ = static_cast<std::int64_t>(cfg.counts.size()) - 1;
    }

    std::optional<std::int64_t> next(const Configuration& cfg) noexcept {
        while (cursor_ <= last_ && cfg.counts[static_cast<std::size_t>(cursor_)] < 2) ++cursor_;
        if (cursor_ > last_) return std::nullopt;
        return cursor_ - cfg.origin;
    }

    void toppled(const Configuration& cfg, std::int64_t site, Instruction) noexcept {
        const std::size_t i = cfg.index_of(site);
        if (i > 0 && cfg.counts[i - 1] >= 2) cursor_ = static_cast<std::int64_t>(i) - 1;
    }

private:
    std::int64_t cursor_ = 0;
    std::int64_t last_ = 0;
};

// First-in-first-out queue of unstable sites. A queued site stays unstable
// until its own toppling (other topplings only add particles), so the queue
// holds exactly the unstable sites, each once. After a toppling the freshly
// unstable neighbours enter the queue first and the site itself re-enters
// last if it is still unstable.
class FifoSelector {
public:
    void reset(const Configuration& cfg) {
        queue_.clear();
        queued_.assign(cfg.counts.size(), 0);
        for (std::size_t i = 0; i < cfg.counts.size(); ++i) {
            if (cfg.counts[i] >= 2) {
                queue_.push_back(i);
                queued_[i] = 1;
            }
        }
    }

    std::optional<std::int64_t> next(const Configuration& cfg) noexcept {
        if (queue_.empty()) return std::nullopt;
        return cfg.site_of(queue_.front());
    }

    void toppled(const Configuration& cfg, std::int64_t site, Instruction) {
        const std::size_t i = cfg.index_of(site);
        queue_.pop_front();
        queued_[i] = 0;
        for (std::size_t j : {i - 1, i + 1, i}) {
            if (cfg.counts[j] >= 2 && !queued_[j]) {
                queue_.push_back(j);
                queued_[j] = 1;
            }
        }
    }

private:
    std::deque<std::size_t> queue_;
    std::vector<std::uint8_t> queued_;
};

// Uniformly random unstable site, driven by a dedicated policy seed that is
// independent of the instruction stacks.
class RandomSelector {
public:
    explicit RandomSelector(std::uint64_t policy_seed) : rng_(policy_seed) {}

    void reset(const Configuration& cfg) {
        position_.assign(cfg.counts.size(), -1);
        unstable_.clear();
        for (std::size_t i = 0; i < cfg.counts.size(); ++i)
            if (cfg.counts[i] >= 2) insert(i);
    }

    std::optional<std::int64_t> next(const Configuration& cfg) noexcept {
        if (unstable_.empty()) return std::nullopt;
        const std::size_t pick = rng_.next_below(unstable_.size());
        return cfg.site_of(unstable_[pick]);
    }

    void toppled(const Configuration& cfg, std::int64_t site, Instruction) {
        const std::size_t i = cfg.index_of(site);
        for (std::size_t j : {i - 1, i, i + 1}) {
            const bool unstable = cfg.counts[j] >= 2;
            const bool member = position_[j] >= 0;
            if (unstable && !member) insert(j);
            if (!unstable && member) erase(j);
        }
    }

private:
    void insert(std::size_t i) {
        position_[i] = static_cast<std::int64_t>(unstable_.size());
        unstable_.push_back(i);
    }
    void erase(std::size_t i) {
        const std::size_t pos = static_cast<std::size_t>(position_[i]);
        const std::size_t back = unstable_.back();
        unstable_[pos] = back;
        position_[back] = static_cast<std::int64_t>(pos);
        unstable_.pop_back();
        position_[i] = -1;
    }

    std::vector<std::size_t> unstable_;
    std::vector<std::int64_t> position_;
    SplitMix64 rng_{0};
};

// Stateless query: which site would the policy topple next in `cfg`?
// Returns nullopt when the configuration is stable.
std::optional<std::int64_t> select_next(const TopplePolicy& policy, const Configuration& cfg);

}  // namespace sandpile
