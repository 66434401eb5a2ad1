#pragma once

#include <cstdint>

namespace sandpile {

// SplitMix64 finalizer (Vigna / Steele et al.); bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;
inline constexpr std::uint64_t kSiteStride = 0xd1b54a32d192ed03ull;
inline constexpr std::uint64_t kTrialStride = 0xda942042e4dd58b5ull;

// Per-trial seed: trials of one batch get decorrelated instruction stacks.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t trial_index) noexcept {
    return mix64(mix64(base_seed) + (static_cast<std::uint64_t>(trial_index) + 1) * kTrialStride);
}

// Minimal SplitMix64 stream, used for policy-level randomness only.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept { return mix64(state_ += kGoldenGamma); }

    // Uniform in [0, bound) via 128-bit multiply (Lemire's reduction).
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace sandpile
