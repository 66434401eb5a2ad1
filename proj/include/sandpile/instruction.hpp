#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sandpile/rng.hpp"

namespace sandpile {

// One toppling instruction. An unstable site sends one particle to each
// neighbour independently with probability p, so the four kinds occur with
//   P(Left) = P(Right) = p(1-p),  P(Both) = p^2,  P(None) = (1-p)^2.
enum class Instruction : std::uint8_t {
    None = 0,
    Left = 1,
    Right = 2,
    Both = 3,
};

constexpr Instruction instruction_from_bits(bool send_left, bool send_right) noexcept {
    return static_cast<Instruction>(static_cast<unsigned>(send_left) |
                                    (static_cast<unsigned>(send_right) << 1));
}

constexpr bool sends_left(Instruction i) noexcept {
    return static_cast<unsigned>(i) & 1u;
}
constexpr bool sends_right(Instruction i) noexcept {
    return static_cast<unsigned>(i) & 2u;
}

constexpr const char* instruction_name(Instruction i) noexcept {
    switch (i) {
        case Instruction::None:  return "NONE";
        case Instruction::Left:  return "LEFT";
        case Instruction::Right: return "RIGHT";
        case Instruction::Both:  return "BOTH";
    }
    return "?";
}

// Change of the mass center sum(x*count(x)) caused by one toppling.
constexpr int delta_mass_center(Instruction i) noexcept {
    return static_cast<int>(sends_right(i)) - static_cast<int>(sends_left(i));
}

// Change of the squared-mass sum(x^2*count(x)) for a toppling at `site`:
// left move contributes 1-2*site, right move 1+2*site.
constexpr std::int64_t delta_square_mass(Instruction i, std::int64_t site) noexcept {
    std::int64_t d = 0;
    if (sends_left(i)) d += 1 - 2 * site;
    if (sends_right(i)) d += 1 + 2 * site;
    return d;
}

// Replayable instruction stacks, keyed by (seed, site, index). Instead of
// materializing the stacks, instruction i at a site is read off a counter
// based hash: per site a SplitMix64 stream whose state base is itself a
// mixed function of the seed. This keeps memory O(1) and makes the stacks
// identical no matter in which order sites consume them.
class InstructionSource {
public:
    InstructionSource(std::uint64_t seed, double p) : seed_(seed), p_(p) {
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("toppling probability must lie strictly inside (0,1)");
        // Quantize p to a 32-bit threshold; both Bernoulli lanes compare
        // against the same threshold on independent halves of the hash.
        double scaled = std::ldexp(p, 32);
        auto t = static_cast<std::uint64_t>(std::llround(scaled));
        if (t < 1) t = 1;
        if (t > 0xffffffffull) t = 0xffffffffull;
        threshold_ = t;
    }

    std::uint64_t seed() const noexcept { return seed_; }
    double p() const noexcept { return p_; }

    // State base of the per-site stream; hoisted out of the toppling loop.
    std::uint64_t site_stream(std::int64_t site) const noexcept {
        return mix64(seed_ + static_cast<std::uint64_t>(site) * kSiteStride);
    }

    Instruction decode(std::uint64_t site_stream_base, std::uint64_t index) const noexcept {
        const std::uint64_t h = mix64(site_stream_base + index * kGoldenGamma);
        const bool left = static_cast<std::uint32_t>(h) < threshold_;
        const bool right = static_cast<std::uint32_t>(h >> 32) < threshold_;
        return instruction_from_bits(left, right);
    }

    // Instruction xi_{site,index}; pure in (seed, site, index).
    Instruction at(std::int64_t site, std::uint64_t index) const noexcept {
        return decode(site_stream(site), index);
    }

private:
    std::uint64_t seed_;
    std::uint64_t threshold_;
    double p_;
};

}  // namespace sandpile
