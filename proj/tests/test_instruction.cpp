#include <array>
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "sandpile/instruction.hpp"

using namespace sandpile;

TEST_CASE("instruction bit composition") {
    CHECK(instruction_from_bits(false, false) == Instruction::None);
    CHECK(instruction_from_bits(true, false) == Instruction::Left);
    CHECK(instruction_from_bits(false, true) == Instruction::Right);
    CHECK(instruction_from_bits(true, true) == Instruction::Both);
    CHECK(sends_left(Instruction::Both));
    CHECK(sends_right(Instruction::Both));
    CHECK(!sends_left(Instruction::Right));
    CHECK(!sends_right(Instruction::None));
}

TEST_CASE("mass deltas per instruction") {
    CHECK(delta_mass_center(Instruction::Left) == -1);
    CHECK(delta_mass_center(Instruction::Right) == 1);
    CHECK(delta_mass_center(Instruction::Both) == 0);
    CHECK(delta_mass_center(Instruction::None) == 0);

    CHECK(delta_square_mass(Instruction::Left, 2) == -3);
    CHECK(delta_square_mass(Instruction::Right, 2) == 5);
    CHECK(delta_square_mass(Instruction::Both, 2) == 2);
    CHECK(delta_square_mass(Instruction::Both, -7) == 2);
    CHECK(delta_square_mass(Instruction::None, 5) == 0);
}

TEST_CASE("source is a pure function of (seed, site, index)") {
    const InstructionSource source(42, 0.5);
    CHECK(source.at(0, 0) == source.at(0, 0));
    CHECK(source.at(-17, 123456) == source.at(-17, 123456));
    CHECK(source.at(3, 9) == source.decode(source.site_stream(3), 9));

    // Distinct seeds must disagree somewhere early.
    const InstructionSource other(43, 0.5);
    bool differs = false;
    for (std::uint64_t i = 0; i < 64 && !differs; ++i)
        differs = source.at(0, i) != other.at(0, i);
    CHECK(differs);
}

TEST_CASE("probability validation") {
    CHECK_THROWS_AS(InstructionSource(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(InstructionSource(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(InstructionSource(1, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(InstructionSource(1, 1.5), std::invalid_argument);
}

namespace {

std::array<double, 4> empirical_frequencies(const InstructionSource& source, std::int64_t site,
                                            std::int64_t draws) {
    std::array<std::int64_t, 4> counts{};
    for (std::int64_t i = 0; i < draws; ++i)
        ++counts[static_cast<std::size_t>(source.at(site, static_cast<std::uint64_t>(i)))];
    std::array<double, 4> freq{};
    for (std::size_t k = 0; k < 4; ++k)
        freq[k] = static_cast<double>(counts[k]) / static_cast<double>(draws);
    return freq;
}

}  // namespace

TEST_CASE("marginal frequencies match the four-way table within 4 sigma") {
    const std::int64_t draws = 1000000;
    struct Case {
        double p;
        std::uint64_t seed;
    };
    for (const auto& [p, seed] : {Case{0.5, 7}, Case{0.3, 8}}) {
        const InstructionSource source(seed, p);
        const double expect[4] = {(1 - p) * (1 - p), p * (1 - p), p * (1 - p), p * p};
        const auto freq = empirical_frequencies(source, 0, draws);
        for (std::size_t k = 0; k < 4; ++k) {
            const double sigma = std::sqrt(expect[k] * (1 - expect[k]) / draws);
            CHECK(std::fabs(freq[k] - expect[k]) <= 4 * sigma);
        }
    }
}

TEST_CASE("consecutive stack entries look independent (pair frequencies)") {
    const InstructionSource source(99, 0.5);
    const std::int64_t pairs = 500000;
    std::array<std::int64_t, 16> counts{};
    for (std::int64_t i = 0; i < pairs; ++i) {
        const auto a = static_cast<std::size_t>(source.at(1, 2 * static_cast<std::uint64_t>(i)));
        const auto b =
            static_cast<std::size_t>(source.at(1, 2 * static_cast<std::uint64_t>(i) + 1));
        ++counts[4 * a + b];
    }
    const double sigma = std::sqrt((1.0 / 16) * (15.0 / 16) / pairs);
    for (const auto c : counts) {
        const double freq = static_cast<double>(c) / static_cast<double>(pairs);
        CHECK(std::fabs(freq - 1.0 / 16) <= 4 * sigma);
    }
}
