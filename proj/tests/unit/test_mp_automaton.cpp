#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <pksm/mp_automaton.hpp>

#include "support/oracles.hpp"

using namespace pksm;
using namespace pksm::testing;

namespace {
std::vector<state_t> fails(const MpAutomaton& a) {
    auto f = a.fail_table();
    return {f.begin(), f.end()};
}
} // namespace

TEST(MpAutomaton, FailureFunctionExamples) {
    EXPECT_EQ(fails(MpAutomaton(packed("ababca"))), (std::vector<state_t>{0, 0, 1, 2, 0, 1}));
    EXPECT_EQ(fails(MpAutomaton(packed("aaaa", 2))), (std::vector<state_t>{0, 1, 2, 3}));
    EXPECT_EQ(fails(MpAutomaton(packed("c"))), (std::vector<state_t>{0}));
    EXPECT_THROW(MpAutomaton(packed("")), empty_pattern_error);
}

TEST(MpAutomaton, StepExamples) {
    const MpAutomaton a(packed("ababca"));
    EXPECT_EQ(a.step(4, 2).next, 5u);
    EXPECT_FALSE(a.step(4, 2).accept);
    EXPECT_EQ(a.step(0, 1).next, 0u);
    EXPECT_FALSE(a.step(0, 1).accept);
    EXPECT_EQ(a.step(5, 0).next, 6u);
    EXPECT_TRUE(a.step(5, 0).accept);
    EXPECT_THROW(a.step(6, 0), out_of_range_error);
}

TEST(MpAutomaton, BaselineExamples) {
    EXPECT_EQ(MpAutomaton(packed("ababca")).search_baseline(packed("abacacababca")).end_positions,
              (std::vector<std::size_t>{12}));
    EXPECT_EQ(MpAutomaton(packed("aa")).search_baseline(packed("aaaa")).end_positions,
              (std::vector<std::size_t>{2, 3, 4}));
    EXPECT_TRUE(MpAutomaton(packed("abc")).search_baseline(packed("ab")).end_positions.empty());
}

TEST(MpAutomaton, BordersGrowthAndTreeOnRandomPatterns) {
    std::mt19937_64 rng(1);
    for (std::uint32_t sigma : {2u, 4u, 26u}) {
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t m = 1 + rng() % 64;
            const auto p = random_codes(rng, m, sigma);
            const MpAutomaton a(pack(p, Alphabet(sigma)));
            const auto f = fails(a);
            ASSERT_EQ(f, brute_force_borders(p));
            for (std::size_t s = 1; s < m; ++s) ASSERT_LE(f[s], f[s - 1] + 1); // fail(s+1) <= fail(s)+1
            for (state_t s = 1; s <= m; ++s) {
                state_t x = s;
                std::size_t steps = 0;
                while (x != 0) {
                    ASSERT_LT(a.fail(x), x);
                    x = a.fail(x);
                    ++steps;
                }
                ASSERT_LE(steps, m);
            }
        }
    }
}

TEST(MpAutomaton, BaselineMatchesScanWithinTwoNTransitions) {
    std::mt19937_64 rng(2);
    for (auto g : {Generator::random, Generator::periodic, Generator::all_equal}) {
        for (std::uint32_t sigma : {2u, 4u, 16u}) {
            for (int trial = 0; trial < 100; ++trial) {
                const std::size_t m = 1 + rng() % 20;
                const std::size_t n = m + rng() % 300;
                const auto ins = make_instance(rng, g, sigma, m, n);
                const Alphabet al(sigma);
                const auto out = MpAutomaton(pack(ins.pattern, al)).search_baseline(pack(ins.text, al));
                ASSERT_EQ(out.end_positions, scan_occurrences(ins.pattern, ins.text));
                ASSERT_LE(out.transitions, 2 * n);
            }
        }
    }
}
