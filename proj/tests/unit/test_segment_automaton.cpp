#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <pksm/segment_automaton.hpp>

#include "support/oracles.hpp"

using namespace pksm;
using namespace pksm::testing;

namespace {
std::vector<std::uint32_t> sizes(const SegmentAutomaton& sa) {
    std::vector<std::uint32_t> out;
    for (auto& s : sa.segments()) out.push_back(s.size());
    return out;
}
std::vector<state_t> lefts(const SegmentAutomaton& sa) {
    std::vector<state_t> out;
    for (auto& s : sa.segments()) out.push_back(s.left);
    return out;
}
} // namespace

TEST(SegmentAutomaton, SegmentLayout) {
    const SegmentAutomaton fig(MpAutomaton(packed("ababca")), 4);
    EXPECT_EQ(sizes(fig), (std::vector<std::uint32_t>{4, 4, 3}));
    EXPECT_EQ(lefts(fig), (std::vector<state_t>{0, 2, 4}));

    const SegmentAutomaton tiny(MpAutomaton(packed("a")), 2);
    ASSERT_EQ(tiny.segment_count(), 1u);
    EXPECT_EQ(tiny.segment(0).left, 0u);
    EXPECT_EQ(tiny.segment(0).right, 1u);

    const SegmentAutomaton seven(MpAutomaton(packed("abcabca")), 4);
    EXPECT_EQ(lefts(seven), (std::vector<state_t>{0, 2, 4, 6}));
    EXPECT_EQ(sizes(seven), (std::vector<std::uint32_t>{4, 4, 4, 2}));
}

TEST(SegmentAutomaton, InvalidWidth) {
    const MpAutomaton mp(packed("ababca"));
    EXPECT_THROW(SegmentAutomaton(mp, 3), invalid_parameter_error);
    EXPECT_THROW(SegmentAutomaton(mp, 0), invalid_parameter_error);
    EXPECT_THROW(SegmentAutomaton(mp, 8), invalid_parameter_error);
    EXPECT_NO_THROW(SegmentAutomaton(mp, 6));
}

TEST(SegmentAutomaton, EveryStateCoveredOnceOrTwice) {
    for (std::size_t m = 1; m <= 40; ++m) {
        const MpAutomaton mp(pack(std::vector<code_t>(m, 0), Alphabet(2)));
        for (std::uint32_t r = 2; r <= m + 1; r += 2) {
            const SegmentAutomaton sa(mp, r);
            for (state_t s = 0; s <= m; ++s) {
                int copies = 0;
                for (auto& seg : sa.segments()) copies += seg.contains(s);
                ASSERT_TRUE(copies == 1 || copies == 2) << "m=" << m << " r=" << r << " s=" << s;
            }
            for (std::size_t i = 0; i + 2 < sa.segment_count(); ++i)
                ASSERT_EQ(sa.segment(i).right + 1 - sa.segment(i + 1).left, r / 2);
        }
    }
}

TEST(SegmentAutomaton, ClassifyExamples) {
    const SegmentAutomaton sa(MpAutomaton(packed("ababca")), 4);
    const auto t1 = sa.failure_transition({1, 1});
    EXPECT_EQ(t1.kind, TransitionKind::HeavyFailure);
    EXPECT_EQ(t1.target, (SegmentState{0, 1}));

    const auto t2 = sa.failure_transition({0, 3});
    EXPECT_EQ(t2.kind, TransitionKind::LightFailure);
    EXPECT_EQ(t2.target, (SegmentState{0, 1}));

    const auto t3 = sa.forward_transition({0, 3});
    EXPECT_EQ(t3.kind, TransitionKind::HeavyForward);
    EXPECT_EQ(t3.target, (SegmentState{2, 0}));
    EXPECT_EQ(sa.mp().label(3), 1u); // labelled b
    EXPECT_FALSE(t3.accepting);

    const auto acc = sa.forward_transition({2, 1});
    EXPECT_EQ(acc.kind, TransitionKind::LightForward);
    EXPECT_TRUE(acc.accepting);
    EXPECT_THROW(sa.forward_transition({2, 2}), no_forward_transition_error);
    EXPECT_THROW(sa.failure_transition({0, 0}), out_of_range_error);
}

TEST(SegmentAutomaton, HeavyAcceptingTransition) {
    // m = 4, r = 4: segments [0,3], [2,4]; 3 -> 4 leaves segment 0
    const SegmentAutomaton sa(MpAutomaton(packed("abab")), 4);
    const auto t = sa.forward_transition({0, 3});
    EXPECT_EQ(t.kind, TransitionKind::HeavyForward);
    EXPECT_TRUE(t.accepting);
    EXPECT_EQ(t.target, (SegmentState{1, 2}));
}

TEST(SegmentAutomaton, ReferenceExamples) {
    const SegmentAutomaton sa(MpAutomaton(packed("ababca")), 4);
    const auto out = sa.simulate_reference(packed("abacacababca"));
    EXPECT_EQ(out.end_positions, (std::vector<std::size_t>{12}));
    EXPECT_EQ(out.stats.accepting, 1u);

    const auto none = sa.simulate_reference(packed("bcbcbbccb"));
    EXPECT_TRUE(none.end_positions.empty());
    EXPECT_EQ(none.stats.heavy_forward, 0u);
}

TEST(SegmentAutomaton, ReferenceMatchesScanOnRandomDna) {
    std::mt19937_64 rng(3);
    const Alphabet a(4);
    const auto p = random_codes(rng, 32, 2);
    auto t = random_codes(rng, 10000, 4);
    for (int k = 0; k < 5; ++k) std::copy(p.begin(), p.end(), t.begin() + 1000 * k + 17);
    const SegmentAutomaton sa(MpAutomaton(pack(p, a)), 8);
    const auto out = sa.simulate_reference(pack(t, a));
    EXPECT_EQ(out.end_positions, scan_occurrences(p, t));
    EXPECT_GE(out.end_positions.size(), 5u);
}

TEST(SegmentAutomaton, CounterBoundsAndHeavyTargets) {
    std::mt19937_64 rng(4);
    for (auto g : {Generator::random, Generator::periodic, Generator::all_equal}) {
        for (std::uint32_t sigma : {2u, 4u}) {
            for (int trial = 0; trial < 150; ++trial) {
                const std::size_t m = 1 + rng() % 30;
                const std::size_t n = m + rng() % 500;
                const auto ins = make_instance(rng, g, sigma, m, n);
                const Alphabet al(sigma);
                const auto r = static_cast<std::uint32_t>(2 * (1 + rng() % ((m + 1) / 2)));
                const SegmentAutomaton sa(MpAutomaton(pack(ins.pattern, al)), r);
                const auto out = sa.simulate_reference(pack(ins.text, al));
                ASSERT_EQ(out.end_positions, scan_occurrences(ins.pattern, ins.text));
                const auto& s = out.stats;
                const double nn = static_cast<double>(n);
                ASSERT_LE(s.heavy_failure, 2 * s.heavy_forward);
                ASSERT_LE(static_cast<double>(s.heavy_forward), 4 * nn / (r - 1) + 1);
                ASSERT_LE(static_cast<double>(s.heavy_forward + s.heavy_failure + s.accepting),
                          12 * nn / r + static_cast<double>(out.end_positions.size()) + 3);

                for (std::uint32_t i = 0; i < sa.segment_count(); ++i) {
                    for (std::uint32_t j = 0; j < sa.segment(i).size(); ++j) {
                        const state_t gs = sa.segment(i).left + j;
                        std::vector<Transition> ts;
                        if (gs < m) ts.push_back(sa.forward_transition({i, j}));
                        if (gs > 0) ts.push_back(sa.failure_transition({i, j}));
                        for (auto& t : ts) {
                            ASSERT_EQ(sa.global_state(t.target),
                                      is_forward(t.kind) ? gs + 1 : sa.mp().fail(gs));
                            if (!is_light(t.kind) && t.target.segment + 1 < sa.segment_count()) {
                                ASSERT_LT(t.target.local, r / 2);
                            }
                        }
                    }
                }
            }
        }
    }
}
