#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "mp_automaton.hpp"
#include "packed_string.hpp"

namespace pksm {

// Interval [left, right] of automaton states; segment i starts at i*r/2.
struct Segment {
    std::uint32_t index;
    state_t left;
    state_t right;

    std::uint32_t size() const noexcept { return right - left + 1; }
    bool contains(state_t s) const noexcept { return left <= s && s <= right; }
};

// (segment, local index); corresponds to state left(segment) + local.
struct SegmentState {
    std::uint32_t segment = 0;
    std::uint32_t local = 0;

    friend bool operator==(const SegmentState&, const SegmentState&) = default;
};

enum class TransitionKind : std::uint8_t {
    LightForward,
    LightFailure,
    HeavyForward,
    HeavyFailure,
    RootSelfLoop, // mismatch at state 0: consume and stay
};

constexpr bool is_light(TransitionKind k) noexcept {
    return k == TransitionKind::LightForward || k == TransitionKind::LightFailure ||
           k == TransitionKind::RootSelfLoop;
}

constexpr bool is_forward(TransitionKind k) noexcept {
    return k == TransitionKind::LightForward || k == TransitionKind::HeavyForward;
}

constexpr bool consumes_character(TransitionKind k) noexcept {
    return is_forward(k) || k == TransitionKind::RootSelfLoop;
}

struct Transition {
    TransitionKind kind;
    bool accepting = false;
    SegmentState target;
};

struct SimStats {
    std::uint64_t heavy_forward = 0; // includes heavy accepting transitions
    std::uint64_t heavy_failure = 0;
    std::uint64_t accepting = 0;

    void record(const Transition& t) noexcept {
        if (t.kind == TransitionKind::HeavyForward) ++heavy_forward;
        if (t.kind == TransitionKind::HeavyFailure) ++heavy_failure;
        if (t.accepting) ++accepting;
    }

    friend bool operator==(const SimStats&, const SimStats&) = default;
};

struct ReferenceOutcome {
    std::vector<std::size_t> end_positions; // 1-based
    SimStats stats;
    std::uint64_t light_transitions = 0;
};

// C(P, r): the automaton states grouped into segments of r states that
// overlap by r/2, with every transition classified as light (stays inside
// the source segment) or heavy (moves to the segment holding the target in
// its leftmost half).
class SegmentAutomaton {
public:
    SegmentAutomaton(MpAutomaton mp, std::uint32_t r) : mp_(std::move(mp)), r_(r) {
        const std::size_t m = mp_.size();
        if (r < 2 || r % 2 != 0 || r > m + 1)
            throw invalid_parameter_error("segment width r must be even with 2 <= r <= m+1 (m = " +
                                          std::to_string(m) + "), got " + std::to_string(r));
        const state_t half = r / 2;
        for (std::uint32_t i = 0;; ++i) {
            const state_t left = i * half;
            if (left >= m) break;
            const state_t right = static_cast<state_t>(std::min<std::size_t>(left + r - 1, m));
            segments_.push_back({i, left, right});
        }
    }

    const MpAutomaton& mp() const noexcept { return mp_; }
    std::uint32_t r() const noexcept { return r_; }
    std::uint32_t segment_count() const noexcept { return static_cast<std::uint32_t>(segments_.size()); }
    const Segment& segment(std::uint32_t i) const { return segments_.at(i); }
    std::span<const Segment> segments() const noexcept { return segments_; }

    state_t global_state(SegmentState q) const noexcept { return segments_[q.segment].left + q.local; }

    // Copy of state s reached by a heavy transition: the segment holding s in
    // its leftmost half, or the last segment when that one does not exist.
    SegmentState home_of(state_t s) const noexcept {
        const std::uint32_t i = std::min<std::uint32_t>(2 * s / r_, segment_count() - 1);
        return {i, s - segments_[i].left};
    }

    Transition forward_transition(SegmentState q) const {
        check(q);
        const Segment& seg = segments_[q.segment];
        const state_t s = seg.left + q.local;
        if (s >= mp_.size())
            throw no_forward_transition_error("state " + std::to_string(s) + " = m has no forward transition");
        return classify(seg, s + 1, true);
    }

    Transition failure_transition(SegmentState q) const {
        check(q);
        const Segment& seg = segments_[q.segment];
        const state_t s = seg.left + q.local;
        if (s == 0) throw out_of_range_error("state 0 has no failure transition");
        return classify(seg, mp_.fail(s), false);
    }

    // The single transition the simulation takes from q on character a.
    Transition step(SegmentState q, code_t a) const {
        const state_t s = global_state(q);
        if (s < mp_.size() && mp_.label(s) == a) return forward_transition(q);
        if (s == 0) return {TransitionKind::RootSelfLoop, false, q};
        return failure_transition(q);
    }

    // Transition-by-transition simulation, the non-tabulated reference.
    ReferenceOutcome simulate_reference(const PackedString& text) const {
        ReferenceOutcome out;
        SegmentState q{};
        for (std::size_t k = 0; k < text.size(); ++k) {
            const code_t a = text[k];
            for (;;) {
                const Transition t = step(q, a);
                out.stats.record(t);
                if (is_light(t.kind)) ++out.light_transitions;
                q = t.target;
                if (consumes_character(t.kind)) {
                    if (t.accepting) out.end_positions.push_back(k + 1);
                    break;
                }
            }
        }
        return out;
    }

private:
    void check(SegmentState q) const {
        if (q.segment >= segments_.size() || q.local >= segments_[q.segment].size())
            throw out_of_range_error("no state (" + std::to_string(q.segment) + ", " + std::to_string(q.local) + ")");
    }

    Transition classify(const Segment& seg, state_t target, bool forward) const {
        const bool accepting = forward && target == mp_.size();
        if (seg.contains(target))
            return {forward ? TransitionKind::LightForward : TransitionKind::LightFailure, accepting,
                    {seg.index, target - seg.left}};
        return {forward ? TransitionKind::HeavyForward : TransitionKind::HeavyFailure, accepting, home_of(target)};
    }

    MpAutomaton mp_;
    std::uint32_t r_;
    std::vector<Segment> segments_;
};

inline const char* to_string(TransitionKind k) noexcept {
    switch (k) {
    case TransitionKind::LightForward: return "light-forward";
    case TransitionKind::LightFailure: return "light-failure";
    case TransitionKind::HeavyForward: return "heavy-forward";
    case TransitionKind::HeavyFailure: return "heavy-failure";
    case TransitionKind::RootSelfLoop: return "root-self-loop";
    }
    return "?";
}

} // namespace pksm
