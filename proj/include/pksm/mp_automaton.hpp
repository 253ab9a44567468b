#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "packed_string.hpp"

namespace pksm {

using state_t = std::uint32_t;

struct MpStep {
    state_t next;
    bool accept;
};

struct BaselineOutcome {
    std::vector<std::size_t> end_positions; // 1-based
    std::uint64_t transitions = 0;          // forward + failure + root self-loops
};

// Morris-Pratt automaton over states 0..m. The forward label of state s is
// pattern[s] (0-based); fail(s) for s in [1, m] is the length of the longest
// proper border of pattern[0, s).
class MpAutomaton {
public:
    explicit MpAutomaton(const PackedString& pattern) : pattern_(pattern), codes_(pattern.unpack()) {
        const std::size_t m = codes_.size();
        if (m == 0) throw empty_pattern_error();
        fail_.assign(m + 1, 0);
        state_t k = 0;
        for (std::size_t s = 1; s < m; ++s) {
            while (k > 0 && codes_[s] != codes_[k]) k = fail_[k];
            if (codes_[s] == codes_[k]) ++k;
            fail_[s + 1] = k;
        }
    }

    std::size_t size() const noexcept { return codes_.size(); }
    const PackedString& pattern() const noexcept { return pattern_; }
    const Alphabet& alphabet() const noexcept { return pattern_.alphabet(); }
    std::span<const code_t> codes() const noexcept { return codes_; }

    code_t label(state_t s) const noexcept { return codes_[s]; }

    state_t fail(state_t s) const {
        if (s == 0 || s > codes_.size())
            throw out_of_range_error("failure transition undefined for state " + std::to_string(s));
        return fail_[s];
    }

    // fail values for states 1..m.
    std::span<const state_t> fail_table() const noexcept { return std::span(fail_).subspan(1); }

    // Consumes one character from state s < m.
    MpStep step(state_t s, code_t a) const {
        if (s >= codes_.size())
            throw out_of_range_error("step requires a state below m; re-enter via fail(m) first");
        while (s > 0 && codes_[s] != a) s = fail_[s];
        if (codes_[s] == a) ++s;
        return {s, s == codes_.size()};
    }

    BaselineOutcome search_baseline(const PackedString& text) const {
        BaselineOutcome out;
        const std::size_t m = codes_.size();
        const std::size_t n = text.size();
        if (m > n) return out;
        state_t s = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const code_t a = text[k];
            if (s == m) {
                s = fail_[s];
                ++out.transitions;
            }
            while (s > 0 && codes_[s] != a) {
                s = fail_[s];
                ++out.transitions;
            }
            if (codes_[s] == a) ++s;
            ++out.transitions;
            if (s == m) out.end_positions.push_back(k + 1);
        }
        return out;
    }

private:
    PackedString pattern_;
    std::vector<code_t> codes_;
    std::vector<state_t> fail_;
};

} // namespace pksm
