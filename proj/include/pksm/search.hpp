#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "mp_automaton.hpp"
#include "next_engine.hpp"
#include "packed_string.hpp"
#include "segment_automaton.hpp"
#include "segment_encoding.hpp"

namespace pksm {

inline constexpr std::uint64_t default_table_budget = std::uint64_t{1} << 22;

struct PreprocessOptions {
    std::uint64_t t_budget = default_table_budget;
    std::optional<std::uint32_t> forced_r;
    std::shared_ptr<NextTable> table; // defaults to shared_table(r, sigma)
};

class PreprocessedPattern {
public:
    PreprocessedPattern(const PackedString& pattern, const PreprocessOptions& options = {})
        : segments_(MpAutomaton(pattern), pick_r(pattern.size(), pattern.alphabet(), options, diagnostic_)) {
        const std::uint32_t r = segments_.r();
        table_ = options.table ? options.table : shared_table(r, pattern.alphabet());
        if (table_->r() != r || table_->alphabet() != pattern.alphabet())
            throw invalid_parameter_error("table parameters do not match (r, sigma) of the pattern");
        const EncodingLayout layout = encoding_layout(r, pattern.alphabet());
        for (std::uint32_t i = 0; i < segments_.segment_count(); ++i) {
            encodings_.push_back(encode(describe(segments_, i), layout));
            blocks_.push_back(table_->block(encodings_.back()));
        }
    }

    const MpAutomaton& mp() const noexcept { return segments_.mp(); }
    const SegmentAutomaton& segments() const noexcept { return segments_; }
    std::uint32_t r() const noexcept { return segments_.r(); }
    const Alphabet& alphabet() const noexcept { return mp().alphabet(); }
    std::span<const BitString> encodings() const noexcept { return encodings_; }
    const std::shared_ptr<NextTable>& table() const noexcept { return table_; }
    const NextTable::Block& block(std::uint32_t segment) const { return *blocks_[segment]; }
    // Nonempty when the budget could not be honoured.
    const std::string& diagnostic() const noexcept { return diagnostic_; }

private:
    static std::uint32_t pick_r(std::size_t m, const Alphabet& a, const PreprocessOptions& o, std::string& note) {
        if (m == 0) throw empty_pattern_error();
        std::uint32_t r;
        if (o.forced_r) {
            r = *o.forced_r;
            if (r < 2 || r % 2 != 0) throw invalid_parameter_error("r must be even and at least 2");
            if (r > max_engine_r(a))
                throw invalid_parameter_error("r = " + std::to_string(r) + " exceeds the largest usable r (" +
                                              std::to_string(max_engine_r(a)) + ") for sigma " +
                                              std::to_string(a.sigma()));
        } else {
            const RChoice c = choose_r(o.t_budget, a.sigma());
            r = c.r;
            note = c.diagnostic;
        }
        const auto cap = static_cast<std::uint32_t>(std::min<std::size_t>(m + 1, 0xffffffffu)) & ~1u;
        return std::min(r, cap);
    }

    std::string diagnostic_;
    SegmentAutomaton segments_;
    std::vector<BitString> encodings_;
    std::shared_ptr<NextTable> table_;
    std::vector<std::shared_ptr<const NextTable::Block>> blocks_;
};

inline PreprocessedPattern preprocess(const PackedString& pattern, const PreprocessOptions& options = {}) {
    return PreprocessedPattern(pattern, options);
}

struct SearchOutcome {
    std::vector<std::size_t> end_positions; // 1-based, increasing
    SimStats stats;
    std::uint64_t iterations = 0;
};

// One entry per light run (tabulated) and per single transition.
struct TraceEvent {
    enum class Phase { light_run, single };
    Phase phase;
    SegmentState state;   // state after the event
    std::size_t consumed; // characters consumed after the event
    TransitionKind kind = TransitionKind::LightForward; // single only
    bool accepting = false;
};

// Alternates a tabulated run of up to r-1 light transitions with one explicit
// transition (heavy, accepting, or the light step after a full window).
inline SearchOutcome search(const PreprocessedPattern& p, const PackedString& text,
                            std::vector<TraceEvent>* trace = nullptr) {
    if (text.alphabet() != p.alphabet())
        throw invalid_parameter_error("text and pattern use different alphabets");
    SearchOutcome out;
    const std::size_t n = text.size();
    const std::uint32_t window = p.r() - 1;
    const KeyLayout& layout = p.table()->layout();
    const SegmentAutomaton& sa = p.segments();

    SegmentState q{};
    std::size_t k = 0;
    for (;;) {
        ++out.iterations;
        const auto len = static_cast<std::uint32_t>(std::min<std::size_t>(window, n - k));
        const Window w = text.window_unchecked(k, len);
        const NextResult run = p.block(q.segment).get(make_low_key(layout, q.local, w));
        q.local = run.state;
        k += run.consumed;
        if (trace) trace->push_back({TraceEvent::Phase::light_run, q, k});
        if (k == n) break;

        const Transition t = sa.step(q, text[k]);
        out.stats.record(t);
        if (consumes_character(t.kind)) ++k;
        if (t.accepting) out.end_positions.push_back(k);
        q = t.target;
        if (trace) trace->push_back({TraceEvent::Phase::single, q, k, t.kind, t.accepting});
    }
    return out;
}

} // namespace pksm
