#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "packed_string.hpp"
#include "segment_automaton.hpp"

namespace pksm {

inline constexpr std::int32_t no_light_failure = -1;

// Everything the light-path simulation needs to know about one segment.
// Local states are 0..size-1.
struct SegmentDescription {
    std::uint32_t size = 0;
    bool first_segment = false;           // local state 0 is automaton state 0
    bool accepting = false;               // forward into the last local state is accepting
    std::optional<code_t> heavy_forward;  // label of the heavy forward out of the last local state
    std::vector<code_t> forward_labels;   // size-1 light forward labels
    std::vector<std::int32_t> light_fail; // size entries, target or no_light_failure

    friend bool operator==(const SegmentDescription&, const SegmentDescription&) = default;
};

// Bit offsets of every field of a segment record, in stream order.
struct EncodingLayout {
    std::uint32_t r;
    unsigned size_bits;   // ceil(log2(r+1))
    unsigned label_bits;  // bits per character
    unsigned local_bits;  // ceil(log2 r)
    unsigned diff_bits;   // W_D = 4r
    std::size_t size_at;
    std::size_t first_at;
    std::size_t accepting_at;
    std::size_t heavy_present_at;
    std::size_t heavy_label_at;
    std::size_t labels_at;
    std::size_t light_at;       // B_I
    std::size_t first_target_at;
    std::size_t diffs_at;       // B_D
    std::size_t starts_at;      // B_D'
    std::size_t width;
};

inline EncodingLayout encoding_layout(std::uint32_t r, const Alphabet& alphabet) {
    if (r < 2) throw invalid_parameter_error("segment width must be at least 2");
    EncodingLayout l{};
    l.r = r;
    l.size_bits = ceil_log2(std::uint64_t{r} + 1);
    l.label_bits = alphabet.bits_per_char();
    l.local_bits = ceil_log2(r);
    l.diff_bits = 4 * r;
    std::size_t at = 0;
    l.size_at = at, at += l.size_bits;
    l.first_at = at, at += 1;
    l.accepting_at = at, at += 1;
    l.heavy_present_at = at, at += 1;
    l.heavy_label_at = at, at += l.label_bits;
    l.labels_at = at, at += std::size_t{r - 1} * l.label_bits;
    l.light_at = at, at += r;
    l.first_target_at = at, at += l.local_bits;
    l.diffs_at = at, at += l.diff_bits;
    l.starts_at = at, at += l.diff_bits;
    l.width = at;
    return l;
}

inline std::size_t encoding_width(std::uint32_t r, std::uint32_t sigma) {
    return encoding_layout(r, Alphabet(sigma)).width;
}

// Differences between consecutive light failure targets.
inline std::vector<std::int64_t> failure_differences(const SegmentDescription& d) {
    std::vector<std::int64_t> out;
    std::int64_t prev = -1;
    bool seen = false;
    for (auto f : d.light_fail) {
        if (f == no_light_failure) continue;
        if (seen) out.push_back(f - prev);
        prev = f;
        seen = true;
    }
    return out;
}

struct DifferenceStats {
    std::uint64_t abs_sum = 0;
    std::uint64_t used_bits = 0;
};

inline DifferenceStats difference_stats(const SegmentDescription& d) {
    DifferenceStats s;
    for (auto x : failure_differences(d)) {
        s.abs_sum += static_cast<std::uint64_t>(x < 0 ? -x : x);
        s.used_bits += twos_complement_width(x);
    }
    return s;
}

inline SegmentDescription describe(const SegmentAutomaton& sa, std::uint32_t i) {
    const Segment& seg = sa.segment(i);
    const MpAutomaton& mp = sa.mp();
    const state_t m = static_cast<state_t>(mp.size());
    SegmentDescription d;
    d.size = seg.size();
    d.first_segment = seg.left == 0;
    d.accepting = seg.right == m;
    if (seg.right < m) d.heavy_forward = mp.label(seg.right);
    d.forward_labels.reserve(d.size - 1);
    for (state_t s = seg.left; s < seg.right; ++s) d.forward_labels.push_back(mp.label(s));
    d.light_fail.assign(d.size, no_light_failure);
    for (state_t s = std::max<state_t>(seg.left, 1); s <= seg.right; ++s) {
        const state_t f = mp.fail(s);
        if (f >= seg.left) d.light_fail[s - seg.left] = static_cast<std::int32_t>(f - seg.left);
    }
    return d;
}

// B_D holds the differences back to back, each in minimal-width two's
// complement written most significant bit first. B_D' marks the first bit of
// every difference and, when there is at least one difference, the first bit
// past the last one, so a zero-padded B_D decodes unambiguously.
inline BitString encode(const SegmentDescription& d, const EncodingLayout& l) {
    if (d.size < 2 || d.size > l.r || d.forward_labels.size() != d.size - 1 || d.light_fail.size() != d.size)
        throw invalid_parameter_error("segment description does not fit width r = " + std::to_string(l.r));
    BitString e(l.width);
    e.write(l.size_at, d.size, l.size_bits);
    e.set(l.first_at, d.first_segment);
    e.set(l.accepting_at, d.accepting);
    e.set(l.heavy_present_at, d.heavy_forward.has_value());
    if (d.heavy_forward) e.write(l.heavy_label_at, *d.heavy_forward, l.label_bits);
    for (std::size_t j = 0; j < d.forward_labels.size(); ++j)
        e.write(l.labels_at + j * l.label_bits, d.forward_labels[j], l.label_bits);

    bool first = true;
    std::size_t cursor = 0;
    std::int64_t prev = 0;
    for (std::size_t j = 0; j < d.size; ++j) {
        const std::int32_t f = d.light_fail[j];
        if (f == no_light_failure) continue;
        e.set(l.light_at + j);
        if (first) {
            e.write(l.first_target_at, static_cast<std::uint64_t>(f), l.local_bits);
            first = false;
        } else {
            const std::int64_t diff = f - prev;
            const unsigned w = twos_complement_width(diff);
            if (cursor + w >= l.diff_bits)
                throw encoding_overflow_error("failure differences need more than " + std::to_string(l.diff_bits) +
                                              " bits");
            e.set(l.starts_at + cursor);
            const auto bits = static_cast<std::uint64_t>(diff);
            for (unsigned t = 0; t < w; ++t) e.set(l.diffs_at + cursor + t, (bits >> (w - 1 - t)) & 1u);
            cursor += w;
        }
        prev = f;
    }
    if (cursor > 0) e.set(l.starts_at + cursor);
    return e;
}

inline BitString encode(const SegmentAutomaton& sa, std::uint32_t i) {
    return encode(describe(sa, i), encoding_layout(sa.r(), sa.mp().alphabet()));
}

inline SegmentDescription decode(const BitString& e, const EncodingLayout& l, const Alphabet& alphabet) {
    auto bad = [](const std::string& why) { return malformed_encoding_error("malformed segment encoding: " + why); };
    if (e.size() != l.width)
        throw bad("expected " + std::to_string(l.width) + " bits, got " + std::to_string(e.size()));

    SegmentDescription d;
    d.size = static_cast<std::uint32_t>(e.read(l.size_at, l.size_bits));
    if (d.size < 2 || d.size > l.r) throw bad("segment size " + std::to_string(d.size));
    d.first_segment = e.test(l.first_at);
    d.accepting = e.test(l.accepting_at);

    const code_t heavy_label = static_cast<code_t>(e.read(l.heavy_label_at, l.label_bits));
    if (e.test(l.heavy_present_at)) {
        if (d.accepting) throw bad("accepting segment cannot have a heavy forward transition");
        if (!alphabet.contains(heavy_label)) throw bad("heavy forward label out of range");
        d.heavy_forward = heavy_label;
    } else if (heavy_label != 0) {
        throw bad("heavy forward label without presence bit");
    }

    for (std::uint32_t j = 0; j + 1 < l.r; ++j) {
        const code_t c = static_cast<code_t>(e.read(l.labels_at + std::size_t{j} * l.label_bits, l.label_bits));
        if (j + 1 < d.size) {
            if (!alphabet.contains(c)) throw bad("forward label out of range");
            d.forward_labels.push_back(c);
        } else if (c != 0) {
            throw bad("nonzero forward label past segment end");
        }
    }

    std::vector<std::uint32_t> light;
    for (std::uint32_t j = 0; j < l.r; ++j) {
        if (!e.test(l.light_at + j)) continue;
        if (j >= d.size) throw bad("light failure bit past segment end");
        light.push_back(j);
    }

    const auto first_target = static_cast<std::int64_t>(e.read(l.first_target_at, l.local_bits));
    const BitString diffs = e.slice(l.diffs_at, l.diff_bits);
    const BitString starts = e.slice(l.starts_at, l.diff_bits);

    d.light_fail.assign(d.size, no_light_failure);
    if (light.empty()) {
        if (first_target != 0) throw bad("first failure target without light failures");
    }
    if (light.size() <= 1) {
        if (!diffs.none() || !starts.none()) throw bad("difference bits without differences");
    } else {
        if (starts.popcount() != light.size()) throw bad("boundary bit count does not match light failures");
        if (!starts.test(0)) throw bad("differences must start at bit 0");
    }

    std::int64_t target = first_target;
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < light.size(); ++t) {
        if (t > 0) {
            std::size_t end = cursor + 1;
            while (end < l.diff_bits && !starts.test(end)) ++end;
            if (end >= l.diff_bits) throw bad("unterminated difference");
            const unsigned w = static_cast<unsigned>(end - cursor);
            if (w > 63) throw bad("difference too wide");
            std::uint64_t bits = 0;
            for (std::size_t b = cursor; b < end; ++b) bits = (bits << 1) | (diffs.test(b) ? 1u : 0u);
            const std::int64_t diff = sign_extend(bits, w);
            if (twos_complement_width(diff) != w) throw bad("difference not in minimal width");
            target += diff;
            cursor = end;
        }
        const std::uint32_t j = light[t];
        if (target < 0 || target >= static_cast<std::int64_t>(j)) throw bad("failure target must precede its state");
        d.light_fail[j] = static_cast<std::int32_t>(target);
    }
    if (light.size() > 1)
        for (std::size_t b = cursor; b < l.diff_bits; ++b)
            if (diffs.test(b)) throw bad("nonzero padding after differences");

    if (d.first_segment && d.light_fail[0] != no_light_failure) throw bad("state 0 has no failure transition");
    return d;
}

inline SegmentDescription decode(const BitString& e, std::uint32_t r, const Alphabet& alphabet) {
    return decode(e, encoding_layout(r, alphabet), alphabet);
}

} // namespace pksm
