#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "packed_string.hpp"
#include "segment_encoding.hpp"

namespace pksm {

struct NextResult {
    std::uint32_t consumed = 0; // characters of q read
    std::uint32_t state = 0;    // final local state

    friend bool operator==(const NextResult&, const NextResult&) = default;
};

inline void validate(const SegmentDescription& d) {
    auto bad = [](const char* why) { return malformed_encoding_error(std::string("malformed segment: ") + why); };
    if (d.size < 2) throw bad("size below 2");
    if (d.forward_labels.size() != d.size - 1) throw bad("forward label count");
    if (d.light_fail.size() != d.size) throw bad("failure map size");
    if (d.accepting && d.heavy_forward) throw bad("accepting segment with heavy forward");
    for (std::uint32_t j = 0; j < d.size; ++j) {
        const std::int32_t f = d.light_fail[j];
        if (f != no_light_failure && (f < 0 || f >= static_cast<std::int32_t>(j))) throw bad("failure target");
    }
    if (d.first_segment && d.light_fail[0] != no_light_failure) throw bad("failure out of state 0");
}

// Longest light, non-accepting path from local state j that reads a prefix of
// q. At the root of the first segment a mismatching character is consumed in
// place and counts toward `consumed`.
inline NextResult next_direct(const SegmentDescription& seg, std::uint32_t j, std::span<const code_t> q) {
    validate(seg);
    if (j >= seg.size)
        throw malformed_encoding_error("local state " + std::to_string(j) + " outside segment of size " +
                                       std::to_string(seg.size));
    const std::uint32_t last = seg.size - 1;
    std::uint32_t state = j;
    std::uint32_t consumed = 0;
    for (const code_t a : q) {
        for (;;) {
            if (state < last && seg.forward_labels[state] == a) {
                if (seg.accepting && state + 1 == last) return {consumed, state};
                ++state;
                break;
            }
            if (state == last && seg.heavy_forward == a) return {consumed, state};
            if (seg.first_segment && state == 0) break;
            const std::int32_t f = seg.light_fail[state];
            if (f == no_light_failure) return {consumed, state};
            state = static_cast<std::uint32_t>(f);
        }
        ++consumed;
    }
    return {consumed, state};
}

inline NextResult next_direct(const SegmentDescription& seg, std::uint32_t j, const Window& q,
                              const Alphabet& alphabet) {
    const auto codes = decode_window(q, alphabet);
    return next_direct(seg, j, codes);
}

// Key layout: segment record, then j, q length and q. The part after the
// record is at most 64 bits and is handled as one word (the "low key").
struct KeyLayout {
    EncodingLayout enc;
    unsigned state_bits;  // ceil(log2 r)
    unsigned window_bits; // (r-1) * bits per char
    unsigned low_bits;    // 2*state_bits + window_bits
    std::size_t width;    // b
};

inline KeyLayout key_layout(std::uint32_t r, const Alphabet& a) {
    KeyLayout k{};
    k.enc = encoding_layout(r, a);
    k.state_bits = ceil_log2(r);
    const std::uint64_t window_bits = std::uint64_t{r - 1} * a.bits_per_char();
    if (2 * std::uint64_t{k.state_bits} + window_bits > word_bits)
        throw invalid_parameter_error("r = " + std::to_string(r) + " is too large for sigma = " +
                                      std::to_string(a.sigma()) + ": the query window does not fit one word");
    k.window_bits = static_cast<unsigned>(window_bits);
    k.low_bits = 2 * k.state_bits + k.window_bits;
    k.width = k.enc.width + k.low_bits;
    return k;
}

inline std::size_t key_width(std::uint32_t r, std::uint32_t sigma) { return key_layout(r, Alphabet(sigma)).width; }

// Largest even r whose query part fits one machine word.
inline std::uint32_t max_engine_r(const Alphabet& a) {
    std::uint32_t best = 2;
    for (std::uint32_t r = 2;; r += 2) {
        if (2 * ceil_log2(r) + std::uint64_t{r - 1} * a.bits_per_char() > word_bits) break;
        best = r;
    }
    return best;
}

inline std::uint64_t make_low_key(const KeyLayout& k, std::uint32_t j, const Window& q) {
    return std::uint64_t{j} | (std::uint64_t{q.length} << k.state_bits) | (q.bits << (2 * k.state_bits));
}

using NextKey = BitString;

inline NextKey make_key(const KeyLayout& k, const BitString& encoding, std::uint32_t j, const Window& q) {
    if (encoding.size() != k.enc.width) throw malformed_encoding_error("segment record has the wrong width");
    if (q.length > k.enc.r - 1) throw out_of_range_error("query window longer than r-1");
    NextKey key = encoding;
    key.append(make_low_key(k, j, q), k.low_bits);
    return key;
}

struct RChoice {
    std::uint32_t r = 2;
    bool within_budget = false;
    std::string diagnostic;
};

// Largest even r whose full 2^b-entry table would fit in t_budget entries.
inline RChoice choose_r(std::uint64_t t_budget, std::uint32_t sigma) {
    if (t_budget < 2) throw invalid_parameter_error("table budget must be at least 2 entries");
    const Alphabet a(sigma);
    const unsigned budget_bits = static_cast<unsigned>(std::bit_width(t_budget) - 1);
    RChoice c;
    for (std::uint32_t r = 2; r <= max_engine_r(a); r += 2) {
        if (key_width(r, sigma) > budget_bits) break;
        c.r = r;
        c.within_budget = true;
    }
    if (!c.within_budget)
        c.diagnostic = "table budget 2^" + std::to_string(budget_bits) + " is below the smallest table (2^" +
                       std::to_string(key_width(2, sigma)) + " entries at r = 2, sigma = " + std::to_string(sigma) +
                       "); using r = 2";
    return c;
}

enum class FillMode { lazy, eager };

// Tabulated Next. Conceptually a 2^b array indexed by num(key); stored as one
// block per distinct segment record, each block indexed by the low key and
// filled on demand (lazy) or completely when created (eager). Dense blocks
// are arrays of atomics; wider ones are hash maps under a shared lock.
// Entries are deterministic, so racing readers may both compute one.
class NextTable {
public:
    class Block {
    public:
        Block(const KeyLayout& layout, const Alphabet& alphabet, SegmentDescription seg)
            : layout_(layout), alphabet_(alphabet), seg_(std::move(seg)) {
            const unsigned low = layout_.low_bits;
            if (low <= dense_limit_bits) {
                dense_size_ = std::size_t{1} << low;
                dense_ = std::make_unique<std::atomic<std::uint32_t>[]>(dense_size_);
            }
        }

        const SegmentDescription& segment() const noexcept { return seg_; }

        NextResult get(std::uint64_t low) const {
            if (dense_) {
                const std::uint32_t v = dense_[low].load(std::memory_order_relaxed);
                if (v != 0) return unpack(v);
            } else {
                std::shared_lock lock(mutex_);
                if (auto it = sparse_.find(low); it != sparse_.end()) return unpack(it->second);
            }
            const NextResult r = compute(low);
            store(low, r);
            return r;
        }

        bool contains(std::uint64_t low) const {
            if (dense_) return low < dense_size_ && dense_[low].load(std::memory_order_relaxed) != 0;
            std::shared_lock lock(mutex_);
            return sparse_.contains(low);
        }

        std::size_t entries() const noexcept { return count_.load(std::memory_order_relaxed); }

        // Visits populated (low key, result) pairs in increasing key order.
        template <class F>
        void for_each(F&& f) const {
            if (dense_) {
                for (std::size_t i = 0; i < dense_size_; ++i)
                    if (const auto v = dense_[i].load(std::memory_order_relaxed); v != 0) f(std::uint64_t{i}, unpack(v));
                return;
            }
            std::vector<std::pair<std::uint64_t, std::uint32_t>> items;
            {
                std::shared_lock lock(mutex_);
                items.assign(sparse_.begin(), sparse_.end());
            }
            std::sort(items.begin(), items.end());
            for (auto& [k, v] : items) f(k, unpack(v));
        }

        // Fills every valid low key.
        void fill_all() const {
            const KeyLayout& k = layout_;
            const std::uint32_t sigma = alphabet_.sigma();
            const unsigned b = alphabet_.bits_per_char();
            std::vector<code_t> q;
            for (std::uint32_t len = 0; len < k.enc.r; ++len) {
                q.assign(len, 0);
                for (;;) {
                    Window w{len, 0};
                    for (std::uint32_t t = 0; t < len; ++t) w.bits |= std::uint64_t{q[t]} << (t * b);
                    for (std::uint32_t j = 0; j < seg_.size; ++j) get(make_low_key(k, j, w));
                    std::uint32_t t = 0;
                    while (t < len && ++q[t] == sigma) q[t++] = 0;
                    if (t == len) break;
                }
            }
        }

        // Validates and stores an externally supplied result.
        void insert(std::uint64_t low, NextResult r) const {
            const auto [j, q] = split(low);
            if (r.consumed > q.length || r.state >= seg_.size)
                throw malformed_encoding_error("table entry out of range");
            store(low, r);
        }

    private:
        static constexpr unsigned dense_limit_bits = 16;

        static NextResult unpack(std::uint32_t v) noexcept { return {(v >> 16) & 0x7fff, v & 0xffff}; }
        static std::uint32_t pack(NextResult r) noexcept { return 0x80000000u | (r.consumed << 16) | r.state; }

        std::pair<std::uint32_t, Window> split(std::uint64_t low) const {
            const KeyLayout& k = layout_;
            if (k.low_bits < word_bits && (low >> k.low_bits) != 0) throw malformed_encoding_error("key too wide");
            const auto j = static_cast<std::uint32_t>(low & low_mask(k.state_bits));
            const auto len = static_cast<std::uint32_t>((low >> k.state_bits) & low_mask(k.state_bits));
            const std::uint64_t bits = k.window_bits == 0 ? 0 : (low >> (2 * k.state_bits)) & low_mask(k.window_bits);
            if (j >= seg_.size) throw malformed_encoding_error("key state outside segment");
            if (len > k.enc.r - 1) throw malformed_encoding_error("key window length exceeds r-1");
            const unsigned b = alphabet_.bits_per_char();
            if (len * b < word_bits && (bits >> (len * b)) != 0)
                throw malformed_encoding_error("key window has bits past its length");
            return {j, Window{len, bits}};
        }

        NextResult compute(std::uint64_t low) const {
            const auto [j, q] = split(low);
            const auto codes = decode_window(q, alphabet_);
            for (auto c : codes)
                if (!alphabet_.contains(c)) throw malformed_encoding_error("key window character out of range");
            return next_direct(seg_, j, codes);
        }

        void store(std::uint64_t low, NextResult r) const {
            const std::uint32_t v = pack(r);
            if (dense_) {
                std::uint32_t expected = 0;
                if (dense_[low].compare_exchange_strong(expected, v, std::memory_order_relaxed))
                    count_.fetch_add(1, std::memory_order_relaxed);
                return;
            }
            std::unique_lock lock(mutex_);
            if (sparse_.emplace(low, v).second) count_.fetch_add(1, std::memory_order_relaxed);
        }

        KeyLayout layout_;
        Alphabet alphabet_;
        SegmentDescription seg_;
        std::size_t dense_size_ = 0;
        std::unique_ptr<std::atomic<std::uint32_t>[]> dense_;
        mutable std::shared_mutex mutex_;
        mutable std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
        mutable std::atomic<std::size_t> count_{0};
    };

    NextTable(std::uint32_t r, Alphabet alphabet, FillMode mode = FillMode::lazy)
        : alphabet_(alphabet), layout_(key_layout(r, alphabet)), mode_(mode) {
        if (r < 2 || r % 2 != 0) throw invalid_parameter_error("r must be even and at least 2");
    }

    NextTable(const NextTable&) = delete;
    NextTable& operator=(const NextTable&) = delete;

    std::uint32_t r() const noexcept { return layout_.enc.r; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const KeyLayout& layout() const noexcept { return layout_; }
    std::size_t key_bits() const noexcept { return layout_.width; }
    FillMode mode() const noexcept { return mode_; }

    std::shared_ptr<const Block> block(const BitString& encoding) const {
        {
            std::shared_lock lock(mutex_);
            if (auto it = blocks_.find(encoding); it != blocks_.end()) return it->second;
        }
        auto fresh = std::make_shared<const Block>(layout_, alphabet_, decode(encoding, layout_.enc, alphabet_));
        std::shared_ptr<const Block> result;
        {
            std::unique_lock lock(mutex_);
            result = blocks_.emplace(encoding, std::move(fresh)).first->second;
        }
        if (mode_ == FillMode::eager) result->fill_all();
        return result;
    }

    NextResult lookup(const NextKey& key) const {
        const auto [enc, low] = split_key(key);
        return block(enc)->get(low);
    }

    bool contains(const NextKey& key) const {
        const auto [enc, low] = split_key(key);
        std::shared_lock lock(mutex_);
        auto it = blocks_.find(enc);
        return it != blocks_.end() && it->second->contains(low);
    }

    std::size_t entry_count() const {
        std::shared_lock lock(mutex_);
        std::size_t n = 0;
        for (auto& [_, b] : blocks_) n += b->entries();
        return n;
    }

    std::size_t block_count() const {
        std::shared_lock lock(mutex_);
        return blocks_.size();
    }

    // Drops the memo. Blocks already handed out stay valid for their holders.
    void clear() {
        std::unique_lock lock(mutex_);
        blocks_.clear();
    }

    // Every populated entry, sorted by key.
    std::vector<std::pair<NextKey, NextResult>> entries() const {
        std::vector<std::pair<BitString, std::shared_ptr<const Block>>> blocks;
        {
            std::shared_lock lock(mutex_);
            blocks.assign(blocks_.begin(), blocks_.end());
        }
        std::sort(blocks.begin(), blocks.end(), [](auto& x, auto& y) { return x.first < y.first; });
        std::vector<std::pair<NextKey, NextResult>> out;
        for (auto& [enc, b] : blocks)
            b->for_each([&](std::uint64_t low, NextResult r) {
                NextKey key = enc;
                key.append(low, layout_.low_bits);
                out.emplace_back(std::move(key), r);
            });
        return out;
    }

    // Creates and fills a block for every structurally valid segment record.
    // Only practical for tiny (r, sigma); refuses above `max_entries`.
    void fill_eager(std::uint64_t max_entries = std::uint64_t{1} << 24) {
        const std::uint64_t estimate = eager_entry_estimate();
        if (estimate > max_entries)
            throw invalid_parameter_error("eager fill would create about " + std::to_string(estimate) + " entries");
        for_each_description([&](const SegmentDescription& d) {
            BitString enc;
            try {
                enc = encode(d, layout_.enc);
            } catch (const encoding_overflow_error&) {
                return;
            }
            block(enc)->fill_all();
        });
    }

    static constexpr char cache_magic[4] = {'P', 'K', 'S', 'M'};
    static constexpr std::uint8_t cache_version = 1;

    // "PKSM", version byte, r, sigma, b (u32 LE), entry count (u64 LE), then
    // per entry the key (ceil(b/8) bytes LE), l and j' (u16 LE each).
    void save(std::ostream& os) const {
        const auto all = entries();
        os.write(cache_magic, 4);
        put(os, cache_version, 1);
        put(os, r(), 4);
        put(os, alphabet_.sigma(), 4);
        put(os, static_cast<std::uint64_t>(layout_.width), 4);
        put(os, all.size(), 8);
        for (auto& [key, res] : all) {
            const auto bytes = key.to_bytes();
            os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            put(os, res.consumed, 2);
            put(os, res.state, 2);
        }
        if (!os) throw io_error("failed writing table cache");
    }

    // Merges a cache written by save(). With `verify`, every entry is
    // recomputed and a mismatch is rejected.
    std::size_t load(std::istream& is, bool verify = false) {
        char magic[4];
        is.read(magic, 4);
        if (!is || std::memcmp(magic, cache_magic, 4) != 0) throw malformed_encoding_error("not a table cache file");
        if (get(is, 1) != cache_version) throw malformed_encoding_error("unsupported table cache version");
        const auto r_in = get(is, 4), sigma_in = get(is, 4), b_in = get(is, 4);
        if (r_in != r() || sigma_in != alphabet_.sigma())
            throw malformed_encoding_error("table cache is for r = " + std::to_string(r_in) +
                                           ", sigma = " + std::to_string(sigma_in));
        if (b_in != layout_.width)
            throw malformed_encoding_error("table cache key width " + std::to_string(b_in) + " does not match " +
                                           std::to_string(layout_.width));
        const auto count = get(is, 8);
        std::vector<std::uint8_t> bytes((layout_.width + 7) / 8);
        for (std::uint64_t e = 0; e < count; ++e) {
            is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            NextResult res;
            res.consumed = static_cast<std::uint32_t>(get(is, 2));
            res.state = static_cast<std::uint32_t>(get(is, 2));
            if (!is) throw malformed_encoding_error("truncated table cache");
            const NextKey key = BitString::from_bytes(bytes, layout_.width);
            if (key.to_bytes() != bytes) throw malformed_encoding_error("table cache key has bits past b");
            const auto [enc, low] = split_key(key);
            auto blk = block(enc);
            if (verify && blk->get(low) != res) throw malformed_encoding_error("table cache entry disagrees");
            blk->insert(low, res);
        }
        return static_cast<std::size_t>(count);
    }

private:
    std::pair<BitString, std::uint64_t> split_key(const NextKey& key) const {
        if (key.size() != layout_.width)
            throw malformed_encoding_error("key has " + std::to_string(key.size()) + " bits, expected " +
                                           std::to_string(layout_.width));
        return {key.slice(0, layout_.enc.width), key.read(layout_.enc.width, layout_.low_bits)};
    }

    std::uint64_t eager_entry_estimate() const {
        // records * r states * sum of sigma^len, computed with saturation
        const std::uint32_t r = this->r();
        const double sigma = alphabet_.sigma();
        double windows = 0, p = 1;
        for (std::uint32_t len = 0; len < r; ++len, p *= sigma) windows += p;
        double records = 0;
        for (std::uint32_t size = 2; size <= r; ++size) {
            double fails = 1;
            for (std::uint32_t j = 1; j < size; ++j) fails *= j + 1;
            records += 2 * (2 + sigma) * std::pow(sigma, size - 1) * fails;
        }
        const double total = records * windows * r;
        return total > 1e18 ? std::uint64_t{1} << 62 : static_cast<std::uint64_t>(total);
    }

    template <class F>
    void for_each_description(F&& f) const {
        const std::uint32_t sigma = alphabet_.sigma();
        for (std::uint32_t size = 2; size <= r(); ++size) {
            SegmentDescription d;
            d.size = size;
            d.forward_labels.assign(size - 1, 0);
            d.light_fail.assign(size, no_light_failure);
            for (int first = 0; first < 2; ++first) {
                d.first_segment = first != 0;
                // accepting, no heavy forward, heavy forward with each label
                for (std::uint32_t tail = 0; tail < sigma + 2; ++tail) {
                    d.accepting = tail == 0;
                    d.heavy_forward = tail >= 2 ? std::optional<code_t>(tail - 2) : std::nullopt;
                    for_each_labels(d, 0, [&] { for_each_failures(d, 1, f); });
                }
            }
        }
    }

    template <class G>
    void for_each_labels(SegmentDescription& d, std::uint32_t j, G&& g) const {
        if (j == d.size - 1) return g();
        for (code_t c = 0; c < alphabet_.sigma(); ++c) {
            d.forward_labels[j] = c;
            for_each_labels(d, j + 1, g);
        }
    }

    template <class F>
    void for_each_failures(SegmentDescription& d, std::uint32_t j, F&& f) const {
        if (j == d.size) return f(static_cast<const SegmentDescription&>(d));
        for (std::int32_t t = no_light_failure; t < static_cast<std::int32_t>(j); ++t) {
            d.light_fail[j] = t;
            for_each_failures(d, j + 1, f);
        }
        d.light_fail[j] = no_light_failure;
    }

    static void put(std::ostream& os, std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    static std::uint64_t get(std::istream& is, int bytes) {
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            const int c = is.get();
            if (c == std::char_traits<char>::eof()) throw malformed_encoding_error("truncated table cache");
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
        }
        return v;
    }

    Alphabet alphabet_;
    KeyLayout layout_;
    FillMode mode_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<BitString, std::shared_ptr<const Block>, BitStringHash> blocks_;
};

// One table per (r, sigma), shared by every pattern preprocessed with it.
inline std::shared_ptr<NextTable> shared_table(std::uint32_t r, const Alphabet& alphabet) {
    static std::mutex mutex;
    static std::map<std::pair<std::uint32_t, std::uint32_t>, std::shared_ptr<NextTable>> tables;
    std::lock_guard lock(mutex);
    auto& slot = tables[{r, alphabet.sigma()}];
    if (!slot) slot = std::make_shared<NextTable>(r, alphabet);
    return slot;
}

} // namespace pksm
