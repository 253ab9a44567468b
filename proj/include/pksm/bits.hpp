#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstddef>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pksm {

inline constexpr unsigned word_bits = 64;

// Smallest k with 2^k >= x (0 for x <= 1).
constexpr unsigned ceil_log2(std::uint64_t x) noexcept {
    return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

constexpr std::uint64_t low_mask(unsigned width) noexcept {
    return width >= word_bits ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

// Smallest k >= 1 with -2^(k-1) <= d <= 2^(k-1) - 1.
constexpr unsigned twos_complement_width(std::int64_t d) noexcept {
    const std::uint64_t magnitude = d < 0 ? static_cast<std::uint64_t>(-(d + 1))
                                          : static_cast<std::uint64_t>(d);
    return static_cast<unsigned>(std::bit_width(magnitude)) + 1;
}

// Sign-extends the low `width` bits of `bits`.
constexpr std::int64_t sign_extend(std::uint64_t bits, unsigned width) noexcept {
    if (width == 0) return 0;
    if (width >= word_bits) return static_cast<std::int64_t>(bits);
    const std::uint64_t sign = std::uint64_t{1} << (width - 1);
    bits &= low_mask(width);
    return static_cast<std::int64_t>((bits ^ sign)) - static_cast<std::int64_t>(sign);
}

// A fixed-length bit stream. Stream bit k is bit (k mod 64) of word k / 64,
// so the stream read as an integer has stream bit 0 as its least significant
// bit. Bits past size() are always zero.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t nbits) : words_((nbits + word_bits - 1) / word_bits, 0), size_(nbits) {}

    std::size_t size() const noexcept { return size_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    bool test(std::size_t pos) const noexcept {
        assert(pos < size_);
        return (words_[pos / word_bits] >> (pos % word_bits)) & 1u;
    }

    void set(std::size_t pos, bool value = true) noexcept {
        assert(pos < size_);
        const std::uint64_t bit = std::uint64_t{1} << (pos % word_bits);
        if (value)
            words_[pos / word_bits] |= bit;
        else
            words_[pos / word_bits] &= ~bit;
    }

    // Reads `width` <= 64 bits starting at `pos`; bit `pos` lands in bit 0.
    std::uint64_t read(std::size_t pos, unsigned width) const noexcept {
        assert(width <= word_bits && pos + width <= size_);
        if (width == 0) return 0;
        const std::size_t w = pos / word_bits;
        const unsigned off = pos % word_bits;
        std::uint64_t v = words_[w] >> off;
        if (off != 0 && off + width > word_bits) v |= words_[w + 1] << (word_bits - off);
        return v & low_mask(width);
    }

    void write(std::size_t pos, std::uint64_t value, unsigned width) noexcept {
        assert(width <= word_bits && pos + width <= size_);
        if (width == 0) return;
        value &= low_mask(width);
        const std::size_t w = pos / word_bits;
        const unsigned off = pos % word_bits;
        words_[w] = (words_[w] & ~(low_mask(width) << off)) | (value << off);
        if (off != 0 && off + width > word_bits) {
            const unsigned spill = off + width - word_bits;
            words_[w + 1] = (words_[w + 1] & ~low_mask(spill)) | (value >> (word_bits - off));
        }
    }

    void append(std::uint64_t value, unsigned width) {
        const std::size_t pos = size_;
        resize(size_ + width);
        write(pos, value, width);
    }

    void append(const BitString& other) {
        std::size_t pos = 0;
        while (pos < other.size()) {
            const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(word_bits, other.size() - pos));
            append(other.read(pos, chunk), chunk);
            pos += chunk;
        }
    }

    BitString slice(std::size_t pos, std::size_t width) const {
        assert(pos + width <= size_);
        BitString out;
        std::size_t done = 0;
        while (done < width) {
            const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(word_bits, width - done));
            out.append(read(pos + done, chunk), chunk);
            done += chunk;
        }
        return out;
    }

    std::size_t popcount() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool none() const noexcept {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    // Stream order, bit 0 first.
    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i)
            if (test(i)) s[i] = '1';
        return s;
    }

    // Little-endian bytes of the stream integer, ceil(size/8) of them.
    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out((size_ + 7) / 8);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
        return out;
    }

    static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
        BitString out(nbits);
        for (std::size_t i = 0; i < bytes.size() && 8 * i < nbits; ++i)
            out.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
        out.clear_tail();
        return out;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

    friend auto operator<=>(const BitString& a, const BitString& b) {
        if (auto c = a.size_ <=> b.size_; c != 0) return c;
        for (std::size_t i = a.words_.size(); i-- > 0;)
            if (auto c = a.words_[i] <=> b.words_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    std::size_t hash() const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ size_;
        for (auto w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }

private:
    void resize(std::size_t nbits) {
        words_.resize((nbits + word_bits - 1) / word_bits, 0);
        size_ = nbits;
    }

    void clear_tail() noexcept {
        if (size_ % word_bits != 0 && !words_.empty()) words_.back() &= low_mask(size_ % word_bits);
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

struct BitStringHash {
    std::size_t operator()(const BitString& b) const noexcept { return b.hash(); }
};

} // namespace pksm
