#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"

namespace pksm {

using code_t = std::uint32_t;

inline constexpr std::uint32_t max_sigma = 1u << 16;

class Alphabet {
public:
    explicit Alphabet(std::uint32_t sigma) : sigma_(sigma) {
        if (sigma == 0 || sigma > max_sigma)
            throw invalid_parameter_error("alphabet size must be in [1, 65536], got " + std::to_string(sigma));
        bits_ = sigma <= 2 ? 1u : ceil_log2(sigma);
    }

    std::uint32_t sigma() const noexcept { return sigma_; }
    unsigned bits_per_char() const noexcept { return bits_; }
    bool contains(code_t c) const noexcept { return c < sigma_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::uint32_t sigma_;
    unsigned bits_;
};

// Up to 64 bits worth of consecutive characters, character 0 in the low bits.
struct Window {
    std::uint32_t length = 0;
    std::uint64_t bits = 0;

    friend bool operator==(const Window&, const Window&) = default;
};

inline std::vector<code_t> decode_window(const Window& w, const Alphabet& a) {
    std::vector<code_t> out(w.length);
    const unsigned b = a.bits_per_char();
    for (std::uint32_t k = 0; k < w.length; ++k)
        out[k] = static_cast<code_t>((w.bits >> (k * b)) & low_mask(b));
    return out;
}

// Character sequence stored at bits_per_char bits per character. Character i
// occupies stream bits [i*b, (i+1)*b); stream bit k is bit k%64 of word k/64.
class PackedString {
public:
    PackedString() : alphabet_(1) {}
    PackedString(std::span<const code_t> codes, Alphabet alphabet) : alphabet_(alphabet), len_(codes.size()) {
        const unsigned b = alphabet_.bits_per_char();
        words_.assign((len_ * b + word_bits - 1) / word_bits, 0);
        for (std::size_t i = 0; i < len_; ++i) {
            const code_t c = codes[i];
            if (!alphabet_.contains(c))
                throw invalid_code_error("code " + std::to_string(c) + " at index " + std::to_string(i) +
                                         " is not below sigma " + std::to_string(alphabet_.sigma()));
            const std::size_t pos = i * b;
            const std::size_t w = pos / word_bits;
            const unsigned off = pos % word_bits;
            words_[w] |= std::uint64_t{c} << off;
            if (off + b > word_bits) words_[w + 1] |= std::uint64_t{c} >> (word_bits - off);
        }
    }

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::size_t size() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    code_t operator[](std::size_t i) const noexcept {
        return static_cast<code_t>(read_bits(i * alphabet_.bits_per_char(), alphabet_.bits_per_char()));
    }

    code_t char_at(std::size_t i) const {
        if (i >= len_)
            throw out_of_range_error("index " + std::to_string(i) + " out of range for length " +
                                     std::to_string(len_));
        return (*this)[i];
    }

    // At most two word reads, independent of alignment.
    Window extract_window(std::size_t start, std::uint32_t length) const {
        if (start > len_ || length > len_ - start)
            throw out_of_range_error("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                     ") exceeds length " + std::to_string(len_));
        if (std::uint64_t{length} * alphabet_.bits_per_char() > word_bits)
            throw out_of_range_error("window of " + std::to_string(length) + " characters does not fit a word");
        return window_unchecked(start, length);
    }

    Window window_unchecked(std::size_t start, std::uint32_t length) const noexcept {
        const unsigned b = alphabet_.bits_per_char();
        return {length, read_bits(start * b, length * b)};
    }

    std::vector<code_t> unpack() const {
        std::vector<code_t> out(len_);
        for (std::size_t i = 0; i < len_; ++i) out[i] = (*this)[i];
        return out;
    }

private:
    std::uint64_t read_bits(std::size_t pos, unsigned width) const noexcept {
        if (width == 0) return 0;
        const std::size_t w = pos / word_bits;
        const unsigned off = pos % word_bits;
        std::uint64_t v = words_[w] >> off;
        if (off != 0 && off + width > word_bits) v |= words_[w + 1] << (word_bits - off);
        return v & low_mask(width);
    }

    Alphabet alphabet_;
    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

inline PackedString pack(std::span<const code_t> codes, Alphabet alphabet) { return PackedString(codes, alphabet); }

} // namespace pksm
