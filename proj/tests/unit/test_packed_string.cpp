#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <pksm/packed_string.hpp>

#include "support/oracles.hpp"

using namespace pksm;
using pksm::testing::letters;

TEST(Alphabet, BitsPerChar) {
    EXPECT_EQ(Alphabet(1).bits_per_char(), 1u);
    EXPECT_EQ(Alphabet(2).bits_per_char(), 1u);
    EXPECT_EQ(Alphabet(3).bits_per_char(), 2u);
    EXPECT_EQ(Alphabet(4).bits_per_char(), 2u);
    EXPECT_EQ(Alphabet(5).bits_per_char(), 3u);
    EXPECT_EQ(Alphabet(256).bits_per_char(), 8u);
    EXPECT_EQ(Alphabet(65536).bits_per_char(), 16u);
    EXPECT_THROW(Alphabet(0), invalid_parameter_error);
    EXPECT_THROW(Alphabet(65537), invalid_parameter_error);
}

TEST(PackedString, PackLayout) {
    const std::vector<code_t> codes{1, 2, 3};
    const auto s = pack(codes, Alphabet(4));
    ASSERT_EQ(s.words().size(), 1u);
    EXPECT_EQ(s.words()[0], 57u); // 0b11'10'01
    EXPECT_EQ(s.size(), 3u);
}

TEST(PackedString, EmptyAndZero) {
    const auto e = pack(std::vector<code_t>{}, Alphabet(4));
    EXPECT_EQ(e.size(), 0u);
    EXPECT_TRUE(e.words().empty());
    const auto z = pack(std::vector<code_t>{0, 0, 0, 0}, Alphabet(2));
    ASSERT_EQ(z.words().size(), 1u);
    EXPECT_EQ(z.words()[0], 0u);
    EXPECT_EQ(z.size(), 4u);
}

TEST(PackedString, InvalidCode) {
    EXPECT_THROW(pack(std::vector<code_t>{0, 4}, Alphabet(4)), invalid_code_error);
}

TEST(PackedString, CharAt) {
    EXPECT_EQ(pack(std::vector<code_t>{1, 2, 3}, Alphabet(4)).char_at(1), 2u);
    EXPECT_EQ(pack(letters("ababca"), Alphabet(3)).char_at(4), 2u);
    EXPECT_EQ(pack(std::vector<code_t>{5}, Alphabet(8)).char_at(0), 5u);
    EXPECT_THROW(pack(std::vector<code_t>{5}, Alphabet(8)).char_at(1), out_of_range_error);
}

TEST(PackedString, ExtractWindow) {
    const auto s = pack(letters("ababca"), Alphabet(3));
    EXPECT_EQ(decode_window(s.extract_window(2, 3), s.alphabet()), letters("abc"));
    EXPECT_EQ(s.extract_window(4, 0), (Window{0, 0}));
    const auto t = pack(letters("abacacababca"), Alphabet(3));
    EXPECT_EQ(decode_window(t.extract_window(6, 3), t.alphabet()), letters("aba"));
    EXPECT_THROW(t.extract_window(10, 3), out_of_range_error);
    const auto bytes = pack(std::vector<code_t>(20, 7), Alphabet(256));
    EXPECT_THROW(bytes.extract_window(0, 9), out_of_range_error);
    EXPECT_NO_THROW(bytes.extract_window(12, 8));
}

TEST(PackedString, RoundTripWordCountAndWindows) {
    std::mt19937_64 rng(42);
    for (std::uint32_t sigma : {1u, 2u, 4u, 16u, 256u}) {
        const Alphabet a(sigma);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t len = rng() % 1001;
            const auto codes = pksm::testing::random_codes(rng, len, sigma);
            const auto s = pack(codes, a);
            ASSERT_EQ(s.unpack(), codes);
            ASSERT_EQ(s.words().size(), (len * a.bits_per_char() + 63) / 64);
            const std::uint32_t max_len = 64 / a.bits_per_char();
            for (int probe = 0; probe < 50 && len > 0; ++probe) {
                const std::size_t start = rng() % len;
                const auto l = static_cast<std::uint32_t>(rng() % (std::min<std::size_t>(max_len, len - start) + 1));
                const auto got = decode_window(s.extract_window(start, l), a);
                ASSERT_EQ(got.size(), l);
                for (std::uint32_t k = 0; k < l; ++k) ASSERT_EQ(got[k], s.char_at(start + k));
            }
        }
    }
}
