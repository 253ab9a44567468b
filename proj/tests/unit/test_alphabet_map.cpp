#include <gtest/gtest.h>

#include <pksm/alphabet_map.hpp>

using namespace pksm;

TEST(AlphabetMap, Dna) {
    const auto m = dna_mapping();
    EXPECT_EQ(m.alphabet().sigma(), 4u);
    EXPECT_EQ(m.map("ACGT"), (std::vector<code_t>{0, 1, 2, 3}));
    EXPECT_EQ(m.map("AC\nGT\r\n", "\r\n"), (std::vector<code_t>{0, 1, 2, 3}));
}

TEST(AlphabetMap, UnmappableByteReportsInputOffset) {
    const auto m = dna_mapping();
    try {
        m.map("AC\nGN", "\n");
        FAIL() << "expected unmappable byte";
    } catch (const unmappable_byte_error& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_EQ(e.byte(), 'N');
    }
    EXPECT_THROW(m.map("AC\nG"), unmappable_byte_error);
}

TEST(AlphabetMap, Byte) {
    const auto m = byte_mapping();
    EXPECT_EQ(m.alphabet().sigma(), 256u);
    EXPECT_EQ(m.map("\xff" "a"), (std::vector<code_t>{255, 97}));
}

TEST(AlphabetMap, Custom) {
    const auto m = parse_custom_mapping("# vowels\na 0\ne 1\n0x69 2\n\n");
    EXPECT_EQ(m.alphabet().sigma(), 3u);
    EXPECT_EQ(m.map("eia"), (std::vector<code_t>{1, 2, 0}));
    EXPECT_THROW(parse_custom_mapping("a 0\nb 0\n"), invalid_parameter_error);
    EXPECT_THROW(parse_custom_mapping("a 0\na 1\n"), invalid_parameter_error);
    EXPECT_THROW(parse_custom_mapping("ab 0\n"), invalid_parameter_error);
    EXPECT_THROW(parse_custom_mapping("a x\n"), invalid_parameter_error);
    EXPECT_THROW(parse_custom_mapping("# nothing\n"), invalid_parameter_error);
}
