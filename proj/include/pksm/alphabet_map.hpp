#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "packed_string.hpp"

namespace pksm {

// Byte -> character code mapping used to ingest files.
class ByteMapping {
public:
    ByteMapping(std::array<std::optional<code_t>, 256> table, std::uint32_t sigma)
        : table_(table), alphabet_(sigma) {
        std::array<bool, max_sigma> used{};
        for (const auto& c : table_) {
            if (!c) continue;
            if (*c >= sigma) throw invalid_parameter_error("mapping code " + std::to_string(*c) + " >= sigma");
            if (used[*c]) throw invalid_parameter_error("mapping is not injective: code " + std::to_string(*c));
            used[*c] = true;
        }
    }

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::optional<code_t> operator()(unsigned char b) const noexcept { return table_[b]; }

    // Maps every byte; bytes in `skip` are dropped. Offsets in errors refer to
    // the input, not the output.
    std::vector<code_t> map(std::string_view bytes, std::string_view skip = {}) const {
        std::vector<code_t> out;
        out.reserve(bytes.size());
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            const auto b = static_cast<unsigned char>(bytes[i]);
            if (skip.find(static_cast<char>(b)) != std::string_view::npos) continue;
            const auto c = table_[b];
            if (!c) throw unmappable_byte_error(i, b);
            out.push_back(*c);
        }
        return out;
    }

private:
    std::array<std::optional<code_t>, 256> table_;
    Alphabet alphabet_;
};

inline ByteMapping byte_mapping() {
    std::array<std::optional<code_t>, 256> t;
    for (unsigned b = 0; b < 256; ++b) t[b] = b;
    return {t, 256};
}

inline ByteMapping dna_mapping() {
    std::array<std::optional<code_t>, 256> t;
    t['A'] = 0;
    t['C'] = 1;
    t['G'] = 2;
    t['T'] = 3;
    return {t, 4};
}

// One "<byte> <code>" pair per line; <byte> is a single character or 0xHH.
// Blank lines and lines starting with '#' are ignored. sigma = max code + 1.
inline ByteMapping parse_custom_mapping(std::string_view text) {
    std::array<std::optional<code_t>, 256> t;
    std::uint32_t sigma = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string byte_field, code_field, extra;
        if (!(fields >> byte_field >> code_field) || (fields >> extra))
            throw invalid_parameter_error("mapping line " + std::to_string(lineno) + ": expected '<byte> <code>'");
        unsigned byte = 0;
        if (byte_field.size() == 1) {
            byte = static_cast<unsigned char>(byte_field[0]);
        } else if (byte_field.size() > 2 && byte_field[0] == '0' && (byte_field[1] == 'x' || byte_field[1] == 'X')) {
            auto [p, ec] = std::from_chars(byte_field.data() + 2, byte_field.data() + byte_field.size(), byte, 16);
            if (ec != std::errc{} || p != byte_field.data() + byte_field.size() || byte > 255)
                throw invalid_parameter_error("mapping line " + std::to_string(lineno) + ": bad byte");
        } else {
            throw invalid_parameter_error("mapping line " + std::to_string(lineno) + ": bad byte");
        }
        code_t code = 0;
        auto [p, ec] = std::from_chars(code_field.data(), code_field.data() + code_field.size(), code);
        if (ec != std::errc{} || p != code_field.data() + code_field.size() || code >= max_sigma)
            throw invalid_parameter_error("mapping line " + std::to_string(lineno) + ": bad code");
        if (t[byte]) throw invalid_parameter_error("mapping line " + std::to_string(lineno) + ": byte mapped twice");
        t[byte] = code;
        sigma = std::max(sigma, code + 1);
    }
    if (sigma == 0) throw invalid_parameter_error("mapping defines no bytes");
    return {t, sigma};
}

inline ByteMapping load_custom_mapping(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read mapping file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_custom_mapping(ss.str());
}

} // namespace pksm
