#pragma once

#include <cstddef>
#include <vector>

#include "packed_string.hpp"

namespace pksm {

// O(nm) scan; 1-based end positions of every occurrence.
inline std::vector<std::size_t> naive_search(std::span<const code_t> pattern, std::span<const code_t> text) {
    std::vector<std::size_t> out;
    const std::size_t m = pattern.size(), n = text.size();
    if (m == 0 || m > n) return out;
    for (std::size_t start = 0; start + m <= n; ++start) {
        std::size_t i = 0;
        while (i < m && text[start + i] == pattern[i]) ++i;
        if (i == m) out.push_back(start + m);
    }
    return out;
}

inline std::vector<std::size_t> naive_search(const PackedString& pattern, const PackedString& text) {
    const auto p = pattern.unpack();
    const auto t = text.unpack();
    return naive_search(p, t);
}

} // namespace pksm
