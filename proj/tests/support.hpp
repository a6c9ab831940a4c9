#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "dyndex/types.hpp"

namespace test_support {

using hit_set = std::set<std::pair<std::uint64_t, std::uint64_t>>;

/// Characters as symbols, keeping byte order.
inline std::vector<dyndex::symbol> sym(std::string_view s) {
    std::vector<dyndex::symbol> out;
    for (const char c : s) out.push_back(static_cast<unsigned char>(c));
    return out;
}

inline std::vector<dyndex::symbol> random_text(std::mt19937_64& rng, std::size_t len, unsigned sigma) {
    std::vector<dyndex::symbol> t(len);
    for (auto& c : t) c = 1 + static_cast<dyndex::symbol>(rng() % sigma);
    return t;
}

inline hit_set as_set(const dyndex::occurrence_list& hits) {
    hit_set s;
    for (const auto& h : hits) s.emplace(h.doc, h.offset);
    return s;
}

/// Substring of a random document about half the time, random symbols otherwise.
template <class Docs>
std::vector<dyndex::symbol> random_pattern(std::mt19937_64& rng, const Docs& docs, unsigned sigma,
                                           std::size_t max_len = 8) {
    if (!docs.empty() && rng() % 2 == 0) {
        auto it = docs.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng() % docs.size()));
        const auto& text = it->second;
        const std::size_t len = 1 + rng() % std::min(text.size(), max_len);
        const std::size_t from = rng() % (text.size() - len + 1);
        return {text.begin() + static_cast<std::ptrdiff_t>(from), text.begin() + static_cast<std::ptrdiff_t>(from + len)};
    }
    return random_text(rng, 1 + rng() % max_len, sigma);
}

}  // namespace test_support
