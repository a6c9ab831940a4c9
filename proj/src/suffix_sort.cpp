#include "dyndex/suffix_sort.hpp"

#include <algorithm>
#include <stdexcept>

namespace dyndex {

std::vector<std::uint64_t> build_suffix_array(const std::vector<symbol>& text) {
    const std::size_t n = text.size();
    if (n == 0) return {};
    if (text.back() != terminator) throw std::invalid_argument("build_suffix_array: text must end with a terminator");

    // Initial ranks: terminators 0..rho-1 in text order, then symbols above them.
    std::vector<std::uint64_t> rank(n);
    std::uint64_t rho = 0;
    symbol max_sym = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (text[i] == terminator) rank[i] = rho++;
        max_sym = std::max(max_sym, text[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (text[i] != terminator) rank[i] = rho + text[i] - 1;
    std::uint64_t classes = rho + max_sym;

    std::vector<std::uint64_t> sa(n), tmp(n), next_rank(n);
    std::vector<std::uint64_t> bucket;

    auto counting_sort = [&](const std::vector<std::uint64_t>& order, std::vector<std::uint64_t>& out) {
        bucket.assign(classes + 1, 0);
        for (std::size_t i = 0; i < n; ++i) ++bucket[rank[i] + 1];
        for (std::size_t c = 1; c <= classes; ++c) bucket[c] += bucket[c - 1];
        for (std::size_t j = 0; j < n; ++j) out[bucket[rank[order[j]]]++] = order[j];
    };

    for (std::size_t i = 0; i < n; ++i) tmp[i] = i;
    counting_sort(tmp, sa);

    auto second = [&](std::uint64_t i, std::size_t h) {
        return i + h < n ? static_cast<std::int64_t>(rank[i + h]) : std::int64_t{-1};
    };
    for (std::size_t h = 1;; h <<= 1) {
        // Order by (rank[i], rank[i+h]): second key first, then stable by first key.
        std::size_t p = 0;
        for (std::size_t i = h < n ? n - h : 0; i < n; ++i) tmp[p++] = i;
        for (std::size_t j = 0; j < n; ++j)
            if (sa[j] >= h) tmp[p++] = sa[j] - h;
        counting_sort(tmp, sa);

        std::uint64_t r = 0;
        next_rank[sa[0]] = 0;
        for (std::size_t j = 1; j < n; ++j) {
            const std::uint64_t a = sa[j - 1], b = sa[j];
            if (rank[a] != rank[b] || second(a, h) != second(b, h)) ++r;
            next_rank[b] = r;
        }
        rank.swap(next_rank);
        classes = r + 1;
        if (classes == n) break;
    }
    return sa;
}

}  // namespace dyndex
