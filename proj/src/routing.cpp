#include "dyndex/routing.hpp"

#include <algorithm>
#include <cmath>

namespace dyndex {

namespace {

std::uint64_t at(std::span<const std::uint64_t> sizes, std::size_t j) { return j < sizes.size() ? sizes[j] : 0; }

}  // namespace

std::optional<std::size_t> first_fitting_level(std::span<const std::uint64_t> sizes,
                                               std::span<const std::uint64_t> caps, std::uint64_t t) {
    std::uint64_t prefix = 0;
    for (std::size_t j = 0; j < caps.size(); ++j) {
        prefix += at(sizes, j);
        if (prefix + t <= caps[j]) return j;
    }
    return std::nullopt;
}

staged_route route_item(std::span<const std::uint64_t> sizes, std::span<const std::uint64_t> caps, std::uint64_t t,
                        std::uint64_t nf, unsigned tau) {
    if (t * tau >= nf) return {staged_action::single_top, 0};
    if (at(sizes, 0) + t <= caps[0]) return {staged_action::tree, 0};
    const std::size_t r = caps.size() - 1;
    for (std::size_t j = 0; j < r; ++j) {
        if (at(sizes, j + 1) + at(sizes, j) + t > caps[j + 1]) continue;
        return {2 * t >= caps[j] ? staged_action::immediate : staged_action::lock, j};
    }
    return {staged_action::lock_last, r};
}

std::uint64_t purge_round_length(std::uint64_t nf, unsigned tau) {
    const double lt = std::log2(static_cast<double>(tau));
    return static_cast<std::uint64_t>(std::max(1.0, std::floor(static_cast<double>(nf) / (2.0 * tau * lt))));
}

std::vector<top_group> pack_tops(std::span<const std::uint64_t> sizes, std::uint64_t nf, unsigned tau) {
    const std::uint64_t cap = std::max<std::uint64_t>(1, 2 * nf / tau);
    std::vector<top_group> groups;
    std::optional<std::size_t> last_packed;
    top_group cur;
    std::uint64_t cur_size = 0;
    auto flush = [&] {
        if (cur.items.empty()) return;
        if (cur_size * 2 * tau < nf && last_packed) {
            auto& prev = groups[*last_packed].items;
            prev.insert(prev.end(), cur.items.begin(), cur.items.end());
        } else {
            last_packed = groups.size();
            groups.push_back(std::move(cur));
        }
        cur = {};
        cur_size = 0;
    };
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] * tau >= nf) {
            groups.push_back({{i}, true});
            continue;
        }
        if (cur_size + sizes[i] > cap) flush();
        cur_size += sizes[i];
        cur.items.push_back(i);
    }
    flush();
    return groups;
}

}  // namespace dyndex
