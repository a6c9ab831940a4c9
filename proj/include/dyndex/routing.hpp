#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dyndex {

/// Smallest j with size(C_0) + ... + size(C_j) + t <= caps[j]. Empty when no
/// level fits and the collection must be rebuilt globally.
std::optional<std::size_t> first_fitting_level(std::span<const std::uint64_t> sizes,
                                               std::span<const std::uint64_t> caps, std::uint64_t t);

enum class staged_action {
    single_top,  // t * tau >= nf: the item gets a top of its own
    tree,        // fits in C_0
    immediate,   // rebuild C_{level+1} from C_level, C_{level+1} and the item now
    lock,        // lock C_level and merge it into C_{level+1} in the background
    lock_last,   // lock C_r and turn it into tops in the background
};

struct staged_route {
    staged_action action;
    std::size_t level = 0;
};

/// Placement of a new item of size t in the staged hierarchy.
staged_route route_item(std::span<const std::uint64_t> sizes, std::span<const std::uint64_t> caps, std::uint64_t t,
                        std::uint64_t nf, unsigned tau);

/// Deleted symbols per purge round: max(1, floor(nf / (2 tau log2 tau))).
std::uint64_t purge_round_length(std::uint64_t nf, unsigned tau);

/// Whether a locked C_r with this many alive symbols becomes a top by itself
/// instead of joining another top.
inline bool locked_top_stands_alone(std::uint64_t alive, std::uint64_t nf, unsigned tau) {
    return alive * 2 * tau >= nf;
}

/// Item indices grouped into tops. Items with size * tau >= nf are alone;
/// the rest are packed greedily into groups of at most 2nf/tau symbols and a
/// trailing group under nf/(2 tau) joins the previous packed group.
struct top_group {
    std::vector<std::size_t> items;
    bool single = false;
};
std::vector<top_group> pack_tops(std::span<const std::uint64_t> sizes, std::uint64_t nf, unsigned tau);

}  // namespace dyndex
