#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dyndex {

/// Immutable bit sequence with constant-time rank and logarithmic-time select.
///
/// Rank directory: one 64-bit cumulative count per 512-bit superblock, so the
/// overhead is 1/8 of the payload.
class bit_array {
public:
    bit_array() = default;
    explicit bit_array(const std::vector<bool>& bits);
    bit_array(std::vector<std::uint64_t> words, std::size_t size);

    std::size_t size() const { return size_; }
    std::size_t ones() const { return ones_; }

    bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    /// Number of 1s in [0, i).
    std::size_t rank1(std::size_t i) const;
    std::size_t rank0(std::size_t i) const { return i - rank1(i); }
    std::size_t rank(bool bit, std::size_t i) const { return bit ? rank1(i) : rank0(i); }

    /// Position of the k-th 1 (k is 0-based). Precondition: k < ones().
    std::size_t select1(std::size_t k) const;
    std::size_t select0(std::size_t k) const;
    std::size_t select(bool bit, std::size_t k) const { return bit ? select1(k) : select0(k); }

    std::span<const std::uint64_t> words() const { return words_; }
    std::uint64_t size_in_bits() const;

private:
    void build_directory();

    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> super_;
    std::size_t size_ = 0;
    std::size_t ones_ = 0;
};

/// Index of the k-th set bit in w (0-based k, k < popcount(w)).
unsigned select_in_word(std::uint64_t w, unsigned k);

}  // namespace dyndex
