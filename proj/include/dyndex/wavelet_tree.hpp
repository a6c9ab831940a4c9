#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "dyndex/bit_array.hpp"
#include "dyndex/packed_vector.hpp"
#include "dyndex/types.hpp"

namespace dyndex {

/// Huffman-shaped wavelet tree: access, rank and select over an integer
/// sequence in time proportional to the code length of the symbol involved.
class wavelet_tree {
public:
    wavelet_tree() = default;
    explicit wavelet_tree(const std::vector<symbol>& seq);

    std::size_t size() const { return size_; }
    symbol access(std::size_t i) const;
    /// Occurrences of c in [0, i).
    std::size_t rank(symbol c, std::size_t i) const;
    /// Position of the k-th occurrence of c (0-based). Precondition: k < count(c).
    std::size_t select(symbol c, std::size_t k) const;
    /// (seq[i], rank(seq[i], i)) in one descent.
    std::pair<symbol, std::size_t> inverse_select(std::size_t i) const;
    std::size_t count(symbol c) const;
    bool contains(symbol c) const { return find(c).has_value(); }
    std::size_t alphabet_size() const { return syms_.size(); }
    std::uint64_t size_in_bits() const;

    void save(std::ostream& out) const;
    static wavelet_tree load(std::istream& in);

private:
    /// Index of c in syms_, if present.
    std::optional<std::size_t> find(symbol c) const;
    /// Child b of internal node v; a negative result c is the leaf of symbol ~c.
    std::int64_t child(std::int64_t v, bool b) const;
    std::size_t node_rank(std::int64_t v, bool b, std::size_t i) const;
    std::size_t node_select(std::int64_t v, bool b, std::size_t k) const;

    // Per symbol, sorted by symbol: code length, code bits (bit k = branch at
    // depth k) and frequency.
    packed_vector syms_;
    packed_vector lengths_;
    packed_vector paths_;
    packed_vector counts_;
    // Per internal node, breadth-first from the root: start of its bits in
    // bits_ and both children, coded as 2k for node k and 2j + 1 for leaf j.
    packed_vector offsets_;
    packed_vector left_;
    packed_vector right_;
    bit_array bits_;
    std::size_t size_ = 0;
};

}  // namespace dyndex
