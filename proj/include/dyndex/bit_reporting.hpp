#pragma once

// Bit vectors whose bits only ever go from 1 to 0 and that can list the
// surviving 1s of a range in time proportional to the output.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "dyndex/types.hpp"

namespace dyndex {

/// Hierarchical bitmap over item indices marking the non-empty ones.
/// Branching factor 64; next() climbs until a set bit appears, then descends.
class nonempty_summary {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    nonempty_summary() = default;
    /// All items start marked non-empty.
    explicit nonempty_summary(std::size_t items);

    void clear(std::size_t item);
    bool test(std::size_t item) const;
    /// Smallest marked item >= from, or npos.
    std::size_t next(std::size_t from) const;

    std::size_t depth() const { return levels_.size(); }
    std::uint64_t probes() const { return probes_; }
    std::uint64_t size_in_bits() const;

private:
    std::vector<std::vector<std::uint64_t>> levels_;
    std::vector<std::size_t> lengths_;
    mutable std::uint64_t probes_ = 0;
};

/// Plain vector of 64-bit words plus a summary of non-empty words.
class report_bit_vector {
public:
    report_bit_vector() = default;
    explicit report_bit_vector(const std::vector<bool>& bits);

    std::size_t size() const { return size_; }
    bool test(std::size_t i) const;
    void zero(std::size_t i);
    /// All j in [s, e] with bit j set, increasing.
    std::vector<std::size_t> report(std::size_t s, std::size_t e) const;

    /// Data words read by report() since construction.
    std::uint64_t words_touched() const { return words_touched_; }
    std::uint64_t summary_probes() const { return summary_.probes(); }
    std::size_t summary_depth() const { return summary_.depth(); }
    size_report space() const;

private:
    void emit(std::size_t w, std::uint64_t bits, std::vector<std::size_t>& out) const;

    std::vector<std::uint64_t> words_;
    nonempty_summary summary_;
    std::size_t size_ = 0;
    mutable std::uint64_t words_touched_ = 0;
};

/// Bit vector with few zeros, stored as per-block zero lists.
///
/// The vector is cut into blocks of tau bits. Each block keeps its zero count
/// in a packed field of bit_width(tau) bits; blocks that contain zeros keep the
/// in-block positions of those zeros, bit_width(tau - 1) bits each, in a
/// byte-aligned record. Records of 64 consecutive blocks share one buffer.
class compact_report_bit_vector {
public:
    compact_report_bit_vector() = default;
    /// All-ones vector of the given length. tau must be in [2, 64].
    compact_report_bit_vector(std::size_t length, unsigned tau, std::size_t zero_budget);
    /// From explicit bits; the number of zeros must not exceed zero_budget.
    compact_report_bit_vector(const std::vector<bool>& bits, unsigned tau, std::size_t zero_budget);

    std::size_t size() const { return size_; }
    unsigned tau() const { return tau_; }
    std::size_t zeros() const { return zeros_; }
    std::size_t zero_budget() const { return zero_budget_; }

    bool test(std::size_t i) const;
    /// Clears bit i. Throws budget_error if this would exceed the zero budget.
    void zero(std::size_t i);
    std::vector<std::size_t> report(std::size_t s, std::size_t e) const;
    /// Number of 1s in [0, i).
    std::size_t ones_before(std::size_t i) const;
    /// Number of 1s in [s, e]; 0 when s > e.
    std::size_t ones_in_range(std::size_t s, std::size_t e) const;

    template <class F>
    void for_each_one(std::size_t s, std::size_t e, F&& f) const;

    std::uint64_t blocks_touched() const { return blocks_touched_; }
    std::size_t summary_depth() const { return summary_.depth(); }
    /// Bits spent on zero-position records only.
    std::uint64_t record_bits() const;
    std::uint64_t count_field_bits() const;
    std::uint64_t directory_bits() const;
    size_report space() const;

private:
    static constexpr std::size_t group_blocks = 64;

    std::size_t block_count() const { return block_count_; }
    std::size_t block_length(std::size_t b) const;
    unsigned count(std::size_t b) const;
    void set_count(std::size_t b, unsigned c);
    std::size_t record_bytes(unsigned zero_count) const;
    std::size_t record_offset(std::size_t b) const;
    /// Ones of block b as a bit mask (bit k = position b*tau+k).
    std::uint64_t decode(std::size_t b, std::size_t offset) const;
    std::uint64_t decode(std::size_t b) const { return decode(b, record_offset(b)); }
    void check_range(std::size_t s, std::size_t e) const;

    std::size_t size_ = 0;
    unsigned tau_ = 2;
    unsigned count_width_ = 2;
    unsigned pos_width_ = 1;
    std::size_t block_count_ = 0;
    std::size_t zeros_ = 0;
    std::size_t zero_budget_ = 0;
    std::vector<std::uint64_t> counts_;
    std::vector<std::vector<std::uint8_t>> groups_;
    std::vector<std::uint32_t> group_zeros_;  // Fenwick tree of zero counts per group
    nonempty_summary summary_;
    mutable std::uint64_t blocks_touched_ = 0;
};

template <class F>
void compact_report_bit_vector::for_each_one(std::size_t s, std::size_t e, F&& f) const {
    check_range(s, e);
    const std::size_t bs = s / tau_;
    const std::size_t be = e / tau_;
    auto emit = [&](std::size_t b, std::uint64_t mask) {
        while (mask) {
            const unsigned k = static_cast<unsigned>(__builtin_ctzll(mask));
            mask &= mask - 1;
            f(b * tau_ + k);
        }
    };
    auto clip = [&](std::size_t b, std::uint64_t mask) {
        const std::size_t lo = b * tau_;
        if (s > lo) mask &= ~std::uint64_t{0} << (s - lo);
        const std::size_t hi = e - lo;  // inclusive in-block bound
        if (hi < 63) mask &= (std::uint64_t{2} << hi) - 1;
        return mask;
    };
    ++blocks_touched_;
    emit(bs, clip(bs, decode(bs)));
    if (be == bs) return;
    // Interior blocks come from the summary; offsets are tracked per group so
    // consecutive blocks of one group do not rescan its counts.
    std::size_t cached_group = nonempty_summary::npos, cached_block = 0, cached_offset = 0;
    for (std::size_t b = summary_.next(bs + 1); b != nonempty_summary::npos && b < be; b = summary_.next(b + 1)) {
        const std::size_t g = b / group_blocks;
        std::size_t offset;
        if (g == cached_group) {
            offset = cached_offset;
            for (std::size_t k = cached_block; k < b; ++k) offset += record_bytes(count(k));
        } else {
            offset = record_offset(b);
        }
        cached_group = g;
        cached_block = b;
        cached_offset = offset;
        ++blocks_touched_;
        emit(b, decode(b, offset));
    }
    ++blocks_touched_;
    emit(be, clip(be, decode(be)));
}

}  // namespace dyndex
