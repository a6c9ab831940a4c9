#include "dyndex/bit_reporting.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace dyndex {

namespace {

std::uint64_t low_mask(std::size_t bits) {
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

void range_error(const char* what, std::size_t i, std::size_t n) {
    throw std::out_of_range(std::string(what) + ": position " + std::to_string(i) + " outside [0, " +
                            std::to_string(n) + ")");
}

}  // namespace

// ---------------------------------------------------------------------------
// nonempty_summary

nonempty_summary::nonempty_summary(std::size_t items) {
    std::size_t len = items;
    do {
        std::vector<std::uint64_t> level((len + 63) / 64, ~std::uint64_t{0});
        if (len & 63) level.back() = low_mask(len & 63);
        if (len == 0) level.clear();
        levels_.push_back(std::move(level));
        lengths_.push_back(len);
        len = (len + 63) / 64;
    } while (lengths_.back() > 64);
}

bool nonempty_summary::test(std::size_t item) const {
    return (levels_[0][item >> 6] >> (item & 63)) & 1u;
}

void nonempty_summary::clear(std::size_t item) {
    std::size_t pos = item;
    for (auto& level : levels_) {
        auto& w = level[pos >> 6];
        w &= ~(std::uint64_t{1} << (pos & 63));
        if (w != 0) return;
        pos >>= 6;
    }
}

std::size_t nonempty_summary::next(std::size_t from) const {
    std::size_t level = 0;
    std::size_t pos = from;
    while (true) {
        if (level == levels_.size() || pos >= lengths_[level]) return npos;
        ++probes_;
        const std::uint64_t w = levels_[level][pos >> 6] & (~std::uint64_t{0} << (pos & 63));
        if (w != 0) {
            pos = (pos & ~std::size_t{63}) + static_cast<std::size_t>(std::countr_zero(w));
            break;
        }
        pos = (pos >> 6) + 1;
        ++level;
    }
    while (level > 0) {
        --level;
        ++probes_;
        pos = pos * 64 + static_cast<std::size_t>(std::countr_zero(levels_[level][pos]));
    }
    return pos;
}

std::uint64_t nonempty_summary::size_in_bits() const {
    std::uint64_t bits = 0;
    for (const auto& level : levels_) bits += 64 * level.size();
    return bits;
}

// ---------------------------------------------------------------------------
// report_bit_vector

report_bit_vector::report_bit_vector(const std::vector<bool>& bits) : size_(bits.size()) {
    words_.assign((size_ + 63) / 64, 0);
    for (std::size_t i = 0; i < size_; ++i)
        if (bits[i]) words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    summary_ = nonempty_summary(words_.size());
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w] == 0) summary_.clear(w);
}

bool report_bit_vector::test(std::size_t i) const {
    if (i >= size_) range_error("report_bit_vector::test", i, size_);
    return (words_[i >> 6] >> (i & 63)) & 1u;
}

void report_bit_vector::zero(std::size_t i) {
    if (i >= size_) range_error("report_bit_vector::zero", i, size_);
    auto& w = words_[i >> 6];
    if (w == 0) return;
    w &= ~(std::uint64_t{1} << (i & 63));
    if (w == 0) summary_.clear(i >> 6);
}

void report_bit_vector::emit(std::size_t w, std::uint64_t bits, std::vector<std::size_t>& out) const {
    while (bits) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
    }
}

std::vector<std::size_t> report_bit_vector::report(std::size_t s, std::size_t e) const {
    if (s > e || e >= size_) throw std::out_of_range("report_bit_vector::report: invalid range");
    std::vector<std::size_t> out;
    const std::size_t ws = s >> 6;
    const std::size_t we = e >> 6;
    const std::uint64_t head = ~std::uint64_t{0} << (s & 63);
    const std::uint64_t tail = low_mask((e & 63) + 1);
    ++words_touched_;
    if (ws == we) {
        emit(ws, words_[ws] & head & tail, out);
        return out;
    }
    emit(ws, words_[ws] & head, out);
    for (std::size_t w = summary_.next(ws + 1); w != nonempty_summary::npos && w < we; w = summary_.next(w + 1)) {
        ++words_touched_;
        emit(w, words_[w], out);
    }
    ++words_touched_;
    emit(we, words_[we] & tail, out);
    return out;
}

size_report report_bit_vector::space() const {
    size_report r;
    r.payload_bits = 64 * words_.size();
    r.summary_bits = summary_.size_in_bits();
    r.total_bits = r.payload_bits + r.summary_bits;
    return r;
}

// ---------------------------------------------------------------------------
// compact_report_bit_vector

compact_report_bit_vector::compact_report_bit_vector(std::size_t length, unsigned tau, std::size_t zero_budget)
    : size_(length), tau_(tau), zero_budget_(zero_budget) {
    if (tau < 2 || tau > 64) throw std::invalid_argument("compact_report_bit_vector: tau must be in [2, 64]");
    count_width_ = static_cast<unsigned>(std::bit_width(tau));
    pos_width_ = static_cast<unsigned>(std::bit_width(tau - 1));
    block_count_ = (size_ + tau_ - 1) / tau_;
    counts_.assign((block_count_ * count_width_ + 63) / 64, 0);
    if (zero_budget >= (std::size_t{1} << 32))
        throw std::invalid_argument("compact_report_bit_vector: zero budget must stay below 2^32");
    groups_.assign((block_count_ + group_blocks - 1) / group_blocks, {});
    group_zeros_.assign(groups_.size(), 0);
    summary_ = nonempty_summary(block_count_);
}

compact_report_bit_vector::compact_report_bit_vector(const std::vector<bool>& bits, unsigned tau,
                                                     std::size_t zero_budget)
    : compact_report_bit_vector(bits.size(), tau, zero_budget) {
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (!bits[i]) zero(i);
}

std::size_t compact_report_bit_vector::block_length(std::size_t b) const {
    return std::min<std::size_t>(tau_, size_ - b * tau_);
}

unsigned compact_report_bit_vector::count(std::size_t b) const {
    const std::size_t bit = b * count_width_;
    const std::size_t w = bit >> 6, o = bit & 63;
    std::uint64_t v = counts_[w] >> o;
    if (o + count_width_ > 64) v |= counts_[w + 1] << (64 - o);
    return static_cast<unsigned>(v & low_mask(count_width_));
}

void compact_report_bit_vector::set_count(std::size_t b, unsigned c) {
    const std::size_t bit = b * count_width_;
    const std::size_t w = bit >> 6, o = bit & 63;
    const std::uint64_t m = low_mask(count_width_);
    counts_[w] = (counts_[w] & ~(m << o)) | (static_cast<std::uint64_t>(c) << o);
    if (o + count_width_ > 64) {
        const unsigned spill = static_cast<unsigned>(o + count_width_ - 64);
        counts_[w + 1] = (counts_[w + 1] & ~low_mask(spill)) | (static_cast<std::uint64_t>(c) >> (64 - o));
    }
}

std::size_t compact_report_bit_vector::record_bytes(unsigned zero_count) const {
    return (static_cast<std::size_t>(zero_count) * pos_width_ + 7) / 8;
}

std::size_t compact_report_bit_vector::record_offset(std::size_t b) const {
    std::size_t offset = 0;
    for (std::size_t k = (b / group_blocks) * group_blocks; k < b; ++k) offset += record_bytes(count(k));
    return offset;
}

std::uint64_t compact_report_bit_vector::decode(std::size_t b, std::size_t offset) const {
    std::uint64_t ones = low_mask(block_length(b));
    const unsigned c = count(b);
    if (c == 0) return ones;
    const auto& buf = groups_[b / group_blocks];
    std::size_t bitpos = offset * 8;
    for (unsigned k = 0; k < c; ++k) {
        unsigned v = 0;
        for (unsigned t = 0; t < pos_width_; ++t, ++bitpos)
            v |= static_cast<unsigned>((buf[bitpos >> 3] >> (bitpos & 7)) & 1u) << t;
        ones &= ~(std::uint64_t{1} << v);
    }
    return ones;
}

bool compact_report_bit_vector::test(std::size_t i) const {
    if (i >= size_) range_error("compact_report_bit_vector::test", i, size_);
    return (decode(i / tau_) >> (i % tau_)) & 1u;
}

void compact_report_bit_vector::zero(std::size_t i) {
    if (i >= size_) range_error("compact_report_bit_vector::zero", i, size_);
    const std::size_t b = i / tau_;
    const std::size_t offset = record_offset(b);
    const std::uint64_t ones = decode(b, offset);
    const unsigned bit = static_cast<unsigned>(i % tau_);
    if (!((ones >> bit) & 1u)) return;
    if (zeros_ + 1 > zero_budget_)
        throw budget_error("compact_report_bit_vector: zero budget of " + std::to_string(zero_budget_) + " exhausted");

    const unsigned old_count = count(b);
    const unsigned new_count = old_count + 1;
    // Re-encode the record: zero positions in increasing order.
    const std::uint64_t zero_mask = (~ones | (std::uint64_t{1} << bit)) & low_mask(block_length(b));
    std::vector<std::uint8_t> record(record_bytes(new_count), 0);
    std::size_t bitpos = 0;
    for (std::uint64_t m = zero_mask; m; m &= m - 1) {
        const auto v = static_cast<unsigned>(std::countr_zero(m));
        for (unsigned t = 0; t < pos_width_; ++t, ++bitpos)
            if ((v >> t) & 1u) record[bitpos >> 3] |= static_cast<std::uint8_t>(1u << (bitpos & 7));
    }
    auto& buf = groups_[b / group_blocks];
    const auto first = buf.begin() + static_cast<std::ptrdiff_t>(offset);
    buf.erase(first, first + static_cast<std::ptrdiff_t>(record_bytes(old_count)));
    buf.insert(buf.begin() + static_cast<std::ptrdiff_t>(offset), record.begin(), record.end());
    buf.shrink_to_fit();

    set_count(b, new_count);
    ++zeros_;
    for (auto g = b / group_blocks; g < group_zeros_.size(); g |= g + 1) ++group_zeros_[g];
    if (new_count == block_length(b)) summary_.clear(b);
}

void compact_report_bit_vector::check_range(std::size_t s, std::size_t e) const {
    if (s > e || e >= size_) throw std::out_of_range("compact_report_bit_vector::report: invalid range");
}

std::size_t compact_report_bit_vector::ones_before(std::size_t i) const {
    if (i > size_) range_error("compact_report_bit_vector::ones_before", i, size_);
    const std::size_t b = i / tau_;
    const std::size_t g = b / group_blocks;
    std::size_t zeros = 0;
    for (auto k = g; k > 0; k &= k - 1) zeros += group_zeros_[k - 1];
    std::size_t offset = 0;
    for (std::size_t k = g * group_blocks; k < b; ++k) {
        const unsigned c = count(k);
        zeros += c;
        offset += record_bytes(c);
    }
    if (const unsigned rest = static_cast<unsigned>(i % tau_); rest > 0)
        zeros += rest - static_cast<unsigned>(std::popcount(decode(b, offset) & low_mask(rest)));
    return i - zeros;
}

std::size_t compact_report_bit_vector::ones_in_range(std::size_t s, std::size_t e) const {
    if (s > e) return 0;
    check_range(s, e);
    return ones_before(e + 1) - ones_before(s);
}

std::vector<std::size_t> compact_report_bit_vector::report(std::size_t s, std::size_t e) const {
    std::vector<std::size_t> out;
    for_each_one(s, e, [&](std::size_t j) { out.push_back(j); });
    return out;
}

std::uint64_t compact_report_bit_vector::record_bits() const {
    std::uint64_t bytes = 0;
    for (const auto& g : groups_) bytes += g.size();
    return 8 * bytes;
}

std::uint64_t compact_report_bit_vector::count_field_bits() const {
    return static_cast<std::uint64_t>(block_count_) * count_width_;
}

std::uint64_t compact_report_bit_vector::directory_bits() const {
    return (8 * sizeof(std::vector<std::uint8_t>) + 32) * groups_.size();
}

size_report compact_report_bit_vector::space() const {
    size_report r;
    r.payload_bits = count_field_bits() + record_bits() + directory_bits();
    r.summary_bits = summary_.size_in_bits();
    r.total_bits = r.payload_bits + r.summary_bits;
    return r;
}

}  // namespace dyndex
