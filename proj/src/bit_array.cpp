#include "dyndex/bit_array.hpp"

#include <bit>
#include <cassert>

namespace dyndex {

namespace {
constexpr std::size_t words_per_super = 8;
}

unsigned select_in_word(std::uint64_t w, unsigned k) {
    for (unsigned i = 0; i < k; ++i) w &= w - 1;
    return static_cast<unsigned>(std::countr_zero(w));
}

bit_array::bit_array(const std::vector<bool>& bits) : size_(bits.size()) {
    words_.assign((size_ + 63) / 64, 0);
    for (std::size_t i = 0; i < size_; ++i)
        if (bits[i]) words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    build_directory();
}

bit_array::bit_array(std::vector<std::uint64_t> words, std::size_t size)
    : words_(std::move(words)), size_(size) {
    words_.resize((size_ + 63) / 64, 0);
    if (size_ & 63) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
    build_directory();
}

void bit_array::build_directory() {
    super_.assign(words_.size() / words_per_super + 1, 0);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (w % words_per_super == 0) super_[w / words_per_super] = acc;
        acc += static_cast<std::uint64_t>(std::popcount(words_[w]));
    }
    if (words_.size() % words_per_super == 0) super_.back() = acc;
    ones_ = acc;
}

std::size_t bit_array::rank1(std::size_t i) const {
    assert(i <= size_);
    const std::size_t w = i >> 6;
    const std::size_t s = w / words_per_super;
    std::size_t r = super_[s];
    for (std::size_t k = s * words_per_super; k < w; ++k)
        r += static_cast<std::size_t>(std::popcount(words_[k]));
    if (i & 63) r += static_cast<std::size_t>(std::popcount(words_[w] & ((std::uint64_t{1} << (i & 63)) - 1)));
    return r;
}

std::size_t bit_array::select1(std::size_t k) const {
    assert(k < ones_);
    // last superblock whose cumulative count is <= k
    std::size_t lo = 0, hi = super_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (super_[mid] <= k) lo = mid; else hi = mid;
    }
    std::size_t remaining = k - super_[lo];
    for (std::size_t w = lo * words_per_super; w < words_.size(); ++w) {
        const auto pc = static_cast<std::size_t>(std::popcount(words_[w]));
        if (remaining < pc) return w * 64 + select_in_word(words_[w], static_cast<unsigned>(remaining));
        remaining -= pc;
    }
    assert(false);
    return size_;
}

std::size_t bit_array::select0(std::size_t k) const {
    assert(k < size_ - ones_);
    std::size_t lo = 0, hi = super_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (mid * words_per_super * 64 - super_[mid] <= k) lo = mid; else hi = mid;
    }
    std::size_t remaining = k - (lo * words_per_super * 64 - super_[lo]);
    for (std::size_t w = lo * words_per_super; w < words_.size(); ++w) {
        const std::uint64_t inv = ~words_[w];
        const auto pc = static_cast<std::size_t>(std::popcount(inv));
        if (remaining < pc) return w * 64 + select_in_word(inv, static_cast<unsigned>(remaining));
        remaining -= pc;
    }
    assert(false);
    return size_;
}

std::uint64_t bit_array::size_in_bits() const {
    return 64 * (words_.size() + super_.size());
}

}  // namespace dyndex
