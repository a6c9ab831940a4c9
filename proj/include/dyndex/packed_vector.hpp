#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "dyndex/binary_io.hpp"

namespace dyndex {

/// Fixed-width unsigned integers packed back to back in 64-bit words.
class packed_vector {
public:
    packed_vector() = default;
    explicit packed_vector(const std::vector<std::uint64_t>& values) {
        std::uint64_t max = 0;
        for (auto v : values) max = v > max ? v : max;
        width_ = std::max(1u, static_cast<unsigned>(std::bit_width(max)));
        size_ = values.size();
        words_.assign((size_ * width_ + 63) / 64, 0);
        for (std::size_t i = 0; i < size_; ++i) put(i, values[i]);
    }

    std::size_t size() const { return size_; }
    unsigned width() const { return width_; }

    std::uint64_t operator[](std::size_t i) const {
        const std::size_t bit = i * width_;
        const std::size_t w = bit >> 6, o = bit & 63;
        std::uint64_t v = words_[w] >> o;
        if (o + width_ > 64) v |= words_[w + 1] << (64 - o);
        return width_ == 64 ? v : v & ((std::uint64_t{1} << width_) - 1);
    }

    std::uint64_t size_in_bits() const { return 64 * words_.size(); }

    void save(std::ostream& out) const {
        io::put<std::uint64_t>(out, size_);
        io::put<std::uint32_t>(out, width_);
        io::put_vector(out, words_);
    }
    static packed_vector load(std::istream& in) {
        packed_vector p;
        p.size_ = io::get<std::uint64_t>(in);
        p.width_ = io::get<std::uint32_t>(in);
        p.words_ = io::get_vector<std::uint64_t>(in);
        if (p.width_ == 0 || p.width_ > 64 || p.words_.size() != (p.size_ * p.width_ + 63) / 64)
            throw io::format_error("packed vector header mismatch");
        return p;
    }

private:
    void put(std::size_t i, std::uint64_t v) {
        const std::size_t bit = i * width_;
        const std::size_t w = bit >> 6, o = bit & 63;
        words_[w] |= v << o;
        if (o + width_ > 64) words_[w + 1] |= v >> (64 - o);
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    unsigned width_ = 1;
};

}  // namespace dyndex
