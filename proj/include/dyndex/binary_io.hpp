#pragma once

// Little-endian binary helpers for snapshot files.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "dyndex/bit_array.hpp"

namespace dyndex::io {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class T>
void put(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw format_error("truncated snapshot");
    return value;
}

template <class T>
void put_vector(std::ostream& out, const std::vector<T>& v) {
    put<std::uint64_t>(out, v.size());
    if (!v.empty()) out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> get_vector(std::istream& in, std::uint64_t max_items = std::uint64_t{1} << 40) {
    const auto n = get<std::uint64_t>(in);
    if (n > max_items) throw format_error("implausible vector length in snapshot");
    std::vector<T> v(n);
    if (n && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))))
        throw format_error("truncated snapshot");
    return v;
}

inline void put_bits(std::ostream& out, const bit_array& b) {
    put<std::uint64_t>(out, b.size());
    put_vector(out, std::vector<std::uint64_t>(b.words().begin(), b.words().end()));
}

inline bit_array get_bits(std::istream& in) {
    const auto size = get<std::uint64_t>(in);
    auto words = get_vector<std::uint64_t>(in);
    if (words.size() != (size + 63) / 64) throw format_error("bit array length mismatch");
    return bit_array(std::move(words), size);
}

}  // namespace dyndex::io
