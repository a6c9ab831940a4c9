#pragma once

#include <cstdint>
#include <vector>

#include "dyndex/types.hpp"

namespace dyndex {

/// Suffix array of a multi-document text in which every document ends with
/// the terminator 0. The k-th terminator (in text order) sorts before the
/// (k+1)-th and before every real symbol, which breaks ties by document order.
///
/// Prefix doubling with counting sorts, O(n log n).
std::vector<std::uint64_t> build_suffix_array(const std::vector<symbol>& text);

}  // namespace dyndex
