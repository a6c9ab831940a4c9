#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyndex {

/// Text symbol. 0 is reserved as the document terminator; real symbols are 1..sigma.
using symbol = std::uint32_t;
using doc_id = std::uint64_t;

inline constexpr symbol terminator = 0;

/// One pattern occurrence: document and 0-based offset inside it.
struct occurrence {
    doc_id doc;
    std::uint64_t offset;

    friend auto operator<=>(const occurrence&, const occurrence&) = default;
};

using occurrence_list = std::vector<occurrence>;

/// Raised when a compact bit vector would store more zeros than it was sized for.
class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Space accounting, in bits.
struct size_report {
    std::uint64_t payload_bits = 0;
    std::uint64_t summary_bits = 0;
    std::uint64_t total_bits = 0;
};

}  // namespace dyndex
