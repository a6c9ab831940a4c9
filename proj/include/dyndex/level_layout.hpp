#pragma once

#include <cstdint>
#include <vector>

namespace dyndex {

enum class level_mode {
    constant_levels,  // caps grow by log^eps n per level, ceil(2/eps) levels
    loglog_levels,    // caps double per level, O(log log n) levels
};

/// Size caps, in symbols, of the sub-collections C_0..C_r.
struct level_layout {
    std::vector<std::uint64_t> caps;
    /// log2 n with the small-n clamp applied.
    double log_n = 4.0;

    std::size_t r() const { return caps.size() - 1; }

    /// Caps for the amortized hierarchy; C_r can hold at least 2n.
    static level_layout amortized(std::uint64_t n, double epsilon, level_mode mode);
    /// Caps 2n/log^(2 - i*eps) n for i = 0.. up to the first level that
    /// reaches 2n/tau, which becomes C_r with cap exactly 2n/tau.
    static level_layout staged(std::uint64_t n, double epsilon, unsigned tau);
};

/// Clamped log2 used by every cap formula: max(log2 n, 4).
double clamped_log2(std::uint64_t n);

/// ceil(log2 log2 n), at least 2.
unsigned default_tau(std::uint64_t n);

/// Harmonic number h_k.
double harmonic(std::uint64_t k);

}  // namespace dyndex
