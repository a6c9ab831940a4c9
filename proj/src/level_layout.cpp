#include "dyndex/level_layout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyndex {

namespace {

constexpr std::uint64_t small_n = 64;

void make_increasing(std::vector<std::uint64_t>& caps) {
    caps[0] = std::max<std::uint64_t>(caps[0], 1);
    for (std::size_t i = 1; i < caps.size(); ++i) caps[i] = std::max(caps[i], caps[i - 1] + 1);
}

}  // namespace

double clamped_log2(std::uint64_t n) {
    return std::max(std::log2(static_cast<double>(std::max<std::uint64_t>(n, 1))), 4.0);
}

unsigned default_tau(std::uint64_t n) {
    const double ll = std::log2(clamped_log2(n));
    return std::max(2u, static_cast<unsigned>(std::ceil(ll - 1e-9)));
}

double harmonic(std::uint64_t k) {
    double h = 0;
    for (std::uint64_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

level_layout level_layout::amortized(std::uint64_t n, double epsilon, level_mode mode) {
    if (!(epsilon > 0 && epsilon <= 2)) throw std::invalid_argument("level_layout: epsilon must be in (0, 2]");
    n = std::max(n, small_n);
    level_layout out;
    out.log_n = clamped_log2(n);
    const double base = 2.0 * static_cast<double>(n) / (out.log_n * out.log_n);
    if (mode == level_mode::constant_levels) {
        const auto r = static_cast<std::size_t>(std::ceil(2.0 / epsilon - 1e-9));
        for (std::size_t i = 0; i <= r; ++i)
            out.caps.push_back(static_cast<std::uint64_t>(base * std::pow(out.log_n, epsilon * static_cast<double>(i))));
    } else {
        double cap = base;
        while (true) {
            out.caps.push_back(static_cast<std::uint64_t>(cap));
            if (cap >= 2.0 * static_cast<double>(n)) break;
            cap *= 2;
        }
    }
    out.caps[0] = std::max<std::uint64_t>(out.caps[0], small_n);
    out.caps.back() = std::max<std::uint64_t>(out.caps.back(), 2 * n);
    make_increasing(out.caps);
    return out;
}

level_layout level_layout::staged(std::uint64_t n, double epsilon, unsigned tau) {
    if (!(epsilon > 0 && epsilon <= 2)) throw std::invalid_argument("level_layout: epsilon must be in (0, 2]");
    if (tau < 2) throw std::invalid_argument("level_layout: tau must be at least 2");
    n = std::max(n, small_n);
    level_layout out;
    out.log_n = clamped_log2(n);
    const auto top = static_cast<std::uint64_t>(2.0 * static_cast<double>(n) / tau);
    for (std::size_t i = 0;; ++i) {
        const double cap = 2.0 * static_cast<double>(n) / std::pow(out.log_n, 2.0 - epsilon * static_cast<double>(i));
        if (cap >= static_cast<double>(top) || i > 64) break;
        out.caps.push_back(static_cast<std::uint64_t>(cap));
    }
    if (out.caps.empty()) out.caps.push_back(top / 2);
    out.caps.push_back(top);
    make_increasing(out.caps);
    return out;
}

}  // namespace dyndex
