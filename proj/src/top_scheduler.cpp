#include "dyndex/top_scheduler.hpp"

#include <algorithm>
#include <random>

namespace dyndex {

scheduler_trial simulate_top_scheduler(std::uint64_t g, std::uint64_t delta, std::uint64_t rounds,
                                       std::uint64_t seed) {
    scheduler_trial out;
    if (g == 0 || delta == 0) return out;
    top_purge_scheduler sched(delta);
    for (std::uint64_t k = 0; k < g; ++k) sched.add_top(k);
    std::mt19937_64 rng(seed);

    // The strongest adversary spreads each round evenly over the counters
    // not yet zeroed in the current sweep; random rounds mix things up.
    std::vector<std::uint64_t> active;
    auto refill = [&] {
        active.clear();
        for (std::uint64_t k = 0; k < g; ++k) active.push_back(k);
    };
    refill();

    auto observe = [&] {
        for (const auto& [key, m] : sched.counters())
            out.max_ratio = std::max(out.max_ratio, static_cast<double>(m) / static_cast<double>(delta));
    };
    auto end_round = [&] {
        ++out.rounds;
        observe();
        const auto best = sched.argmax([](std::uint64_t) { return true; });
        sched.reset(*best);
        active.erase(std::remove(active.begin(), active.end(), *best), active.end());
        if (active.empty()) refill();
    };

    for (std::uint64_t round = 0; round < rounds; ++round) {
        const bool random_round = rng() % 8 == 0;
        std::uint64_t left = delta;
        while (left > 0) {
            std::uint64_t key;
            if (random_round) {
                key = rng() % g;
            } else {
                // next active counter with the smallest value keeps the sweep level
                key = *std::min_element(active.begin(), active.end(),
                                        [&](auto a, auto b) { return sched.m(a) < sched.m(b); });
            }
            const std::uint64_t piece = std::min<std::uint64_t>(left, std::max<std::uint64_t>(1, delta / (4 * g)));
            left -= piece;
            sched.record(key, piece, end_round);
        }
    }
    observe();
    return out;
}

}  // namespace dyndex
