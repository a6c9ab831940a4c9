#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace dyndex {

/// Round-based purge scheduler for top collections. Every delta deleted
/// symbols close a round; the owner then zeroes the counter of the top it
/// rebuilds, normally the one with the largest count.
class top_purge_scheduler {
public:
    explicit top_purge_scheduler(std::uint64_t delta = 1) : delta_(delta ? delta : 1) {}

    std::uint64_t delta() const { return delta_; }
    /// A shorter round that is already complete restarts from zero.
    void set_delta(std::uint64_t delta) {
        delta_ = delta ? delta : 1;
        if (progress_ >= delta_) progress_ = 0;
    }

    void add_top(std::uint64_t key, std::uint64_t m = 0) { m_[key] = m; }
    void remove_top(std::uint64_t key) { m_.erase(key); }
    bool has_top(std::uint64_t key) const { return m_.count(key) != 0; }
    std::uint64_t m(std::uint64_t key) const {
        auto it = m_.find(key);
        return it == m_.end() ? 0 : it->second;
    }
    void reset(std::uint64_t key) {
        if (auto it = m_.find(key); it != m_.end()) it->second = 0;
    }
    const std::map<std::uint64_t, std::uint64_t>& counters() const { return m_; }
    std::uint64_t progress() const { return progress_; }

    /// Records symbols deleted symbols, attributed to top when given. The
    /// deletion is split at round boundaries and on_round_end() runs at each
    /// one, after the part inside the closing round has been counted.
    template <class F>
    void record(std::optional<std::uint64_t> top, std::uint64_t symbols, F&& on_round_end) {
        while (symbols > 0) {
            const std::uint64_t piece = std::min(symbols, delta_ - progress_);
            if (top && m_.count(*top)) m_[*top] += piece;
            progress_ += piece;
            symbols -= piece;
            if (progress_ == delta_) {
                progress_ = 0;
                on_round_end();
            }
        }
    }

    /// Key with the largest counter among keys accepted by eligible.
    template <class P>
    std::optional<std::uint64_t> argmax(P&& eligible) const {
        std::optional<std::uint64_t> best;
        std::uint64_t best_m = 0;
        for (const auto& [key, m] : m_) {
            if (!eligible(key)) continue;
            if (!best || m > best_m) {
                best = key;
                best_m = m;
            }
        }
        return best;
    }

private:
    std::uint64_t delta_;
    std::uint64_t progress_ = 0;
    std::map<std::uint64_t, std::uint64_t> m_;
};

/// Outcome of a scheduler simulation against a greedy adversary.
struct scheduler_trial {
    double max_ratio = 0;  // largest m_i / delta seen
    std::uint64_t rounds = 0;
};

/// Plays rounds of g counters where an adversary spends delta per round on
/// the counters it expects to keep highest, and the scheduler zeroes the
/// largest one after every round.
scheduler_trial simulate_top_scheduler(std::uint64_t g, std::uint64_t delta, std::uint64_t rounds,
                                       std::uint64_t seed);

}  // namespace dyndex
