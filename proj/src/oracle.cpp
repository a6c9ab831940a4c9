#include "dyndex/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace dyndex::oracle {

bool naive_collection::insert(std::uint64_t id, text symbols) {
    return docs_.emplace(id, std::move(symbols)).second;
}

bool naive_collection::erase(std::uint64_t id) {
    return docs_.erase(id) != 0;
}

std::uint64_t naive_collection::total_symbols() const {
    std::uint64_t n = 0;
    for (const auto& [id, t] : docs_) n += t.size() + 1;
    return n;
}

std::set<hit> naive_collection::occurrences(const text& pattern) const {
    std::set<hit> out;
    if (pattern.empty()) return out;
    for (const auto& [id, t] : docs_) {
        if (t.size() < pattern.size()) continue;
        for (std::uint64_t off = 0; off + pattern.size() <= t.size(); ++off)
            if (std::equal(pattern.begin(), pattern.end(), t.begin() + static_cast<std::ptrdiff_t>(off)))
                out.emplace(id, off);
    }
    return out;
}

std::vector<std::uint64_t> naive_suffix_array(const std::vector<text>& docs) {
    text all;
    for (const auto& d : docs) {
        all.insert(all.end(), d.begin(), d.end());
        all.push_back(0);
    }
    std::vector<std::uint64_t> sa(all.size());
    std::iota(sa.begin(), sa.end(), 0);
    // Every suffix reaches a terminator; two terminators at the same depth
    // compare by position, which is document order.
    std::sort(sa.begin(), sa.end(), [&](std::uint64_t a, std::uint64_t b) {
        for (std::uint64_t k = 0;; ++k) {
            const auto x = all[a + k], y = all[b + k];
            if (x != y) return x < y;
            if (x == 0) return a < b;
        }
    });
    return sa;
}

bool naive_relation::add(std::uint64_t object, std::uint64_t label) {
    if (!pairs_.emplace(object, label).second) return false;
    by_label_.emplace(label, object);
    return true;
}

bool naive_relation::remove(std::uint64_t object, std::uint64_t label) {
    if (pairs_.erase({object, label}) == 0) return false;
    by_label_.erase({label, object});
    return true;
}

std::set<std::uint64_t> naive_relation::labels_of(std::uint64_t object) const {
    std::set<std::uint64_t> out;
    for (auto it = pairs_.lower_bound({object, 0}); it != pairs_.end() && it->first == object; ++it)
        out.insert(it->second);
    return out;
}

std::set<std::uint64_t> naive_relation::objects_of(std::uint64_t label) const {
    std::set<std::uint64_t> out;
    for (auto it = by_label_.lower_bound({label, 0}); it != by_label_.end() && it->first == label; ++it)
        out.insert(it->second);
    return out;
}

bool naive_graph::add_edge(std::uint64_t u, std::uint64_t v) {
    const bool fresh = out_[u].insert(v).second;
    in_[v].insert(u);
    return fresh;
}

bool naive_graph::remove_edge(std::uint64_t u, std::uint64_t v) {
    auto it = out_.find(u);
    if (it == out_.end() || it->second.erase(v) == 0) return false;
    in_[v].erase(u);
    return true;
}

bool naive_graph::has_edge(std::uint64_t u, std::uint64_t v) const {
    auto it = out_.find(u);
    return it != out_.end() && it->second.count(v) != 0;
}

std::set<std::uint64_t> naive_graph::out_neighbors(std::uint64_t u) const {
    auto it = out_.find(u);
    return it == out_.end() ? std::set<std::uint64_t>{} : it->second;
}

std::set<std::uint64_t> naive_graph::in_neighbors(std::uint64_t v) const {
    auto it = in_.find(v);
    return it == in_.end() ? std::set<std::uint64_t>{} : it->second;
}

}  // namespace dyndex::oracle
