#pragma once

// Brute-force reference models used to check the real structures.
// Deliberately self-contained: nothing here depends on the index code.

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace dyndex::oracle {

using text = std::vector<std::uint32_t>;
using hit = std::pair<std::uint64_t, std::uint64_t>;  // (docId, offset)

/// Documents kept verbatim; queries scan every offset.
class naive_collection {
public:
    bool insert(std::uint64_t id, text symbols);
    bool erase(std::uint64_t id);
    bool contains(std::uint64_t id) const { return docs_.count(id) != 0; }
    const text& document(std::uint64_t id) const { return docs_.at(id); }
    const std::map<std::uint64_t, text>& documents() const { return docs_; }
    /// Sum of document lengths, one terminator each included.
    std::uint64_t total_symbols() const;

    std::set<hit> occurrences(const text& pattern) const;

private:
    std::map<std::uint64_t, text> docs_;
};

/// Suffix array of the documents in the given order, each followed by 0.
/// Terminator ties go to the earlier document.
std::vector<std::uint64_t> naive_suffix_array(const std::vector<text>& docs);

/// Set of (object, label) pairs.
class naive_relation {
public:
    bool add(std::uint64_t object, std::uint64_t label);
    bool remove(std::uint64_t object, std::uint64_t label);
    bool related(std::uint64_t object, std::uint64_t label) const { return pairs_.count({object, label}) != 0; }
    std::set<std::uint64_t> labels_of(std::uint64_t object) const;
    std::set<std::uint64_t> objects_of(std::uint64_t label) const;
    std::uint64_t size() const { return pairs_.size(); }
    const std::set<std::pair<std::uint64_t, std::uint64_t>>& pairs() const { return pairs_; }

private:
    std::set<std::pair<std::uint64_t, std::uint64_t>> pairs_;
    std::set<std::pair<std::uint64_t, std::uint64_t>> by_label_;
};

/// Directed graph as adjacency sets in both directions.
class naive_graph {
public:
    bool add_edge(std::uint64_t u, std::uint64_t v);
    bool remove_edge(std::uint64_t u, std::uint64_t v);
    bool has_edge(std::uint64_t u, std::uint64_t v) const;
    std::set<std::uint64_t> out_neighbors(std::uint64_t u) const;
    std::set<std::uint64_t> in_neighbors(std::uint64_t v) const;
    std::uint64_t out_degree(std::uint64_t u) const { return out_neighbors(u).size(); }
    std::uint64_t in_degree(std::uint64_t v) const { return in_neighbors(v).size(); }

private:
    std::map<std::uint64_t, std::set<std::uint64_t>> out_, in_;
};

}  // namespace dyndex::oracle
