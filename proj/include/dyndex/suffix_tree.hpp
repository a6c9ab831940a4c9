#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dyndex/types.hpp"

namespace dyndex {

/// Generalized suffix tree over a changing set of documents.
///
/// Insertion follows McCreight (scan/rescan with suffix links); deletion
/// removes a document's leaves longest suffix first and contracts nodes left
/// with one child. Child dictionaries are hash maps with a per-tree random seed.
///
/// Edge labels point into stored document texts. Every edge label is kept so
/// that the symbols just before it in the same text spell the parent's path;
/// contraction and relabelling after a deletion rely on this.
class suffix_tree {
public:
    explicit suffix_tree(std::uint64_t seed = 0x9e3779b97f4a7c15ull);

    /// Throws std::invalid_argument for duplicate ids, empty documents or symbol 0.
    void insert(doc_id id, std::span<const symbol> text);
    /// Throws std::out_of_range for unknown ids.
    void erase(doc_id id);

    occurrence_list query(std::span<const symbol> pattern) const;
    std::uint64_t count(std::span<const symbol> pattern) const;

    bool contains(doc_id id) const { return slot_of_.count(id) != 0; }
    /// Stored text of a document, without terminator.
    std::vector<symbol> document_text(doc_id id) const;
    /// Length + 1 of a stored document.
    std::uint64_t document_size(doc_id id) const { return chunks_[static_cast<std::size_t>(slot_of_.at(id))].size(); }
    std::vector<doc_id> document_ids() const;
    std::uint64_t document_count() const { return slot_of_.size(); }
    /// Sum over documents of length + 1.
    std::uint64_t total_symbols() const { return total_symbols_; }
    bool empty() const { return slot_of_.empty(); }

    /// Live nodes, root included.
    std::uint64_t node_count() const { return nodes_.size() - free_nodes_.size(); }
    /// Child lookups, edge symbol comparisons, splits, leaf and node removals.
    std::uint64_t node_operations() const { return node_ops_; }
    std::uint64_t size_in_bits() const;

    /// Full structural check; returns an empty string when every invariant holds.
    std::string validate() const;

private:
    using key = std::uint64_t;
    static constexpr key terminal_flag = key{1} << 32;

    struct seeded_hash {
        std::uint64_t seed;
        std::size_t operator()(key k) const {
            std::uint64_t z = k + seed;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return static_cast<std::size_t>(z ^ (z >> 31));
        }
    };
    using child_map = std::unordered_map<key, std::int32_t, seeded_hash>;

    struct node {
        std::int32_t parent = -1;
        std::int32_t link = -1;
        std::int32_t chunk = -1;
        std::uint32_t start = 0;
        std::uint32_t len = 0;
        std::uint32_t depth = 0;
        std::int32_t leaf_slot = -1;
        std::uint32_t leaf_offset = 0;
        child_map children;
    };

    std::int32_t new_node();
    void free_node(std::int32_t v);
    void set_label(std::int32_t v, std::int32_t chunk, std::uint32_t start, std::uint32_t len);
    key edge_key(std::int32_t v) const { return chunks_[nodes_[v].chunk][nodes_[v].start]; }
    std::int32_t find_child(std::int32_t v, key k) const;
    std::int32_t split(std::int32_t child, std::uint32_t offset);
    void contract(std::int32_t v);
    void relabel(std::int32_t v, std::int32_t dead_chunk);
    std::vector<key> path_of(std::int32_t v) const;

    std::vector<node> nodes_;
    std::vector<std::int32_t> free_nodes_;
    std::vector<std::vector<key>> chunks_;  // per slot: text keys plus the slot's terminal key
    std::vector<std::unordered_set<std::int32_t>> refs_;  // nodes whose label lives in each chunk
    std::vector<std::vector<std::int32_t>> leaves_;       // per slot, leaf of each offset
    std::vector<doc_id> slot_doc_;
    std::vector<std::int32_t> free_slots_;
    std::unordered_map<doc_id, std::int32_t> slot_of_;
    seeded_hash hash_;
    std::uint64_t total_symbols_ = 0;
    mutable std::uint64_t node_ops_ = 0;
};

}  // namespace dyndex
