#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dyndex/bit_array.hpp"
#include "dyndex/bit_reporting.hpp"
#include "dyndex/packed_vector.hpp"
#include "dyndex/staged_collection.hpp"
#include "dyndex/types.hpp"
#include "dyndex/wavelet_tree.hpp"

namespace dyndex {

using object_id = std::uint32_t;
using label_slot = std::uint32_t;

/// (object, label slot) packed as object << 32 | slot.
using pair_key = std::uint64_t;
inline pair_key make_pair_key(object_id o, label_slot a) { return (std::uint64_t{o} << 32) | a; }
inline object_id key_object(pair_key k) { return static_cast<object_id>(k >> 32); }
inline label_slot key_label(pair_key k) { return static_cast<label_slot>(k); }

/// Static block of object-label pairs with lazy deletion.
///
/// S lists the labels of each object in increasing order, objects in
/// increasing order; N = 1^{n_1} 0 1^{n_2} 0 ... delimits the objects. D marks
/// alive positions of S and D_a (one vector, label runs concatenated) marks
/// the alive occurrences of each label.
class relation_block {
public:
    relation_block() = default;
    /// Throws std::invalid_argument on duplicate pairs.
    relation_block(std::vector<pair_key> pairs, unsigned tau);

    std::vector<label_slot> labels_of(object_id o) const;
    std::vector<object_id> objects_of(label_slot a) const;
    bool related(object_id o, label_slot a) const;
    std::uint64_t count_labels(object_id o) const;
    std::uint64_t count_objects(label_slot a) const;

    /// Marks the pair deleted; returns the number of bit updates.
    std::uint64_t erase(object_id o, label_slot a);

    std::uint64_t size() const { return s_.size(); }
    std::uint64_t deleted() const { return deleted_; }
    std::uint64_t alive() const { return s_.size() - deleted_; }
    std::vector<pair_key> alive_pairs() const;
    bool contains(object_id o, label_slot a) const { return related(o, a); }

    const wavelet_tree& labels() const { return s_; }
    const bit_array& delimiters() const { return n_; }
    const std::vector<object_id>& objects() const { return objects_; }
    bool label_present(label_slot a) const { return a < present_.size() && present_[a]; }

    size_report space() const;
    /// Deleted pairs' share of S plus the deletion vectors.
    std::uint64_t deletion_overhead_bits() const;

private:
    std::optional<std::size_t> object_index(object_id o) const;
    /// Half-open range of object index k in S.
    std::pair<std::size_t, std::size_t> range_of(std::size_t k) const;
    object_id object_at(std::size_t pos) const;
    std::optional<std::size_t> position(object_id o, label_slot a) const;
    std::size_t label_base(label_slot a) const;

    wavelet_tree s_;
    bit_array n_;
    std::vector<object_id> objects_;  // block-local object index -> object id
    compact_report_bit_vector d_;
    compact_report_bit_vector da_;
    packed_vector label_base_;  // start in D_a per present label, by present_ rank
    bit_array present_;
    std::uint64_t deleted_ = 0;
};

/// Uncompressed dynamic holder: per-object and per-label ordered sets.
class relation_lists {
public:
    void insert(object_id o, label_slot a);
    void erase(object_id o, label_slot a);
    bool related(object_id o, label_slot a) const;
    std::vector<label_slot> labels_of(object_id o) const;
    std::vector<object_id> objects_of(label_slot a) const;
    std::uint64_t count_labels(object_id o) const;
    std::uint64_t count_objects(label_slot a) const;
    std::uint64_t size() const { return size_; }
    std::vector<pair_key> pairs() const;
    std::uint64_t operations() const { return ops_; }
    std::uint64_t size_in_bits() const;

private:
    std::unordered_map<object_id, std::set<label_slot>> by_object_;
    std::unordered_map<label_slot, std::set<object_id>> by_label_;
    std::uint64_t size_ = 0;
    std::uint64_t ops_ = 0;
};

struct relation_family {
    struct unit {};
    using item_id = pair_key;
    using payload = unit;
    using tree = relation_lists;
    using block = relation_block;
    using hash = std::hash<pair_key>;
    struct config {
        unsigned tau = 2;
    };
    using item = std::pair<item_id, payload>;

    static std::uint64_t size(const payload&) { return 1; }

    static tree make_tree(std::uint64_t) { return {}; }
    static std::uint64_t tree_insert(tree& t, item_id id, const payload&);
    static std::uint64_t tree_erase(tree& t, item_id id);
    static std::vector<item> tree_items(const tree& t);
    static std::uint64_t tree_symbols(const tree& t) { return t.size(); }
    static std::uint64_t tree_count(const tree& t) { return t.size(); }
    static std::uint64_t tree_item_size(const tree&, item_id) { return 1; }
    static bool tree_contains(const tree& t, item_id id) { return t.related(key_object(id), key_label(id)); }

    static block build(std::vector<item> items, const config& cfg);
    static std::uint64_t block_erase(block& b, item_id id) { return b.erase(key_object(id), key_label(id)); }
    static std::vector<item> block_items(const block& b);
    static std::uint64_t block_alive(const block& b) { return b.alive(); }
    static std::uint64_t block_deleted(const block& b) { return b.deleted(); }
    static std::uint64_t block_count(const block& b) { return b.alive(); }
    static std::uint64_t block_item_size(const block&, item_id) { return 1; }
    static bool block_contains(const block& b, item_id id) { return b.contains(key_object(id), key_label(id)); }
};

struct relation_options {
    double epsilon = 0.5;
    /// 0 picks ceil(log2 log2 n) from expected_pairs.
    unsigned tau = 0;
    std::uint64_t expected_pairs = 0;
    std::uint64_t seed = 1;
};

struct relation_stats {
    std::uint64_t pairs = 0;
    std::uint64_t objects = 0;
    std::uint64_t labels = 0;
    std::uint64_t label_slots = 0;
    std::uint64_t blocks = 0;
    std::uint64_t block_bits = 0;
    std::uint64_t list_bits = 0;
};

/// Fully dynamic binary relation between objects and labels.
class dynamic_relation {
public:
    explicit dynamic_relation(relation_options opts = {});

    /// Throws std::invalid_argument if the pair is already present.
    void add(object_id o, std::uint64_t label);
    /// Throws std::out_of_range if the pair is absent.
    void remove(object_id o, std::uint64_t label);

    std::vector<std::uint64_t> labels_of(object_id o) const;
    std::vector<object_id> objects_of(std::uint64_t label) const;
    bool related(object_id o, std::uint64_t label) const;
    std::uint64_t count_labels(object_id o) const;
    std::uint64_t count_objects(std::uint64_t label) const;

    std::uint64_t size() const { return engine_.size(); }
    std::uint64_t label_count() const { return sn_.size(); }
    std::uint64_t object_count() const { return object_pairs_.size(); }
    std::optional<label_slot> slot_of(std::uint64_t label) const;

    const staged_collection<relation_family>& engine() const { return engine_; }
    void settle() { engine_.settle(); }
    relation_stats stats() const;
    std::string validate() const;

private:
    staged_collection<relation_family> engine_;
    std::unordered_map<std::uint64_t, label_slot> sn_;  // label -> slot
    std::vector<std::optional<std::uint64_t>> ns_;     // slot -> label
    std::vector<std::uint64_t> slot_pairs_;            // alive pairs per slot
    std::vector<label_slot> free_slots_;
    std::unordered_map<object_id, std::uint64_t> object_pairs_;
};

/// Directed graph on top of the relation: edge u -> v is object u related to label v.
class directed_graph {
public:
    explicit directed_graph(relation_options opts = {}) : rel_(opts) {}

    void add_edge(object_id u, object_id v) { rel_.add(u, v); }
    void remove_edge(object_id u, object_id v) { rel_.remove(u, v); }
    bool has_edge(object_id u, object_id v) const { return rel_.related(u, v); }
    std::vector<object_id> out_neighbors(object_id u) const;
    std::vector<object_id> in_neighbors(object_id v) const { return rel_.objects_of(v); }
    std::uint64_t out_degree(object_id u) const { return rel_.count_labels(u); }
    std::uint64_t in_degree(object_id v) const { return rel_.count_objects(v); }
    std::uint64_t edge_count() const { return rel_.size(); }

    const dynamic_relation& relation() const { return rel_; }
    void settle() { rel_.settle(); }

private:
    dynamic_relation rel_;
};

}  // namespace dyndex
