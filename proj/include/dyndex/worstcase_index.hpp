#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dyndex/semi_dynamic.hpp"
#include "dyndex/staged_collection.hpp"
#include "dyndex/suffix_tree.hpp"

namespace dyndex {

/// Holder types of the document hierarchy.
struct document_family {
    using item_id = doc_id;
    using payload = std::vector<symbol>;
    using tree = suffix_tree;
    using block = semi_dynamic_index;
    using hash = std::hash<doc_id>;
    struct config {
        unsigned tau = 2;
        bool counting = true;
        std::uint64_t sample_rate = 0;
    };
    using item = std::pair<item_id, payload>;

    static std::uint64_t size(const payload& p) { return p.size() + 1; }

    static tree make_tree(std::uint64_t seed) { return suffix_tree(seed); }
    static std::uint64_t tree_insert(tree& t, item_id id, const payload& p);
    static std::uint64_t tree_erase(tree& t, item_id id);
    static std::vector<item> tree_items(const tree& t);
    static std::uint64_t tree_symbols(const tree& t) { return t.total_symbols(); }
    static std::uint64_t tree_count(const tree& t) { return t.document_count(); }
    static std::uint64_t tree_item_size(const tree& t, item_id id) { return t.document_size(id); }
    static bool tree_contains(const tree& t, item_id id) { return t.contains(id); }

    static block build(std::vector<item> items, const config& cfg);
    static std::uint64_t block_erase(block& b, item_id id);
    static std::vector<item> block_items(const block& b) { return b.alive_pairs(); }
    static std::uint64_t block_alive(const block& b) { return b.alive_symbols(); }
    static std::uint64_t block_deleted(const block& b) { return b.deleted_symbols(); }
    static std::uint64_t block_count(const block& b) { return b.alive_documents(); }
    static std::uint64_t block_item_size(const block& b, item_id id) { return b.document_size(id); }
    static bool block_contains(const block& b, item_id id) { return b.contains(id); }

    static void save_items(std::ostream& out, const std::vector<item>& items) { save_documents(out, items); }
    static std::vector<item> load_items(std::istream& in) { return load_documents(in); }
};

struct worstcase_options {
    double epsilon = 0.5;
    /// 0 picks ceil(log2 log2 n) from expected_size.
    unsigned tau = 0;
    std::uint64_t expected_size = 0;
    bool counting = true;
    std::uint64_t sample_rate = 0;
    std::uint64_t seed = 1;
};

/// Fully dynamic document index whose updates do a bounded amount of
/// construction work each: rebuilds are spread over later updates.
class worstcase_index {
public:
    explicit worstcase_index(worstcase_options opts = {});

    /// Throws std::invalid_argument on duplicate ids or invalid text.
    void insert(doc_id id, std::vector<symbol> text);
    /// Throws std::out_of_range for unknown ids.
    void erase(doc_id id);

    occurrence_list query(std::span<const symbol> pattern) const;
    std::uint64_t count(std::span<const symbol> pattern) const;

    bool contains(doc_id id) const { return engine_.contains(id); }
    std::uint64_t alive_symbols() const { return engine_.size(); }
    std::uint64_t document_count() const { return engine_.item_count(); }

    /// Alive documents with their text, in docId order.
    document_list documents() const;

    const staged_collection<document_family>& engine() const { return engine_; }
    /// Finishes every pending rebuild.
    void settle() { engine_.settle(); }
    std::uint64_t deletion_overhead_bits() const;
    std::string validate() const { return engine_.validate(); }

    /// Settles pending rebuilds, then writes the holders.
    void save(std::ostream& out);
    static worstcase_index load(std::istream& in);

private:
    worstcase_index(worstcase_options opts, staged_collection<document_family> engine);

    worstcase_options opts_;
    staged_collection<document_family> engine_;
};

}  // namespace dyndex
