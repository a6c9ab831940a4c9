#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dyndex/level_layout.hpp"
#include "dyndex/semi_dynamic.hpp"
#include "dyndex/suffix_tree.hpp"
#include "dyndex/types.hpp"

namespace dyndex {

struct amortized_options {
    double epsilon = 0.5;
    /// 0 picks ceil(log2 log2 n) at every global rebuild.
    unsigned tau = 0;
    level_mode mode = level_mode::constant_levels;
    bool counting = true;
    std::uint64_t sample_rate = 0;
    std::uint64_t seed = 1;
};

struct level_stats {
    std::uint64_t cap = 0;
    std::uint64_t alive_symbols = 0;
    std::uint64_t deleted_symbols = 0;
    std::uint64_t documents = 0;
};

struct amortized_stats {
    std::vector<level_stats> levels;  // index 0 is the suffix tree
    std::uint64_t alive_symbols = 0;
    std::uint64_t documents = 0;
    std::uint64_t inserted_symbols = 0;
    std::uint64_t build_symbols = 0;
    std::uint64_t global_rebuilds = 0;
    std::uint64_t n_at_rebuild = 0;
    unsigned tau = 0;
};

/// Fully dynamic index: a suffix tree for small content plus static levels
/// with geometric caps. Inserts merge lower levels upward; deletes are lazy.
class amortized_index {
public:
    explicit amortized_index(amortized_options opts = {});

    /// Throws std::invalid_argument on duplicate ids or invalid text.
    void insert(doc_id id, std::vector<symbol> text);
    /// Throws std::out_of_range for unknown ids.
    void erase(doc_id id);

    occurrence_list query(std::span<const symbol> pattern) const;
    std::uint64_t count(std::span<const symbol> pattern) const;

    bool contains(doc_id id) const { return where_.count(id) != 0; }
    std::uint64_t alive_symbols() const { return n_; }
    std::uint64_t document_count() const { return where_.size(); }
    /// Level holding the document, 0 for the suffix tree.
    std::size_t level_of(doc_id id) const { return where_.at(id).level; }
    const level_layout& layout() const { return layout_; }
    unsigned tau() const { return tau_; }
    level_mode mode() const { return opts_.mode; }
    amortized_stats stats() const;
    /// Alive documents with their text, in docId order.
    document_list documents() const;
    /// Deleted-symbol storage and mark vectors over all levels, in bits.
    std::uint64_t deletion_overhead_bits() const;
    /// Per-level size and registry consistency; empty string when valid.
    std::string validate() const;

    void save(std::ostream& out) const;
    static amortized_index load(std::istream& in);

private:
    struct location {
        std::size_t level;
        std::uint64_t size;
    };

    std::uint64_t level_size(std::size_t j) const;
    document_list drain(std::size_t upto);
    void global_rebuild(std::optional<document> extra);
    void place(std::size_t j, document_list docs);
    semi_dynamic_options level_options() const;

    amortized_options opts_;
    level_layout layout_;
    unsigned tau_ = 2;
    suffix_tree c0_;
    std::vector<std::optional<semi_dynamic_index>> levels_;  // index 0 unused
    std::unordered_map<doc_id, location> where_;
    std::uint64_t n_ = 0;
    std::uint64_t n_at_rebuild_ = 0;
    std::uint64_t inserted_ = 0;
    std::uint64_t build_symbols_ = 0;
    std::uint64_t global_rebuilds_ = 0;
    std::uint64_t reseed_ = 0;
};

}  // namespace dyndex
