#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dyndex/bit_reporting.hpp"
#include "dyndex/static_index.hpp"
#include "dyndex/types.hpp"

namespace dyndex {

struct semi_dynamic_options {
    /// Purge threshold: the index is rebuilt once more than size/tau symbols are deleted.
    unsigned tau = 4;
    bool counting = true;
    /// When false, deletions only mark; the owner decides when to rebuild.
    bool auto_purge = true;
    std::uint64_t sample_rate = 0;
};

enum class purge_signal { none, rebuilt };

/// Static index plus lazy deletion marks over its suffix-array ranks.
///
/// A document of length L occupies L+1 suffixes (its terminator included),
/// and all symbol counts here use that size.
class semi_dynamic_index {
public:
    semi_dynamic_index() = default;
    explicit semi_dynamic_index(document_list docs, semi_dynamic_options opts = {});
    semi_dynamic_index(static_index core, semi_dynamic_options opts);

    purge_signal delete_document(doc_id doc);
    /// Rebuilds from the alive documents; marks become all ones.
    void purge();

    occurrence_list query(std::span<const symbol> pattern) const;
    template <class F>
    void for_each_occurrence(std::span<const symbol> pattern, F&& f) const;
    /// Throws std::logic_error when counting was not enabled.
    std::uint64_t count(std::span<const symbol> pattern) const;

    bool contains(doc_id doc) const;
    std::uint64_t document_size(doc_id doc) const { return core_.document_length(doc) + 1; }
    std::uint64_t total_symbols() const { return core_.size(); }
    std::uint64_t deleted_symbols() const { return deleted_; }
    std::uint64_t alive_symbols() const { return core_.size() - deleted_; }
    std::uint64_t alive_documents() const { return alive_count_; }
    std::vector<doc_id> alive_ids() const;
    /// Alive documents with their text, in docId order.
    document_list alive_pairs() const;
    bool empty() const { return alive_count_ == 0; }

    const static_index& core() const { return core_; }
    const semi_dynamic_options& options() const { return opts_; }
    const compact_report_bit_vector& marks() const { return marks_; }

    /// Suffix ranks cleared so far (each one mark update).
    std::uint64_t mark_operations() const { return mark_ops_; }
    /// Symbols fed to static construction, construction and purges included.
    std::uint64_t build_symbols() const { return build_symbols_; }

    /// Core snapshot followed by the ids deleted since the last rebuild.
    void save(std::ostream& out) const;
    static semi_dynamic_index load(std::istream& in, semi_dynamic_options opts);

    size_report space() const;
    /// Bits spent on deleted documents' share of the core plus the mark vectors.
    std::uint64_t deletion_overhead_bits() const;

private:
    void reset_marks();
    std::uint64_t index_of_alive(doc_id doc) const;

    static_index core_;
    semi_dynamic_options opts_;
    compact_report_bit_vector marks_;
    std::vector<bool> alive_;  // per document, in core order
    std::uint64_t alive_count_ = 0;
    std::uint64_t deleted_ = 0;
    std::uint64_t mark_ops_ = 0;
    std::uint64_t build_symbols_ = 0;
};

template <class F>
void semi_dynamic_index::for_each_occurrence(std::span<const symbol> pattern, F&& f) const {
    if (alive_count_ == 0 || pattern.empty()) return;
    const auto r = core_.range_find(pattern);
    if (r.empty()) return;
    if (deleted_ == 0) {
        for (auto i = r.begin; i < r.end; ++i) f(core_.locate_occurrence(i));
        return;
    }
    marks_.for_each_one(r.begin, r.end - 1, [&](std::size_t i) { f(core_.locate_occurrence(i)); });
}

}  // namespace dyndex
