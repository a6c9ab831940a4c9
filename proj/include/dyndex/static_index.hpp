#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dyndex/bit_array.hpp"
#include "dyndex/packed_vector.hpp"
#include "dyndex/types.hpp"
#include "dyndex/wavelet_tree.hpp"

namespace dyndex {

using document = std::pair<doc_id, std::vector<symbol>>;
using document_list = std::vector<document>;

/// Half-open suffix-array interval [begin, end) plus the number of
/// backward-search steps spent finding it.
struct sa_range {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
    std::uint64_t steps = 0;

    bool empty() const { return begin >= end; }
    std::uint64_t size() const { return empty() ? 0 : end - begin; }
};

/// Immutable FM-index over a collection of documents.
///
/// Documents are stored in increasing docId order, each followed by the
/// terminator 0. Text symbols must be in 1..2^32-1. The suffix of a
/// document's terminator has suffix-array rank equal to the document's
/// position in docId order.
class static_index {
public:
    static_index() = default;

    /// Throws std::invalid_argument on empty documents, terminator symbols
    /// inside a document, or duplicate ids. sample_rate 0 picks ceil(log2 n).
    static static_index build(document_list docs, std::uint64_t sample_rate = 0);

    /// Total text length including one terminator per document.
    std::uint64_t size() const { return n_; }
    std::uint64_t document_count() const { return doc_ids_.size(); }
    std::uint64_t sample_rate() const { return sample_rate_; }
    bool empty() const { return n_ == 0; }

    sa_range range_find(std::span<const symbol> pattern) const;
    /// Text position of the suffix with rank i.
    std::uint64_t locate(std::uint64_t i) const;
    occurrence locate_occurrence(std::uint64_t i) const;
    /// Text positions [p, p+len); may span documents and include terminators.
    std::vector<symbol> extract(std::uint64_t p, std::uint64_t len) const;
    /// Rank of the suffix starting at offset of doc; offset may equal the
    /// document length (its terminator).
    std::uint64_t suffix_rank(doc_id doc, std::uint64_t offset) const;
    /// Ranks of all suffixes of doc, offsets length, length-1, ..., 0.
    std::vector<std::uint64_t> document_suffix_ranks(doc_id doc) const;

    bool contains(doc_id doc) const;
    std::uint64_t document_length(doc_id doc) const;
    /// Document ids in increasing order.
    std::vector<doc_id> document_ids() const;
    doc_id document_id(std::uint64_t k) const { return doc_ids_[k]; }
    /// Position of doc among document_ids(), if present.
    std::optional<std::uint64_t> find_document(doc_id doc) const;
    occurrence text_to_document(std::uint64_t pos) const;
    std::vector<symbol> document_text(doc_id doc) const;
    /// All documents in docId order, without terminators.
    document_list to_pairs() const;

    size_report space() const;

    void save(std::ostream& out) const;
    static static_index load(std::istream& in);

private:
    std::uint64_t index_of(doc_id doc) const;
    /// Doc index whose text span contains pos.
    std::uint64_t document_at(std::uint64_t pos) const;
    std::uint64_t count_below(symbol c) const;
    /// Rank of the suffix one text position earlier (cyclic within the collection).
    std::uint64_t lf(std::uint64_t i) const;
    std::uint64_t rank_of_position(std::uint64_t pos) const;
    std::vector<symbol> extract_document(std::uint64_t k) const;

    wavelet_tree bwt_;
    std::vector<std::pair<symbol, std::uint64_t>> counts_;  // (symbol, #text symbols smaller), sorted
    bit_array sampled_;            // over SA ranks: suffix starts at a multiple of sample_rate_
    packed_vector sa_samples_;     // SA value / sample_rate_ at sampled ranks
    packed_vector inv_samples_;    // rank of text position k * sample_rate_
    packed_vector start_doc_;      // doc index for the k-th terminator in the BWT
    packed_vector doc_ids_;
    packed_vector doc_start_;  // text start per doc index, plus n at the end
    std::uint64_t n_ = 0;
    std::uint64_t sample_rate_ = 1;
};

void save_documents(std::ostream& out, const document_list& docs);
document_list load_documents(std::istream& in);

}  // namespace dyndex
