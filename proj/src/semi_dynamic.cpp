#include "dyndex/semi_dynamic.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dyndex/binary_io.hpp"

namespace dyndex {

semi_dynamic_index::semi_dynamic_index(document_list docs, semi_dynamic_options opts)
    : semi_dynamic_index(static_index::build(std::move(docs), opts.sample_rate), opts) {}

semi_dynamic_index::semi_dynamic_index(static_index core, semi_dynamic_options opts)
    : core_(std::move(core)), opts_(opts) {
    if (opts_.tau < 1) throw std::invalid_argument("semi_dynamic_index: tau must be positive");
    build_symbols_ = core_.size();
    reset_marks();
}

void semi_dynamic_index::reset_marks() {
    const std::uint64_t n = core_.size();
    const unsigned block = std::clamp(opts_.tau, 2u, 64u);
    const std::uint64_t budget = opts_.auto_purge ? n / opts_.tau : n;
    marks_ = compact_report_bit_vector(n, block, budget);
    alive_.assign(core_.document_count(), true);
    alive_count_ = core_.document_count();
    deleted_ = 0;
}

std::uint64_t semi_dynamic_index::index_of_alive(doc_id doc) const {
    const auto k = core_.find_document(doc);
    if (!k || !alive_[*k])
        throw std::out_of_range("semi_dynamic_index: document " + std::to_string(doc) + " is not alive here");
    return *k;
}

bool semi_dynamic_index::contains(doc_id doc) const {
    const auto k = core_.find_document(doc);
    return k && alive_[*k];
}

purge_signal semi_dynamic_index::delete_document(doc_id doc) {
    const auto k = index_of_alive(doc);
    const std::uint64_t size = document_size(doc);
    // Strict comparison: deleted * tau > n, kept in integers.
    if (opts_.auto_purge && (deleted_ + size) * opts_.tau > core_.size()) {
        alive_[k] = false;
        --alive_count_;
        purge();
        return purge_signal::rebuilt;
    }
    for (const auto r : core_.document_suffix_ranks(doc)) {
        marks_.zero(r);
        ++mark_ops_;
    }
    alive_[k] = false;
    --alive_count_;
    deleted_ += size;
    return purge_signal::none;
}

void semi_dynamic_index::purge() {
    core_ = static_index::build(alive_pairs(), opts_.sample_rate);
    build_symbols_ += core_.size();
    reset_marks();
}

std::vector<doc_id> semi_dynamic_index::alive_ids() const {
    std::vector<doc_id> out;
    for (std::uint64_t k = 0; k < core_.document_count(); ++k)
        if (alive_[k]) out.push_back(core_.document_id(k));
    return out;
}

document_list semi_dynamic_index::alive_pairs() const {
    document_list out;
    for (const auto id : alive_ids()) out.emplace_back(id, core_.document_text(id));
    return out;
}

occurrence_list semi_dynamic_index::query(std::span<const symbol> pattern) const {
    occurrence_list out;
    for_each_occurrence(pattern, [&](const occurrence& o) { out.push_back(o); });
    return out;
}

std::uint64_t semi_dynamic_index::count(std::span<const symbol> pattern) const {
    if (!opts_.counting) throw std::logic_error("semi_dynamic_index: counting is not enabled");
    if (alive_count_ == 0 || pattern.empty()) return 0;
    const auto r = core_.range_find(pattern);
    if (r.empty()) return 0;
    return marks_.ones_in_range(r.begin, r.end - 1);
}

void semi_dynamic_index::save(std::ostream& out) const {
    core_.save(out);
    std::vector<doc_id> dead;
    for (std::uint64_t k = 0; k < core_.document_count(); ++k)
        if (!alive_[k]) dead.push_back(core_.document_id(k));
    io::put_vector(out, dead);
}

semi_dynamic_index semi_dynamic_index::load(std::istream& in, semi_dynamic_options opts) {
    semi_dynamic_index idx(static_index::load(in), opts);
    // Replaying the deletions cannot cross the purge threshold: the saved
    // state was below it and every prefix of the replay deletes less.
    for (const auto id : io::get_vector<doc_id>(in)) {
        if (!idx.contains(id)) throw io::format_error("snapshot deletes an unknown document");
        idx.delete_document(id);
    }
    return idx;
}

size_report semi_dynamic_index::space() const {
    const auto core = core_.space();
    const auto marks = marks_.space();
    size_report r;
    r.payload_bits = core.payload_bits + marks.payload_bits + alive_.size();
    r.summary_bits = core.summary_bits + marks.summary_bits;
    r.total_bits = r.payload_bits + r.summary_bits;
    return r;
}

std::uint64_t semi_dynamic_index::deletion_overhead_bits() const {
    if (core_.size() == 0) return 0;
    const auto core_bits = core_.space().total_bits;
    const std::uint64_t dead_share = core_bits * deleted_ / core_.size();
    return dead_share + marks_.space().total_bits;
}

}  // namespace dyndex
