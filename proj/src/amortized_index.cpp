#include "dyndex/amortized_index.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dyndex/binary_io.hpp"
#include "dyndex/routing.hpp"

namespace dyndex {

namespace {

constexpr char magic[4] = {'D', 'D', 'A', '1'};
// Global rebuilds on growth start once the collection passes this size.
constexpr std::uint64_t min_rebuild_base = 32;

void check_text(const std::vector<symbol>& text) {
    if (text.empty()) throw std::invalid_argument("empty document");
    if (std::find(text.begin(), text.end(), terminator) != text.end())
        throw std::invalid_argument("document contains the reserved symbol 0");
}

}  // namespace

amortized_index::amortized_index(amortized_options opts)
    : opts_(opts), c0_(opts.seed) {
    layout_ = level_layout::amortized(0, opts_.epsilon, opts_.mode);
    tau_ = opts_.tau ? opts_.tau : default_tau(0);
    levels_.resize(layout_.caps.size());
}

semi_dynamic_options amortized_index::level_options() const {
    semi_dynamic_options o;
    o.tau = tau_;
    o.counting = opts_.counting;
    o.auto_purge = true;
    o.sample_rate = opts_.sample_rate;
    return o;
}

std::uint64_t amortized_index::level_size(std::size_t j) const {
    if (j == 0) return c0_.total_symbols();
    return levels_[j] ? levels_[j]->alive_symbols() : 0;
}

document_list amortized_index::drain(std::size_t upto) {
    document_list docs;
    for (const auto id : c0_.document_ids()) docs.emplace_back(id, c0_.document_text(id));
    c0_ = suffix_tree(opts_.seed + ++reseed_);
    for (std::size_t j = 1; j <= upto && j < levels_.size(); ++j) {
        if (!levels_[j]) continue;
        auto part = levels_[j]->alive_pairs();
        docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        levels_[j].reset();
    }
    return docs;
}

void amortized_index::place(std::size_t j, document_list docs) {
    if (docs.empty()) return;
    for (const auto& [id, text] : docs) where_[id] = {j, text.size() + 1};
    levels_[j].emplace(std::move(docs), level_options());
    build_symbols_ += levels_[j]->total_symbols();
}

void amortized_index::global_rebuild(std::optional<document> extra) {
    auto docs = drain(levels_.size() - 1);
    if (extra) docs.push_back(std::move(*extra));
    n_at_rebuild_ = n_;
    tau_ = opts_.tau ? opts_.tau : default_tau(n_);
    layout_ = level_layout::amortized(n_, opts_.epsilon, opts_.mode);
    levels_.clear();
    levels_.resize(layout_.caps.size());
    ++global_rebuilds_;
    if (n_ <= layout_.caps[0]) {
        for (auto& [id, text] : docs) {
            c0_.insert(id, text);
            where_[id] = {0, text.size() + 1};
        }
        return;
    }
    place(layout_.r(), std::move(docs));
}

void amortized_index::insert(doc_id id, std::vector<symbol> text) {
    if (where_.count(id)) throw std::invalid_argument("duplicate document " + std::to_string(id));
    check_text(text);
    const std::uint64_t size = text.size() + 1;
    inserted_ += size;
    n_ += size;

    if (n_ >= 2 * std::max(n_at_rebuild_, min_rebuild_base)) {
        global_rebuild(document{id, std::move(text)});
        return;
    }
    std::vector<std::uint64_t> sizes(levels_.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) sizes[j] = level_size(j);
    if (const auto j = first_fitting_level(sizes, layout_.caps, size)) {
        if (*j == 0) {
            c0_.insert(id, text);
            where_[id] = {0, size};
        } else {
            auto docs = drain(*j);
            docs.emplace_back(id, std::move(text));
            place(*j, std::move(docs));
        }
        return;
    }
    global_rebuild(document{id, std::move(text)});
}

void amortized_index::erase(doc_id id) {
    auto it = where_.find(id);
    if (it == where_.end()) throw std::out_of_range("unknown document " + std::to_string(id));
    const auto [j, size] = it->second;
    where_.erase(it);
    n_ -= size;
    if (j == 0) {
        c0_.erase(id);
    } else {
        auto& level = *levels_[j];
        if (level.delete_document(id) == purge_signal::rebuilt) build_symbols_ += level.total_symbols();
        if (level.empty()) levels_[j].reset();
    }
    if (n_at_rebuild_ >= 2 * min_rebuild_base && n_ <= n_at_rebuild_ / 2) global_rebuild(std::nullopt);
}

occurrence_list amortized_index::query(std::span<const symbol> pattern) const {
    occurrence_list out = c0_.query(pattern);
    for (const auto& level : levels_)
        if (level) level->for_each_occurrence(pattern, [&](const occurrence& o) { out.push_back(o); });
    return out;
}

std::uint64_t amortized_index::count(std::span<const symbol> pattern) const {
    std::uint64_t total = c0_.count(pattern);
    for (const auto& level : levels_)
        if (level) total += level->count(pattern);
    return total;
}

amortized_stats amortized_index::stats() const {
    amortized_stats s;
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        level_stats l;
        l.cap = layout_.caps[j];
        if (j == 0) {
            l.alive_symbols = c0_.total_symbols();
            l.documents = c0_.document_count();
        } else if (levels_[j]) {
            l.alive_symbols = levels_[j]->alive_symbols();
            l.deleted_symbols = levels_[j]->deleted_symbols();
            l.documents = levels_[j]->alive_documents();
        }
        s.levels.push_back(l);
    }
    s.alive_symbols = n_;
    s.documents = where_.size();
    s.inserted_symbols = inserted_;
    s.build_symbols = build_symbols_;
    s.global_rebuilds = global_rebuilds_;
    s.n_at_rebuild = n_at_rebuild_;
    s.tau = tau_;
    return s;
}

document_list amortized_index::documents() const {
    document_list docs;
    for (const auto id : c0_.document_ids()) docs.emplace_back(id, c0_.document_text(id));
    for (const auto& level : levels_) {
        if (!level) continue;
        auto part = level->alive_pairs();
        docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    std::sort(docs.begin(), docs.end());
    return docs;
}

std::uint64_t amortized_index::deletion_overhead_bits() const {
    std::uint64_t bits = 0;
    for (const auto& level : levels_)
        if (level) bits += level->deletion_overhead_bits();
    return bits;
}

std::string amortized_index::validate() const {
    std::uint64_t total = 0, docs = 0;
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        const std::uint64_t size = level_size(j);
        if (size > layout_.caps[j])
            return "level " + std::to_string(j) + " holds " + std::to_string(size) + " symbols, cap " +
                   std::to_string(layout_.caps[j]);
        total += size;
        docs += j == 0 ? c0_.document_count() : (levels_[j] ? levels_[j]->alive_documents() : 0);
        if (j > 0 && levels_[j] && levels_[j]->deleted_symbols() * tau_ > levels_[j]->total_symbols())
            return "level " + std::to_string(j) + " exceeds its deleted-symbol budget";
    }
    if (total != n_) return "level sizes do not add up to the alive symbol count";
    if (docs != where_.size()) return "registry size differs from stored documents";
    for (const auto& [id, loc] : where_) {
        const bool held = loc.level == 0 ? c0_.contains(id) : (levels_[loc.level] && levels_[loc.level]->contains(id));
        if (!held) return "document " + std::to_string(id) + " missing from level " + std::to_string(loc.level);
    }
    return {};
}

void amortized_index::save(std::ostream& out) const {
    out.write(magic, sizeof magic);
    io::put<double>(out, opts_.epsilon);
    io::put<std::uint32_t>(out, opts_.tau);
    io::put<std::uint8_t>(out, opts_.mode == level_mode::loglog_levels ? 1 : 0);
    io::put<std::uint8_t>(out, opts_.counting ? 1 : 0);
    io::put<std::uint64_t>(out, opts_.sample_rate);
    io::put<std::uint64_t>(out, opts_.seed);
    io::put<std::uint32_t>(out, tau_);
    io::put<std::uint64_t>(out, n_at_rebuild_);
    io::put<std::uint64_t>(out, inserted_);
    io::put<std::uint64_t>(out, build_symbols_);
    io::put<std::uint64_t>(out, global_rebuilds_);
    document_list c0;
    for (const auto id : c0_.document_ids()) c0.emplace_back(id, c0_.document_text(id));
    save_documents(out, c0);
    io::put<std::uint64_t>(out, levels_.size());
    for (std::size_t j = 1; j < levels_.size(); ++j) {
        io::put<std::uint8_t>(out, levels_[j] ? 1 : 0);
        if (levels_[j]) levels_[j]->save(out);
    }
}

amortized_index amortized_index::load(std::istream& in) {
    char head[4];
    if (!in.read(head, sizeof head) || std::memcmp(head, magic, sizeof magic) != 0)
        throw io::format_error("not an amortized index snapshot");
    amortized_options o;
    o.epsilon = io::get<double>(in);
    o.tau = io::get<std::uint32_t>(in);
    o.mode = io::get<std::uint8_t>(in) ? level_mode::loglog_levels : level_mode::constant_levels;
    o.counting = io::get<std::uint8_t>(in) != 0;
    o.sample_rate = io::get<std::uint64_t>(in);
    o.seed = io::get<std::uint64_t>(in);
    amortized_index idx(o);
    idx.tau_ = io::get<std::uint32_t>(in);
    idx.n_at_rebuild_ = io::get<std::uint64_t>(in);
    idx.inserted_ = io::get<std::uint64_t>(in);
    idx.build_symbols_ = io::get<std::uint64_t>(in);
    idx.global_rebuilds_ = io::get<std::uint64_t>(in);
    if (idx.tau_ < 1) throw io::format_error("invalid tau in snapshot");
    idx.layout_ = level_layout::amortized(idx.n_at_rebuild_, o.epsilon, o.mode);
    for (auto& [id, text] : load_documents(in)) {
        idx.c0_.insert(id, text);
        idx.where_[id] = {0, text.size() + 1};
        idx.n_ += text.size() + 1;
    }
    const auto count = io::get<std::uint64_t>(in);
    if (count != idx.layout_.caps.size()) throw io::format_error("level count does not match the layout");
    idx.levels_.assign(count, std::nullopt);
    for (std::size_t j = 1; j < count; ++j) {
        if (!io::get<std::uint8_t>(in)) continue;
        idx.levels_[j] = semi_dynamic_index::load(in, idx.level_options());
        for (const auto id : idx.levels_[j]->alive_ids()) {
            const auto size = idx.levels_[j]->document_size(id);
            if (!idx.where_.emplace(id, location{j, size}).second)
                throw io::format_error("document stored twice in snapshot");
            idx.n_ += size;
        }
    }
    return idx;
}

}  // namespace dyndex
