#include "dyndex/static_index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dyndex/binary_io.hpp"
#include "dyndex/suffix_sort.hpp"

namespace dyndex {

namespace {

constexpr char magic[4] = {'D', 'I', 'X', '1'};
constexpr std::uint32_t format_version = 2;

std::uint64_t default_sample_rate(std::uint64_t n) {
    return n <= 2 ? 1 : static_cast<std::uint64_t>(std::bit_width(n - 1));
}

}  // namespace

static_index static_index::build(document_list docs, std::uint64_t sample_rate) {
    std::sort(docs.begin(), docs.end(), [](const document& a, const document& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < docs.size(); ++k) {
        if (k > 0 && docs[k].first == docs[k - 1].first)
            throw std::invalid_argument("static_index: duplicate document id " + std::to_string(docs[k].first));
        if (docs[k].second.empty())
            throw std::invalid_argument("static_index: document " + std::to_string(docs[k].first) + " is empty");
        if (std::find(docs[k].second.begin(), docs[k].second.end(), terminator) != docs[k].second.end())
            throw std::invalid_argument("static_index: document " + std::to_string(docs[k].first) +
                                        " contains the reserved symbol 0");
    }

    static_index idx;
    std::vector<symbol> text;
    std::vector<std::uint64_t> ids, starts;
    for (const auto& [id, syms] : docs) {
        ids.push_back(id);
        starts.push_back(text.size());
        text.insert(text.end(), syms.begin(), syms.end());
        text.push_back(terminator);
    }
    idx.n_ = text.size();
    starts.push_back(idx.n_);
    idx.doc_ids_ = packed_vector(ids);
    idx.doc_start_ = packed_vector(starts);
    idx.sample_rate_ = sample_rate == 0 ? default_sample_rate(idx.n_) : sample_rate;
    if (idx.n_ == 0) return idx;

    const auto sa = build_suffix_array(text);
    const std::uint64_t n = idx.n_, s = idx.sample_rate_;

    std::vector<symbol> bwt(n);
    std::vector<bool> sampled(n);
    std::vector<std::uint64_t> sa_samples, inv_samples((n + s - 1) / s), start_doc;
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t p = sa[i];
        bwt[i] = p == 0 ? text[n - 1] : text[p - 1];
        if (bwt[i] == terminator) {
            start_doc.push_back(idx.document_at(p));
        }
        if (p % s == 0) {
            sampled[i] = true;
            sa_samples.push_back(p / s);
            inv_samples[p / s] = i;
        }
    }

    {
        std::vector<symbol> sorted = text;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            idx.counts_.emplace_back(sorted[i], i);
            i = j;
        }
    }

    idx.bwt_ = wavelet_tree(bwt);
    idx.sampled_ = bit_array(sampled);
    idx.sa_samples_ = packed_vector(sa_samples);
    idx.inv_samples_ = packed_vector(inv_samples);
    idx.start_doc_ = packed_vector(start_doc);
    return idx;
}

std::uint64_t static_index::count_below(symbol c) const {
    auto it = std::lower_bound(counts_.begin(), counts_.end(), c,
                               [](const auto& e, symbol x) { return e.first < x; });
    return it == counts_.end() ? n_ : it->second;
}

std::uint64_t static_index::lf(std::uint64_t i) const {
    const auto [c, r] = bwt_.inverse_select(i);
    if (c == terminator) {
        const std::uint64_t d = start_doc_[r];
        return d == 0 ? doc_ids_.size() - 1 : d - 1;
    }
    return count_below(c) + r;
}

sa_range static_index::range_find(std::span<const symbol> pattern) const {
    sa_range r{0, n_, 0};
    for (std::size_t k = pattern.size(); k-- > 0;) {
        const symbol c = pattern[k];
        ++r.steps;
        if (c == terminator) {
            r.begin = r.end = 0;
            continue;
        }
        const std::uint64_t base = count_below(c);
        r.begin = base + bwt_.rank(c, r.begin);
        r.end = base + bwt_.rank(c, r.end);
    }
    if (r.empty()) r.begin = r.end = 0;
    return r;
}

std::uint64_t static_index::locate(std::uint64_t i) const {
    if (i >= n_) throw std::out_of_range("static_index::locate: rank out of range");
    std::uint64_t steps = 0;
    while (true) {
        if (sampled_[i]) return sa_samples_[sampled_.rank1(i)] * sample_rate_ + steps;
        const auto [c, r] = bwt_.inverse_select(i);
        if (c == terminator) return doc_start_[start_doc_[r]] + steps;
        i = count_below(c) + r;
        ++steps;
    }
}

occurrence static_index::text_to_document(std::uint64_t pos) const {
    if (pos >= n_) throw std::out_of_range("static_index: text position out of range");
    const auto k = document_at(pos);
    return {doc_ids_[k], pos - doc_start_[k]};
}

occurrence static_index::locate_occurrence(std::uint64_t i) const {
    return text_to_document(locate(i));
}

std::uint64_t static_index::rank_of_position(std::uint64_t pos) const {
    const auto k = document_at(pos);
    const std::uint64_t term = doc_start_[k + 1] - 1;
    const std::uint64_t q = (pos + sample_rate_ - 1) / sample_rate_ * sample_rate_;
    std::uint64_t i, steps;
    if (q <= term) {
        i = inv_samples_[q / sample_rate_];
        steps = q - pos;
    } else {
        i = k;
        steps = term - pos;
    }
    for (; steps > 0; --steps) i = lf(i);
    return i;
}

std::vector<symbol> static_index::extract(std::uint64_t p, std::uint64_t len) const {
    if (p > n_ || len > n_ - p) throw std::out_of_range("static_index::extract: range out of bounds");
    std::vector<symbol> out(len);
    if (len == 0) return out;
    std::uint64_t i = rank_of_position(p + len - 1);
    for (std::uint64_t k = len; k-- > 0;) {
        // First symbol of the suffix with rank i: last count entry not above i.
        auto it = std::upper_bound(counts_.begin(), counts_.end(), i,
                                   [](std::uint64_t x, const auto& e) { return x < e.second; });
        out[k] = std::prev(it)->first;
        if (k > 0) i = lf(i);
    }
    return out;
}

std::uint64_t static_index::document_at(std::uint64_t pos) const {
    // Last document starting at or before pos.
    std::uint64_t lo = 0, hi = doc_ids_.size();
    while (hi - lo > 1) {
        const auto mid = (lo + hi) / 2;
        if (doc_start_[mid] <= pos)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::optional<std::uint64_t> static_index::find_document(doc_id doc) const {
    std::uint64_t lo = 0, hi = doc_ids_.size();
    while (lo < hi) {
        const auto mid = (lo + hi) / 2;
        if (doc_ids_[mid] < doc)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < doc_ids_.size() && doc_ids_[lo] == doc) return lo;
    return std::nullopt;
}

std::vector<doc_id> static_index::document_ids() const {
    std::vector<doc_id> ids(doc_ids_.size());
    for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = doc_ids_[k];
    return ids;
}

std::uint64_t static_index::index_of(doc_id doc) const {
    const auto k = find_document(doc);
    if (!k) throw std::out_of_range("static_index: unknown document " + std::to_string(doc));
    return *k;
}

bool static_index::contains(doc_id doc) const {
    return find_document(doc).has_value();
}

std::uint64_t static_index::document_length(doc_id doc) const {
    const auto k = index_of(doc);
    return doc_start_[k + 1] - doc_start_[k] - 1;
}

std::uint64_t static_index::suffix_rank(doc_id doc, std::uint64_t offset) const {
    const auto k = index_of(doc);
    if (offset > doc_start_[k + 1] - doc_start_[k] - 1)
        throw std::out_of_range("static_index::suffix_rank: offset beyond document end");
    return rank_of_position(doc_start_[k] + offset);
}

std::vector<std::uint64_t> static_index::document_suffix_ranks(doc_id doc) const {
    const auto k = index_of(doc);
    const std::uint64_t len = doc_start_[k + 1] - doc_start_[k] - 1;
    std::vector<std::uint64_t> ranks;
    ranks.reserve(len + 1);
    std::uint64_t i = k;
    ranks.push_back(i);
    for (std::uint64_t t = 0; t < len; ++t) {
        i = lf(i);
        ranks.push_back(i);
    }
    return ranks;
}

std::vector<symbol> static_index::extract_document(std::uint64_t k) const {
    const std::uint64_t len = doc_start_[k + 1] - doc_start_[k] - 1;
    std::vector<symbol> out(len);
    std::uint64_t i = k;
    for (std::uint64_t t = len; t-- > 0;) {
        const auto [c, r] = bwt_.inverse_select(i);
        out[t] = c;
        i = count_below(c) + r;
    }
    return out;
}

std::vector<symbol> static_index::document_text(doc_id doc) const {
    return extract_document(index_of(doc));
}

document_list static_index::to_pairs() const {
    document_list docs;
    docs.reserve(doc_ids_.size());
    for (std::uint64_t k = 0; k < doc_ids_.size(); ++k) docs.emplace_back(doc_ids_[k], extract_document(k));
    return docs;
}

size_report static_index::space() const {
    size_report r;
    r.payload_bits = bwt_.size_in_bits() + 96 * counts_.size() + sampled_.size_in_bits() +
                     sa_samples_.size_in_bits() + inv_samples_.size_in_bits() + start_doc_.size_in_bits() +
                     doc_ids_.size_in_bits() + doc_start_.size_in_bits();
    r.total_bits = r.payload_bits;
    return r;
}

void static_index::save(std::ostream& out) const {
    out.write(magic, sizeof magic);
    io::put<std::uint32_t>(out, format_version);
    io::put<std::uint64_t>(out, n_);
    io::put<std::uint64_t>(out, sample_rate_);
    bwt_.save(out);
    std::vector<symbol> syms;
    std::vector<std::uint64_t> cums;
    for (const auto& [c, cum] : counts_) {
        syms.push_back(c);
        cums.push_back(cum);
    }
    io::put_vector(out, syms);
    io::put_vector(out, cums);
    io::put_bits(out, sampled_);
    sa_samples_.save(out);
    inv_samples_.save(out);
    start_doc_.save(out);
    doc_ids_.save(out);
    doc_start_.save(out);
}

static_index static_index::load(std::istream& in) {
    char head[4];
    if (!in.read(head, sizeof head) || std::memcmp(head, magic, sizeof magic) != 0)
        throw io::format_error("not an index snapshot (bad magic)");
    if (io::get<std::uint32_t>(in) != format_version) throw io::format_error("unsupported snapshot version");
    static_index idx;
    idx.n_ = io::get<std::uint64_t>(in);
    idx.sample_rate_ = io::get<std::uint64_t>(in);
    idx.bwt_ = wavelet_tree::load(in);
    const auto syms = io::get_vector<symbol>(in);
    const auto cums = io::get_vector<std::uint64_t>(in);
    if (syms.size() != cums.size()) throw io::format_error("count table mismatch");
    for (std::size_t k = 0; k < syms.size(); ++k) idx.counts_.emplace_back(syms[k], cums[k]);
    idx.sampled_ = io::get_bits(in);
    idx.sa_samples_ = packed_vector::load(in);
    idx.inv_samples_ = packed_vector::load(in);
    idx.start_doc_ = packed_vector::load(in);
    idx.doc_ids_ = packed_vector::load(in);
    idx.doc_start_ = packed_vector::load(in);
    if (idx.sample_rate_ == 0 || idx.bwt_.size() != idx.n_ || idx.sampled_.size() != idx.n_ ||
        idx.doc_start_.size() != idx.doc_ids_.size() + 1 || idx.doc_start_[idx.doc_ids_.size()] != idx.n_ ||
        idx.start_doc_.size() != idx.doc_ids_.size())
        throw io::format_error("inconsistent index snapshot");
    return idx;
}

void save_documents(std::ostream& out, const document_list& docs) {
    io::put<std::uint64_t>(out, docs.size());
    for (const auto& [id, text] : docs) {
        io::put<doc_id>(out, id);
        io::put_vector(out, text);
    }
}

document_list load_documents(std::istream& in) {
    const auto count = io::get<std::uint64_t>(in);
    if (count > (std::uint64_t{1} << 40)) throw io::format_error("implausible document count");
    document_list docs;
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto id = io::get<doc_id>(in);
        docs.emplace_back(id, io::get_vector<symbol>(in));
    }
    return docs;
}

}  // namespace dyndex
