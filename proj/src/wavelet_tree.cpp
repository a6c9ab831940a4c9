#include "dyndex/wavelet_tree.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "dyndex/binary_io.hpp"

namespace dyndex {

wavelet_tree::wavelet_tree(const std::vector<symbol>& seq) : size_(seq.size()) {
    if (seq.empty()) return;
    std::map<symbol, std::size_t> freq;
    for (symbol c : seq) ++freq[c];
    std::vector<std::uint64_t> syms, counts;
    for (const auto& [c, f] : freq) {
        syms.push_back(c);
        counts.push_back(f);
    }
    const auto leaves = static_cast<std::int64_t>(syms.size());
    syms_ = packed_vector(syms);
    counts_ = packed_vector(counts);
    if (leaves == 1) {
        lengths_ = packed_vector(std::vector<std::uint64_t>{0});
        paths_ = packed_vector(std::vector<std::uint64_t>{0});
        return;
    }

    // Huffman merge over a scratch forest: ids below leaves are symbols.
    // Ties go to the lower creation index so the shape is deterministic.
    std::vector<std::array<std::int64_t, 2>> kids;
    std::vector<std::int64_t> parent(syms.size(), -1);
    std::vector<std::uint64_t> length(counts);
    using item = std::tuple<std::uint64_t, std::int64_t>;
    std::priority_queue<item, std::vector<item>, std::greater<>> heap;
    for (std::int64_t i = 0; i < leaves; ++i) heap.emplace(length[i], i);
    while (heap.size() > 1) {
        const auto [fa, a] = heap.top();
        heap.pop();
        const auto [fb, b] = heap.top();
        heap.pop();
        const auto id = static_cast<std::int64_t>(parent.size());
        kids.push_back({a, b});
        parent.push_back(-1);
        length.push_back(fa + fb);
        parent[a] = parent[b] = id;
        heap.emplace(fa + fb, id);
    }
    const auto root = static_cast<std::int64_t>(parent.size() - 1);

    std::vector<std::uint64_t> lengths(syms.size()), paths(syms.size());
    for (std::int64_t i = 0; i < leaves; ++i) {
        std::uint64_t depth = 0, path = 0;
        for (auto u = i; parent[u] >= 0; u = parent[u], ++depth) {
            if (depth == 64) throw std::length_error("wavelet_tree: code longer than 64 bits");
            path = (path << 1) | (kids[parent[u] - leaves][1] == u ? 1u : 0u);
        }
        lengths[i] = depth;
        paths[i] = path;
    }

    // Number internal nodes breadth-first from the root and lay their bits out in that order.
    std::vector<std::int64_t> order{root};
    std::vector<std::uint64_t> index(parent.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        index[order[k]] = k;
        for (const auto c : kids[order[k] - leaves])
            if (c >= leaves) order.push_back(c);
    }
    std::vector<std::uint64_t> offsets(order.size()), left(order.size()), right(order.size());
    std::uint64_t offset = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& ch = kids[order[k] - leaves];
        offsets[k] = offset;
        offset += length[order[k]];
        const auto code = [&](std::int64_t c) { return c >= leaves ? 2 * index[c] : 2 * static_cast<std::uint64_t>(c) + 1; };
        left[k] = code(ch[0]);
        right[k] = code(ch[1]);
    }
    lengths_ = packed_vector(lengths);
    paths_ = packed_vector(paths);
    offsets_ = packed_vector(offsets);
    left_ = packed_vector(left);
    right_ = packed_vector(right);

    std::vector<std::uint64_t> words((offset + 63) / 64);
    std::vector<std::uint64_t> cursor(offsets);
    for (symbol c : seq) {
        const auto j = *find(c);
        const auto path = paths[j];
        std::int64_t v = 0;
        for (std::uint64_t d = 0; d < lengths[j]; ++d) {
            const bool b = (path >> d) & 1u;
            const auto pos = cursor[v]++;
            if (b) words[pos >> 6] |= std::uint64_t{1} << (pos & 63);
            v = child(v, b);
        }
    }
    bits_ = bit_array(std::move(words), offset);
}

std::optional<std::size_t> wavelet_tree::find(symbol c) const {
    std::size_t lo = 0, hi = syms_.size();
    while (lo < hi) {
        const auto mid = (lo + hi) / 2;
        if (syms_[mid] < c)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < syms_.size() && syms_[lo] == c) return lo;
    return std::nullopt;
}

std::int64_t wavelet_tree::child(std::int64_t v, bool b) const {
    const auto x = b ? right_[v] : left_[v];
    return (x & 1) ? ~static_cast<std::int64_t>(x >> 1) : static_cast<std::int64_t>(x >> 1);
}

std::size_t wavelet_tree::node_rank(std::int64_t v, bool b, std::size_t i) const {
    const auto o = offsets_[v];
    const auto ones = bits_.rank1(o + i) - bits_.rank1(o);
    return b ? ones : i - ones;
}

std::size_t wavelet_tree::node_select(std::int64_t v, bool b, std::size_t k) const {
    const auto o = offsets_[v];
    return bits_.select(b, bits_.rank(b, o) + k) - o;
}

symbol wavelet_tree::access(std::size_t i) const {
    return inverse_select(i).first;
}

std::pair<symbol, std::size_t> wavelet_tree::inverse_select(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("wavelet_tree: position out of range");
    if (offsets_.size() == 0) return {static_cast<symbol>(syms_[0]), i};
    std::int64_t v = 0;
    while (v >= 0) {
        const bool b = bits_[offsets_[v] + i];
        i = node_rank(v, b, i);
        v = child(v, b);
    }
    return {static_cast<symbol>(syms_[~v]), i};
}

std::size_t wavelet_tree::rank(symbol c, std::size_t i) const {
    const auto j = find(c);
    if (!j || i == 0) return 0;
    i = std::min(i, size_);
    const auto len = lengths_[*j], path = paths_[*j];
    std::int64_t v = 0;
    for (std::uint64_t d = 0; d < len && i > 0; ++d) {
        const bool b = (path >> d) & 1u;
        i = node_rank(v, b, i);
        v = child(v, b);
    }
    return i;
}

std::size_t wavelet_tree::select(symbol c, std::size_t k) const {
    const auto j = find(c);
    if (!j || k >= counts_[*j]) throw std::out_of_range("wavelet_tree: select beyond count");
    const auto len = lengths_[*j], path = paths_[*j];
    std::array<std::int64_t, 64> nodes;
    std::int64_t v = 0;
    for (std::uint64_t d = 0; d < len; ++d) {
        nodes[d] = v;
        v = child(v, (path >> d) & 1u);
    }
    for (auto d = len; d-- > 0;) k = node_select(nodes[d], (path >> d) & 1u, k);
    return k;
}

std::size_t wavelet_tree::count(symbol c) const {
    const auto j = find(c);
    return j ? counts_[*j] : 0;
}

std::uint64_t wavelet_tree::size_in_bits() const {
    return 64 + bits_.size_in_bits() + syms_.size_in_bits() + lengths_.size_in_bits() + paths_.size_in_bits() +
           counts_.size_in_bits() + offsets_.size_in_bits() + left_.size_in_bits() + right_.size_in_bits();
}

void wavelet_tree::save(std::ostream& out) const {
    io::put<std::uint64_t>(out, size_);
    for (const auto* p : {&syms_, &lengths_, &paths_, &counts_, &offsets_, &left_, &right_}) p->save(out);
    io::put_bits(out, bits_);
}

wavelet_tree wavelet_tree::load(std::istream& in) {
    wavelet_tree wt;
    wt.size_ = io::get<std::uint64_t>(in);
    for (auto* p : {&wt.syms_, &wt.lengths_, &wt.paths_, &wt.counts_, &wt.offsets_, &wt.left_, &wt.right_})
        *p = packed_vector::load(in);
    wt.bits_ = io::get_bits(in);
    const auto symbols = wt.syms_.size(), nodes = wt.offsets_.size();
    if (wt.lengths_.size() != symbols || wt.paths_.size() != symbols || wt.counts_.size() != symbols ||
        wt.left_.size() != nodes || wt.right_.size() != nodes || (symbols > 0 && nodes + 1 != symbols))
        throw io::format_error("wavelet tree tables disagree in size");
    for (std::size_t j = 0; j < symbols; ++j)
        if (wt.lengths_[j] > 64) throw io::format_error("wavelet tree code too long");
    for (std::size_t v = 0; v < nodes; ++v) {
        if (wt.offsets_[v] > wt.bits_.size()) throw io::format_error("wavelet tree node offset out of range");
        for (const auto x : {wt.left_[v], wt.right_[v]})
            if ((x & 1) ? (x >> 1) >= symbols : (x >> 1) >= nodes)
                throw io::format_error("wavelet tree node link out of range");
    }
    return wt;
}

}  // namespace dyndex
