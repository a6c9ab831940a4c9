#include "dyndex/suffix_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace dyndex {

namespace {
constexpr std::int32_t root = 0;
}

suffix_tree::suffix_tree(std::uint64_t seed) : hash_{seed} {
    nodes_.emplace_back();
    nodes_[root].children = child_map(0, hash_);
}

std::int32_t suffix_tree::new_node() {
    ++node_ops_;
    if (!free_nodes_.empty()) {
        const auto v = free_nodes_.back();
        free_nodes_.pop_back();
        nodes_[v] = node{};
        nodes_[v].children = child_map(0, hash_);
        return v;
    }
    nodes_.emplace_back();
    nodes_.back().children = child_map(0, hash_);
    return static_cast<std::int32_t>(nodes_.size() - 1);
}

void suffix_tree::free_node(std::int32_t v) {
    ++node_ops_;
    if (nodes_[v].chunk >= 0) refs_[nodes_[v].chunk].erase(v);
    nodes_[v] = node{};
    free_nodes_.push_back(v);
}

void suffix_tree::set_label(std::int32_t v, std::int32_t chunk, std::uint32_t start, std::uint32_t len) {
    auto& n = nodes_[v];
    if (n.chunk != chunk) {
        if (n.chunk >= 0) refs_[n.chunk].erase(v);
        refs_[chunk].insert(v);
    }
    n.chunk = chunk;
    n.start = start;
    n.len = len;
}

std::int32_t suffix_tree::find_child(std::int32_t v, key k) const {
    ++node_ops_;
    const auto& ch = nodes_[v].children;
    auto it = ch.find(k);
    return it == ch.end() ? -1 : it->second;
}

// Splits the edge into `child` after `offset` symbols; returns the new inner node.
std::int32_t suffix_tree::split(std::int32_t child, std::uint32_t offset) {
    const std::int32_t x = new_node();
    const std::int32_t p = nodes_[child].parent;
    const std::int32_t chunk = nodes_[child].chunk;
    const std::uint32_t start = nodes_[child].start;
    nodes_[x].parent = p;
    nodes_[x].depth = nodes_[p].depth + offset;
    set_label(x, chunk, start, offset);
    nodes_[child].start = start + offset;
    nodes_[child].len -= offset;
    nodes_[child].parent = x;
    nodes_[p].children[edge_key(x)] = x;
    nodes_[x].children.emplace(edge_key(child), child);
    return x;
}

void suffix_tree::insert(doc_id id, std::span<const symbol> text) {
    if (slot_of_.count(id)) throw std::invalid_argument("suffix_tree: duplicate document " + std::to_string(id));
    if (text.empty()) throw std::invalid_argument("suffix_tree: empty document");
    if (std::find(text.begin(), text.end(), terminator) != text.end())
        throw std::invalid_argument("suffix_tree: document contains the reserved symbol 0");

    std::int32_t slot;
    if (!free_slots_.empty()) {
        slot = free_slots_.back();
        free_slots_.pop_back();
    } else {
        slot = static_cast<std::int32_t>(chunks_.size());
        chunks_.emplace_back();
        refs_.emplace_back();
        leaves_.emplace_back();
        slot_doc_.push_back(0);
    }
    auto& t = chunks_[slot];
    t.assign(text.begin(), text.end());
    t.push_back(terminal_flag | static_cast<key>(slot));
    slot_doc_[slot] = id;
    slot_of_[id] = slot;
    const auto m = static_cast<std::uint32_t>(t.size());
    leaves_[slot].assign(m, -1);

    std::int32_t head = root;
    for (std::uint32_t i = 0; i < m; ++i) {
        // Locate the node from which suffix i is scanned.
        std::int32_t w = root;
        if (head != root) {
            if (nodes_[head].link >= 0) {
                w = nodes_[head].link;
            } else {
                const std::int32_t u = nodes_[head].parent;
                const std::uint32_t target = nodes_[head].depth - 1;
                w = u == root ? root : nodes_[u].link;
                // Rescan: the path is known to exist, so only edge lengths are consulted.
                while (nodes_[w].depth < target) {
                    const std::int32_t c = find_child(w, t[i + nodes_[w].depth]);
                    if (nodes_[c].depth <= target) {
                        w = c;
                    } else {
                        w = split(c, target - nodes_[w].depth);
                    }
                }
                nodes_[head].link = w;
            }
        }
        // Scan: compare symbols until the suffix leaves the tree.
        while (true) {
            const std::uint32_t d = nodes_[w].depth;
            const std::int32_t c = find_child(w, t[i + d]);
            if (c < 0) break;
            const auto& cn = nodes_[c];
            const auto& label = chunks_[cn.chunk];
            std::uint32_t k = 1;
            while (k < cn.len && label[cn.start + k] == t[i + d + k]) {
                ++k;
                ++node_ops_;
            }
            if (k < cn.len) {
                w = split(c, k);
                break;
            }
            w = c;
        }
        const std::int32_t leaf = new_node();
        const std::uint32_t d = nodes_[w].depth;
        nodes_[leaf].parent = w;
        nodes_[leaf].depth = m - i;
        nodes_[leaf].leaf_slot = slot;
        nodes_[leaf].leaf_offset = i;
        set_label(leaf, slot, i + d, m - i - d);
        nodes_[w].children.emplace(t[i + d], leaf);
        leaves_[slot][i] = leaf;
        head = w;
    }
    total_symbols_ += m;
}

// v has exactly one child left; splice it out.
void suffix_tree::contract(std::int32_t v) {
    const std::int32_t c = nodes_[v].children.begin()->second;
    const std::int32_t p = nodes_[v].parent;
    const key k = edge_key(v);
    const std::uint32_t vlen = nodes_[v].len;
    nodes_[c].start -= vlen;
    nodes_[c].len += vlen;
    nodes_[c].parent = p;
    nodes_[p].children[k] = c;
    free_node(v);
}

void suffix_tree::relabel(std::int32_t v, std::int32_t dead_chunk) {
    if (nodes_[v].chunk != dead_chunk) return;
    const std::int32_t c = nodes_[v].children.begin()->second;
    relabel(c, dead_chunk);
    const auto& cn = nodes_[c];
    set_label(v, cn.chunk, cn.start - nodes_[v].len, nodes_[v].len);
    ++node_ops_;
}

void suffix_tree::erase(doc_id id) {
    auto it = slot_of_.find(id);
    if (it == slot_of_.end()) throw std::out_of_range("suffix_tree: unknown document " + std::to_string(id));
    const std::int32_t slot = it->second;

    // Longest suffix first keeps the remaining suffix set closed under taking
    // suffixes, so no surviving suffix link ever targets a contracted node.
    for (const std::int32_t leaf : leaves_[slot]) {
        const std::int32_t p = nodes_[leaf].parent;
        nodes_[p].children.erase(edge_key(leaf));
        free_node(leaf);
        if (p != root && nodes_[p].children.size() == 1) contract(p);
    }
    const std::vector<std::int32_t> stale(refs_[slot].begin(), refs_[slot].end());
    for (const std::int32_t v : stale) relabel(v, slot);

    total_symbols_ -= chunks_[slot].size();
    chunks_[slot].clear();
    chunks_[slot].shrink_to_fit();
    leaves_[slot].clear();
    leaves_[slot].shrink_to_fit();
    refs_[slot].clear();
    free_slots_.push_back(slot);
    slot_of_.erase(it);
}

occurrence_list suffix_tree::query(std::span<const symbol> pattern) const {
    occurrence_list out;
    if (pattern.empty()) return out;
    std::int32_t v = root;
    std::size_t d = 0;
    while (d < pattern.size()) {
        const std::int32_t c = find_child(v, pattern[d]);
        if (c < 0) return out;
        const auto& cn = nodes_[c];
        const auto& label = chunks_[cn.chunk];
        const std::size_t take = std::min<std::size_t>(cn.len, pattern.size() - d);
        for (std::size_t k = 1; k < take; ++k) {
            ++node_ops_;
            if (label[cn.start + k] != pattern[d + k]) return out;
        }
        d += take;
        v = c;
    }
    std::vector<std::int32_t> stack{v};
    while (!stack.empty()) {
        const std::int32_t u = stack.back();
        stack.pop_back();
        ++node_ops_;
        if (nodes_[u].leaf_slot >= 0) {
            out.push_back({slot_doc_[nodes_[u].leaf_slot], nodes_[u].leaf_offset});
            continue;
        }
        for (const auto& [k, c] : nodes_[u].children) stack.push_back(c);
    }
    return out;
}

std::uint64_t suffix_tree::count(std::span<const symbol> pattern) const {
    return query(pattern).size();
}

std::vector<symbol> suffix_tree::document_text(doc_id id) const {
    const auto& t = chunks_[slot_of_.at(id)];
    return std::vector<symbol>(t.begin(), t.end() - 1);
}

std::vector<doc_id> suffix_tree::document_ids() const {
    std::vector<doc_id> ids;
    ids.reserve(slot_of_.size());
    for (const auto& [id, slot] : slot_of_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::uint64_t suffix_tree::size_in_bits() const {
    std::uint64_t bits = 8 * sizeof(node) * nodes_.size();
    for (const auto& n : nodes_) bits += 8 * n.children.bucket_count() * sizeof(void*) + 8 * n.children.size() * 32;
    for (const auto& c : chunks_) bits += 8 * sizeof(key) * c.size();
    return bits;
}

std::vector<suffix_tree::key> suffix_tree::path_of(std::int32_t v) const {
    if (v == root) return {};
    const auto& n = nodes_[v];
    const auto& t = chunks_[n.chunk];
    const std::uint32_t from = n.start + n.len - n.depth;
    return std::vector<key>(t.begin() + from, t.begin() + n.start + n.len);
}

std::string suffix_tree::validate() const {
    std::vector<bool> is_free(nodes_.size(), false);
    for (const auto v : free_nodes_) is_free[v] = true;
    std::uint64_t leaves = 0;
    for (std::int32_t v = 0; v < static_cast<std::int32_t>(nodes_.size()); ++v) {
        if (is_free[v]) continue;
        const auto& n = nodes_[v];
        const std::string where = "node " + std::to_string(v) + ": ";
        if (v != root) {
            if (n.chunk < 0 || n.len == 0) return where + "missing label";
            const std::uint32_t pd = nodes_[n.parent].depth;
            if (n.depth != pd + n.len) return where + "depth mismatch";
            if (n.start < pd || n.start + n.len > chunks_[n.chunk].size()) return where + "label out of range";
            if (path_of(n.parent) != std::vector<key>(chunks_[n.chunk].begin() + (n.start - pd),
                                                      chunks_[n.chunk].begin() + n.start))
                return where + "label does not continue parent path";
            if (!refs_[n.chunk].count(v)) return where + "missing chunk reference";
            auto it = nodes_[n.parent].children.find(edge_key(v));
            if (it == nodes_[n.parent].children.end() || it->second != v) return where + "parent does not list node";
        }
        if (n.leaf_slot >= 0) {
            ++leaves;
            if (!n.children.empty()) return where + "leaf with children";
            if (leaves_[n.leaf_slot][n.leaf_offset] != v) return where + "leaf registry mismatch";
            if (n.depth != chunks_[n.leaf_slot].size() - n.leaf_offset) return where + "leaf depth mismatch";
            continue;
        }
        if (v != root) {
            if (n.children.size() < 2) return where + "inner node with fewer than two children";
            if (n.link < 0 || is_free[n.link]) return where + "missing suffix link";
            const auto path = path_of(v);
            if (path_of(n.link) != std::vector<key>(path.begin() + 1, path.end())) return where + "bad suffix link";
        }
        for (const auto& [k, c] : n.children)
            if (nodes_[c].parent != v || edge_key(c) != k) return where + "child entry mismatch";
    }
    if (leaves != total_symbols_) return "leaf count differs from stored symbols";
    return {};
}

}  // namespace dyndex
