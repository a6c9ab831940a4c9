#include "dyndex/relation.hpp"

#include <algorithm>
#include <stdexcept>
#include <type_traits>

namespace dyndex {

// ------------------------------------------------------------ relation_block

relation_block::relation_block(std::vector<pair_key> pairs, unsigned tau) {
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
        throw std::invalid_argument("relation_block: duplicate pair");
    std::vector<symbol> seq;
    std::vector<bool> delim;
    std::map<label_slot, std::uint64_t> per_label;
    label_slot max_label = 0;
    seq.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto o = key_object(pairs[i]);
        const auto a = key_label(pairs[i]);
        if (i > 0 && key_object(pairs[i - 1]) != o) delim.push_back(false);
        if (objects_.empty() || objects_.back() != o) objects_.push_back(o);
        seq.push_back(a);
        delim.push_back(true);
        ++per_label[a];
        max_label = std::max(max_label, a);
    }
    if (!pairs.empty()) delim.push_back(false);
    s_ = wavelet_tree(seq);
    n_ = bit_array(delim);

    const unsigned width = std::clamp(tau, 2u, 64u);
    d_ = compact_report_bit_vector(seq.size(), width, seq.size());
    da_ = compact_report_bit_vector(seq.size(), width, seq.size());
    std::vector<std::uint64_t> bases;
    std::uint64_t base = 0;
    for (const auto& [a, c] : per_label) {
        bases.push_back(base);
        base += c;
    }
    label_base_ = packed_vector(bases);
    std::vector<bool> present(pairs.empty() ? 0 : std::size_t{max_label} + 1, false);
    for (const auto& [a, c] : per_label) present[a] = true;
    present_ = bit_array(present);
}

std::optional<std::size_t> relation_block::object_index(object_id o) const {
    auto it = std::lower_bound(objects_.begin(), objects_.end(), o);
    if (it == objects_.end() || *it != o) return std::nullopt;
    return static_cast<std::size_t>(it - objects_.begin());
}

std::pair<std::size_t, std::size_t> relation_block::range_of(std::size_t k) const {
    const std::size_t begin = k == 0 ? 0 : n_.select0(k - 1) + 1 - k;
    const std::size_t end = n_.select0(k) - k;
    return {begin, end};
}

object_id relation_block::object_at(std::size_t pos) const {
    return objects_[n_.select1(pos) - pos];
}

std::size_t relation_block::label_base(label_slot a) const {
    return static_cast<std::size_t>(label_base_[present_.rank1(a)]);
}

std::optional<std::size_t> relation_block::position(object_id o, label_slot a) const {
    if (!label_present(a)) return std::nullopt;
    const auto k = object_index(o);
    if (!k) return std::nullopt;
    const auto [l, r] = range_of(*k);
    const auto before = s_.rank(a, l);
    if (s_.rank(a, r) == before) return std::nullopt;
    return s_.select(a, before);
}

bool relation_block::related(object_id o, label_slot a) const {
    const auto p = position(o, a);
    return p && d_.test(*p);
}

std::vector<label_slot> relation_block::labels_of(object_id o) const {
    std::vector<label_slot> out;
    const auto k = object_index(o);
    if (!k) return out;
    const auto [l, r] = range_of(*k);
    if (l < r) d_.for_each_one(l, r - 1, [&](std::size_t i) { out.push_back(s_.access(i)); });
    return out;
}

std::uint64_t relation_block::count_labels(object_id o) const {
    const auto k = object_index(o);
    if (!k) return 0;
    const auto [l, r] = range_of(*k);
    return l < r ? d_.ones_in_range(l, r - 1) : 0;
}

std::vector<object_id> relation_block::objects_of(label_slot a) const {
    std::vector<object_id> out;
    if (!label_present(a)) return out;
    const std::size_t base = label_base(a);
    const std::size_t c = s_.count(a);
    da_.for_each_one(base, base + c - 1, [&](std::size_t j) { out.push_back(object_at(s_.select(a, j - base))); });
    return out;
}

std::uint64_t relation_block::count_objects(label_slot a) const {
    if (!label_present(a)) return 0;
    const std::size_t base = label_base(a);
    return da_.ones_in_range(base, base + s_.count(a) - 1);
}

std::uint64_t relation_block::erase(object_id o, label_slot a) {
    const auto p = position(o, a);
    if (!p || !d_.test(*p)) throw std::out_of_range("relation_block: pair is not alive here");
    d_.zero(*p);
    const std::size_t j = label_base(a) + s_.rank(a, *p);
    da_.zero(j);
    ++deleted_;
    return 4;
}

std::vector<pair_key> relation_block::alive_pairs() const {
    std::vector<pair_key> out;
    out.reserve(alive());
    for (std::size_t k = 0; k < objects_.size(); ++k) {
        const auto [l, r] = range_of(k);
        if (l < r) d_.for_each_one(l, r - 1, [&](std::size_t i) { out.push_back(make_pair_key(objects_[k], s_.access(i))); });
    }
    return out;
}

size_report relation_block::space() const {
    size_report r;
    const auto d = d_.space();
    const auto da = da_.space();
    r.payload_bits = s_.size_in_bits() + n_.size_in_bits() + d.payload_bits + da.payload_bits +
                     32 * objects_.size() + label_base_.size_in_bits() + present_.size_in_bits();
    r.summary_bits = d.summary_bits + da.summary_bits;
    r.total_bits = r.payload_bits + r.summary_bits;
    return r;
}

std::uint64_t relation_block::deletion_overhead_bits() const {
    if (size() == 0) return 0;
    return s_.size_in_bits() * deleted_ / size() + d_.space().total_bits + da_.space().total_bits;
}

// ------------------------------------------------------------ relation_lists

void relation_lists::insert(object_id o, label_slot a) {
    if (!by_object_[o].insert(a).second) throw std::invalid_argument("relation_lists: duplicate pair");
    by_label_[a].insert(o);
    ++size_;
    ops_ += 2;
}

void relation_lists::erase(object_id o, label_slot a) {
    auto it = by_object_.find(o);
    if (it == by_object_.end() || !it->second.erase(a)) throw std::out_of_range("relation_lists: unknown pair");
    if (it->second.empty()) by_object_.erase(it);
    auto jt = by_label_.find(a);
    jt->second.erase(o);
    if (jt->second.empty()) by_label_.erase(jt);
    --size_;
    ops_ += 2;
}

bool relation_lists::related(object_id o, label_slot a) const {
    auto it = by_object_.find(o);
    return it != by_object_.end() && it->second.count(a) != 0;
}

std::vector<label_slot> relation_lists::labels_of(object_id o) const {
    auto it = by_object_.find(o);
    if (it == by_object_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<object_id> relation_lists::objects_of(label_slot a) const {
    auto it = by_label_.find(a);
    if (it == by_label_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::uint64_t relation_lists::count_labels(object_id o) const {
    auto it = by_object_.find(o);
    return it == by_object_.end() ? 0 : it->second.size();
}

std::uint64_t relation_lists::count_objects(label_slot a) const {
    auto it = by_label_.find(a);
    return it == by_label_.end() ? 0 : it->second.size();
}

std::vector<pair_key> relation_lists::pairs() const {
    std::vector<pair_key> out;
    out.reserve(size_);
    for (const auto& [o, labels] : by_object_)
        for (const auto a : labels) out.push_back(make_pair_key(o, a));
    return out;
}

std::uint64_t relation_lists::size_in_bits() const {
    // Two ordered-set nodes per pair (three pointers, colour and key each).
    return size_ * 2 * (3 * 64 + 64) + (by_object_.size() + by_label_.size()) * 128;
}

// ----------------------------------------------------------- relation_family

std::uint64_t relation_family::tree_insert(tree& t, item_id id, const payload&) {
    const auto before = t.operations();
    t.insert(key_object(id), key_label(id));
    return t.operations() - before;
}

std::uint64_t relation_family::tree_erase(tree& t, item_id id) {
    const auto before = t.operations();
    t.erase(key_object(id), key_label(id));
    return t.operations() - before;
}

std::vector<relation_family::item> relation_family::tree_items(const tree& t) {
    std::vector<item> out;
    for (const auto k : t.pairs()) out.emplace_back(k, unit{});
    return out;
}

relation_family::block relation_family::build(std::vector<item> items, const config& cfg) {
    std::vector<pair_key> keys;
    keys.reserve(items.size());
    for (const auto& x : items) keys.push_back(x.first);
    return relation_block(std::move(keys), cfg.tau);
}

std::vector<relation_family::item> relation_family::block_items(const block& b) {
    std::vector<item> out;
    for (const auto k : b.alive_pairs()) out.emplace_back(k, unit{});
    return out;
}

// ---------------------------------------------------------- dynamic_relation

namespace {

unsigned relation_tau(const relation_options& o) {
    return std::max(2u, o.tau ? o.tau : default_tau(o.expected_pairs));
}

staged_options relation_engine_options(const relation_options& o) {
    staged_options s;
    s.epsilon = o.epsilon;
    s.tau = relation_tau(o);
    s.initial_size = o.expected_pairs;
    s.seed = o.seed;
    return s;
}

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

dynamic_relation::dynamic_relation(relation_options opts)
    : engine_(relation_engine_options(opts), relation_family::config{relation_tau(opts)}) {}

std::optional<label_slot> dynamic_relation::slot_of(std::uint64_t label) const {
    auto it = sn_.find(label);
    if (it == sn_.end()) return std::nullopt;
    return it->second;
}

void dynamic_relation::add(object_id o, std::uint64_t label) {
    auto slot = slot_of(label);
    if (slot && engine_.contains(make_pair_key(o, *slot))) throw std::invalid_argument("dynamic_relation: pair already present");
    if (!slot) {
        if (!free_slots_.empty()) {
            slot = free_slots_.back();
            free_slots_.pop_back();
        } else {
            slot = static_cast<label_slot>(ns_.size());
            ns_.emplace_back();
            slot_pairs_.push_back(0);
        }
        ns_[*slot] = label;
        sn_.emplace(label, *slot);
    }
    engine_.insert(make_pair_key(o, *slot), {});
    ++slot_pairs_[*slot];
    ++object_pairs_[o];
}

void dynamic_relation::remove(object_id o, std::uint64_t label) {
    const auto slot = slot_of(label);
    if (!slot || !engine_.contains(make_pair_key(o, *slot))) throw std::out_of_range("dynamic_relation: pair not present");
    engine_.erase(make_pair_key(o, *slot));
    if (--slot_pairs_[*slot] == 0) {
        sn_.erase(label);
        ns_[*slot].reset();
        free_slots_.push_back(*slot);
    }
    if (--object_pairs_[o] == 0) object_pairs_.erase(o);
}

std::vector<std::uint64_t> dynamic_relation::labels_of(object_id o) const {
    std::vector<label_slot> slots;
    engine_.for_each_holder([&](const auto& h) {
        const auto part = h.labels_of(o);
        slots.insert(slots.end(), part.begin(), part.end());
    });
    std::vector<std::uint64_t> out;
    out.reserve(slots.size());
    for (const auto a : slots) out.push_back(*ns_[a]);
    sort_unique(out);
    return out;
}

std::vector<object_id> dynamic_relation::objects_of(std::uint64_t label) const {
    std::vector<object_id> out;
    const auto slot = slot_of(label);
    if (!slot) return out;
    engine_.for_each_holder([&](const auto& h) {
        const auto part = h.objects_of(*slot);
        out.insert(out.end(), part.begin(), part.end());
    });
    sort_unique(out);
    return out;
}

bool dynamic_relation::related(object_id o, std::uint64_t label) const {
    const auto slot = slot_of(label);
    if (!slot) return false;
    bool found = false;
    engine_.for_each_holder([&](const auto& h) { found = found || h.related(o, *slot); });
    return found;
}

std::uint64_t dynamic_relation::count_labels(object_id o) const {
    std::uint64_t total = 0;
    engine_.for_each_holder([&](const auto& h) { total += h.count_labels(o); });
    return total;
}

std::uint64_t dynamic_relation::count_objects(std::uint64_t label) const {
    const auto slot = slot_of(label);
    if (!slot) return 0;
    std::uint64_t total = 0;
    engine_.for_each_holder([&](const auto& h) { total += h.count_objects(*slot); });
    return total;
}

relation_stats dynamic_relation::stats() const {
    relation_stats s;
    s.pairs = size();
    s.objects = object_count();
    s.labels = label_count();
    s.label_slots = ns_.size();
    engine_.for_each_holder([&](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, relation_block>) {
            ++s.blocks;
            s.block_bits += h.space().total_bits;
        } else {
            s.list_bits += h.size_in_bits();
        }
    });
    return s;
}

std::string dynamic_relation::validate() const {
    if (auto v = engine_.validate(); !v.empty()) return v;
    std::uint64_t pairs = 0;
    for (std::size_t a = 0; a < ns_.size(); ++a) {
        if (!ns_[a]) {
            if (slot_pairs_[a] != 0) return "free slot with pairs";
            continue;
        }
        auto it = sn_.find(*ns_[a]);
        if (it == sn_.end() || it->second != a) return "label tables disagree";
        if (slot_pairs_[a] == 0) return "live slot without pairs";
        pairs += slot_pairs_[a];
    }
    if (sn_.size() + free_slots_.size() != ns_.size()) return "slot accounting broken";
    if (pairs != size()) return "per-label pair counts do not add up";
    return {};
}

std::vector<object_id> directed_graph::out_neighbors(object_id u) const {
    std::vector<object_id> out;
    for (const auto v : rel_.labels_of(u)) out.push_back(static_cast<object_id>(v));
    return out;
}

}  // namespace dyndex
