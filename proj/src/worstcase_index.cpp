#include "dyndex/worstcase_index.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <type_traits>

#include "dyndex/binary_io.hpp"

namespace dyndex {

namespace {

constexpr char magic[4] = {'D', 'D', 'W', '1'};

document_family::config family_config(const worstcase_options& o, unsigned tau) {
    return {tau, o.counting, o.sample_rate};
}

staged_options engine_options(const worstcase_options& o) {
    staged_options s;
    s.epsilon = o.epsilon;
    s.tau = o.tau ? o.tau : default_tau(o.expected_size);
    s.initial_size = o.expected_size;
    s.seed = o.seed;
    return s;
}

}  // namespace

std::uint64_t document_family::tree_insert(tree& t, item_id id, const payload& p) {
    const auto before = t.node_operations();
    t.insert(id, p);
    return t.node_operations() - before;
}

std::uint64_t document_family::tree_erase(tree& t, item_id id) {
    const auto before = t.node_operations();
    t.erase(id);
    return t.node_operations() - before;
}

std::vector<document_family::item> document_family::tree_items(const tree& t) {
    std::vector<item> out;
    for (const auto id : t.document_ids()) out.emplace_back(id, t.document_text(id));
    return out;
}

document_family::block document_family::build(std::vector<item> items, const config& cfg) {
    semi_dynamic_options o;
    o.tau = cfg.tau;
    o.counting = cfg.counting;
    o.auto_purge = false;
    o.sample_rate = cfg.sample_rate;
    return semi_dynamic_index(std::move(items), o);
}

std::uint64_t document_family::block_erase(block& b, item_id id) {
    const auto before = b.mark_operations();
    b.delete_document(id);
    return b.mark_operations() - before;
}

worstcase_index::worstcase_index(worstcase_options opts)
    : opts_(opts), engine_(engine_options(opts), family_config(opts, engine_options(opts).tau)) {}

worstcase_index::worstcase_index(worstcase_options opts, staged_collection<document_family> engine)
    : opts_(opts), engine_(std::move(engine)) {}

void worstcase_index::insert(doc_id id, std::vector<symbol> text) {
    if (engine_.contains(id)) throw std::invalid_argument("duplicate document " + std::to_string(id));
    if (text.empty()) throw std::invalid_argument("empty document");
    if (std::find(text.begin(), text.end(), terminator) != text.end())
        throw std::invalid_argument("document contains the reserved symbol 0");
    engine_.insert(id, std::move(text));
}

void worstcase_index::erase(doc_id id) {
    if (!engine_.contains(id)) throw std::out_of_range("unknown document " + std::to_string(id));
    engine_.erase(id);
}

occurrence_list worstcase_index::query(std::span<const symbol> pattern) const {
    occurrence_list out;
    engine_.for_each_holder([&](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, suffix_tree>) {
            const auto part = h.query(pattern);
            out.insert(out.end(), part.begin(), part.end());
        } else {
            h.for_each_occurrence(pattern, [&](const occurrence& o) { out.push_back(o); });
        }
    });
    return out;
}

std::uint64_t worstcase_index::count(std::span<const symbol> pattern) const {
    std::uint64_t total = 0;
    engine_.for_each_holder([&](const auto& h) { total += h.count(pattern); });
    return total;
}

document_list worstcase_index::documents() const {
    document_list docs;
    engine_.for_each_holder([&](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, suffix_tree>) {
            auto part = document_family::tree_items(h);
            docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        } else {
            auto part = h.alive_pairs();
            docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
    });
    std::sort(docs.begin(), docs.end());
    return docs;
}

std::uint64_t worstcase_index::deletion_overhead_bits() const {
    std::uint64_t bits = 0;
    engine_.for_each_holder([&](const auto& h) {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, semi_dynamic_index>) bits += h.deletion_overhead_bits();
    });
    return bits;
}

void worstcase_index::save(std::ostream& out) {
    out.write(magic, sizeof magic);
    io::put<std::uint8_t>(out, opts_.counting ? 1 : 0);
    io::put<std::uint64_t>(out, opts_.sample_rate);
    io::put<std::uint64_t>(out, opts_.expected_size);
    io::put<std::uint32_t>(out, engine_.tau());
    engine_.save(out);
}

worstcase_index worstcase_index::load(std::istream& in) {
    char head[4];
    if (!in.read(head, sizeof head) || std::memcmp(head, magic, sizeof magic) != 0)
        throw io::format_error("not a worst-case index snapshot");
    worstcase_options o;
    o.counting = io::get<std::uint8_t>(in) != 0;
    o.sample_rate = io::get<std::uint64_t>(in);
    o.expected_size = io::get<std::uint64_t>(in);
    const auto tau = io::get<std::uint32_t>(in);
    if (tau < 2) throw io::format_error("invalid tau in snapshot");
    auto engine = staged_collection<document_family>::load(in, family_config(o, tau));
    o.epsilon = engine.epsilon();
    o.tau = engine.tau();
    return worstcase_index(o, std::move(engine));
}

}  // namespace dyndex
