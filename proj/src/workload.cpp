#include "dyndex/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "dyndex/binary_io.hpp"
#include "dyndex/oracle.hpp"

namespace dyndex::workload {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<command> parse_script(std::istream& in) {
    std::vector<command> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text = strip_cr(raw);
        const auto body = trim(text);
        if (body.empty() || body.front() == '#') continue;
        const auto space = text.find(' ');
        const auto word = trim(text.substr(0, space));
        // The pattern is everything after the first space, inner spaces included.
        const std::string_view rest = space == std::string_view::npos ? std::string_view{} : text.substr(space + 1);
        command c{command_kind::insert, {}, line};
        if (word == "INSERT") {
            c.kind = command_kind::insert;
            c.arg = std::string(trim(rest));
            if (c.arg.empty()) throw parse_error(line, "INSERT needs a document file");
        } else if (word == "DELETE") {
            c.kind = command_kind::erase;
            c.arg = std::string(trim(rest));
            if (!parse_number<doc_id>(c.arg)) throw parse_error(line, "DELETE needs a numeric docId");
        } else if (word == "QUERY" || word == "COUNT") {
            c.kind = word == "QUERY" ? command_kind::query : command_kind::count;
            c.arg = std::string(rest);
            if (c.arg.empty()) throw parse_error(line, std::string(word) + " needs a non-empty pattern");
        } else {
            throw parse_error(line, "unknown command '" + std::string(word) + "'");
        }
        out.push_back(std::move(c));
    }
    if (in.bad()) throw std::runtime_error("read error in script");
    return out;
}

doc_id parse_doc_id(const command& c) {
    const auto id = parse_number<doc_id>(c.arg);
    if (!id) throw parse_error(c.line, "bad docId '" + c.arg + "'");
    return *id;
}

std::vector<edge_command> parse_edges(std::istream& in) {
    std::vector<edge_command> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto body = trim(raw);
        if (body.empty() || body.front() == '#') continue;
        const auto tok = split(body);
        auto node = [&](std::string_view s) {
            const auto v = parse_number<std::uint32_t>(s);
            if (!v) throw parse_error(line, "bad vertex '" + std::string(s) + "'");
            return *v;
        };
        edge_command c{edge_kind::add, 0, 0, line};
        if ((tok[0] == "A" || tok[0] == "R") && tok.size() == 3) {
            c.kind = tok[0] == "A" ? edge_kind::add : edge_kind::remove;
            c.u = node(tok[1]);
            c.v = node(tok[2]);
        } else if (tok[0] == "Q" && tok.size() >= 3) {
            const auto what = tok[1];
            if (what == "has" && tok.size() == 4) {
                c.kind = edge_kind::has;
                c.u = node(tok[2]);
                c.v = node(tok[3]);
            } else if (tok.size() == 3 && (what == "out" || what == "in" || what == "outdeg" || what == "indeg")) {
                c.kind = what == "out"      ? edge_kind::out
                         : what == "in"     ? edge_kind::in
                         : what == "outdeg" ? edge_kind::outdeg
                                            : edge_kind::indeg;
                c.u = node(tok[2]);
            } else {
                throw parse_error(line, "malformed query '" + std::string(body) + "'");
            }
        } else {
            throw parse_error(line, "malformed edge command '" + std::string(body) + "'");
        }
        out.push_back(c);
    }
    if (in.bad()) throw std::runtime_error("read error in edge stream");
    return out;
}

std::vector<symbol> bytes_to_symbols(std::string_view bytes) {
    std::vector<symbol> out(bytes.size());
    std::transform(bytes.begin(), bytes.end(), out.begin(),
                   [](char c) { return static_cast<symbol>(static_cast<unsigned char>(c)) + 1; });
    return out;
}

std::string symbols_to_bytes(std::span<const symbol> text) {
    std::string out(text.size(), '\0');
    std::transform(text.begin(), text.end(), out.begin(), [](symbol s) { return static_cast<char>(s - 1); });
    return out;
}

std::vector<symbol> read_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read error in " + path.string());
    return bytes_to_symbols(bytes);
}

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string format_hits(occurrence_list hits) {
    std::sort(hits.begin(), hits.end());
    std::string out;
    for (const auto& h : hits) {
        if (!out.empty()) out += ' ';
        out += std::to_string(h.doc) + ':' + std::to_string(h.offset);
    }
    return out;
}

std::optional<index_mode> parse_mode(std::string_view name) {
    if (name == "amortized") return index_mode::amortized;
    if (name == "amortized-loglog") return index_mode::amortized_loglog;
    if (name == "worstcase") return index_mode::worstcase;
    return std::nullopt;
}

std::string_view mode_name(index_mode m) {
    switch (m) {
        case index_mode::amortized: return "amortized";
        case index_mode::amortized_loglog: return "amortized-loglog";
        case index_mode::worstcase: return "worstcase";
    }
    return "?";
}

namespace {

std::variant<amortized_index, worstcase_index> make_impl(const index_params& p) {
    if (p.mode == index_mode::worstcase) {
        worstcase_options o;
        o.epsilon = p.epsilon;
        o.tau = p.tau;
        o.sample_rate = p.sample_rate;
        o.seed = p.seed;
        o.expected_size = p.expected_size;
        return worstcase_index(o);
    }
    amortized_options o;
    o.epsilon = p.epsilon;
    o.tau = p.tau;
    o.sample_rate = p.sample_rate;
    o.seed = p.seed;
    o.mode = p.mode == index_mode::amortized_loglog ? level_mode::loglog_levels : level_mode::constant_levels;
    return amortized_index(o);
}

}  // namespace

any_index::any_index(const index_params& p) : mode_(p.mode), impl_(make_impl(p)) {}

void any_index::insert(doc_id id, std::vector<symbol> text) {
    std::visit([&](auto& x) { x.insert(id, std::move(text)); }, impl_);
}

void any_index::erase(doc_id id) {
    std::visit([&](auto& x) { x.erase(id); }, impl_);
}

occurrence_list any_index::query(std::span<const symbol> pattern) const {
    return std::visit([&](const auto& x) { return x.query(pattern); }, impl_);
}

std::uint64_t any_index::count(std::span<const symbol> pattern) const {
    return std::visit([&](const auto& x) { return x.count(pattern); }, impl_);
}

bool any_index::contains(doc_id id) const {
    return std::visit([&](const auto& x) { return x.contains(id); }, impl_);
}

std::uint64_t any_index::alive_symbols() const {
    return std::visit([](const auto& x) { return x.alive_symbols(); }, impl_);
}

std::uint64_t any_index::document_count() const {
    return std::visit([](const auto& x) { return x.document_count(); }, impl_);
}

document_list any_index::documents() const {
    return std::visit([](const auto& x) { return x.documents(); }, impl_);
}

std::string any_index::validate() const {
    return std::visit([](const auto& x) { return x.validate(); }, impl_);
}

namespace {

std::string_view role_name(holder_info::kind k) {
    switch (k) {
        case holder_info::kind::tree: return "tree";
        case holder_info::kind::level: return "level";
        case holder_info::kind::locked: return "locked";
        case holder_info::kind::temp: return "temp";
        case holder_info::kind::top: return "top";
        case holder_info::kind::locked_top: return "locked_top";
        case holder_info::kind::draining: return "draining";
    }
    return "?";
}

}  // namespace

void any_index::write_stats(std::ostream& out) const {
    out << "mode=" << mode_name(mode_) << '\n';
    out << "documents=" << document_count() << '\n';
    out << "alive_symbols=" << alive_symbols() << '\n';
    std::visit([&](const auto& x) { out << "deletion_overhead_bits=" << x.deletion_overhead_bits() << '\n'; }, impl_);

    if (const auto* a = amortized()) {
        const auto s = a->stats();
        out << "tau=" << s.tau << '\n';
        out << "levels=" << s.levels.size() << '\n';
        std::uint64_t total = 0;
        for (std::size_t j = 0; j < s.levels.size(); ++j) {
            const auto& l = s.levels[j];
            const auto key = "level." + std::to_string(j) + '.';
            out << key << "cap=" << l.cap << '\n';
            out << key << "alive_symbols=" << l.alive_symbols << '\n';
            out << key << "deleted_symbols=" << l.deleted_symbols << '\n';
            out << key << "documents=" << l.documents << '\n';
            total += l.alive_symbols;
        }
        out << "level_alive_total=" << total << '\n';
        out << "inserted_symbols=" << s.inserted_symbols << '\n';
        out << "build_symbols=" << s.build_symbols << '\n';
        out << "global_rebuilds=" << s.global_rebuilds << '\n';
        out << "n_at_rebuild=" << s.n_at_rebuild << '\n';
        return;
    }

    const auto& e = worstcase()->engine();
    out << "tau=" << e.tau() << '\n';
    out << "epsilon=" << e.epsilon() << '\n';
    out << "nf=" << e.nf() << '\n';
    out << "r=" << e.layout().r() << '\n';
    out << "delta=" << e.delta() << '\n';
    out << "top_deletion_bound=" << e.top_deletion_bound() << '\n';
    out << "level_rate=" << e.level_rate() << '\n';
    out << "pending_jobs=" << e.pending_jobs() << '\n';
    const auto hs = e.holders();
    out << "holders=" << hs.size() << '\n';
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
        const auto& h = hs[k];
        const auto key = "holder." + std::to_string(k) + '.';
        out << key << "role=" << role_name(h.role) << '\n';
        out << key << "slot=" << h.slot << '\n';
        out << key << "single=" << h.single << '\n';
        out << key << "in_job=" << h.in_job << '\n';
        out << key << "alive_symbols=" << h.alive_symbols << '\n';
        out << key << "deleted_symbols=" << h.deleted_symbols << '\n';
        out << key << "items=" << h.items << '\n';
        out << key << "m=" << h.m << '\n';
        total += h.alive_symbols;
    }
    out << "holder_alive_total=" << total << '\n';
    const auto& w = e.work();
    out << "work.max_work_ratio=" << w.max_work_ratio << '\n';
    out << "work.max_normalized_work=" << w.max_normalized_work << '\n';
    out << "work.fed_symbols=" << w.fed_symbols << '\n';
    out << "work.immediate_symbols=" << w.immediate_symbols << '\n';
    out << "work.forced_completions=" << w.forced_completions << '\n';
    out << "work.relock_conflicts=" << w.relock_conflicts << '\n';
    out << "work.rounds=" << w.rounds << '\n';
    out << "work.nf_changes=" << w.nf_changes << '\n';
}

void any_index::save(std::ostream& out) {
    std::visit([&](auto& x) { x.save(out); }, impl_);
}

any_index any_index::load(std::istream& in) {
    char head[4];
    if (!in.read(head, sizeof head)) throw io::format_error("truncated snapshot");
    in.seekg(-static_cast<std::streamoff>(sizeof head), std::ios::cur);
    if (!in) throw io::format_error("snapshot stream is not seekable");
    if (std::memcmp(head, "DDW1", 4) == 0) return any_index(index_mode::worstcase, worstcase_index::load(in));
    if (std::memcmp(head, "DDA1", 4) == 0) {
        auto a = amortized_index::load(in);
        const auto m = a.mode() == level_mode::loglog_levels ? index_mode::amortized_loglog : index_mode::amortized;
        return any_index(m, std::move(a));
    }
    throw io::format_error("unknown snapshot kind");
}

std::vector<fuzz_op> generate_session(const fuzz_options& o) {
    std::mt19937_64 rng(o.seed);
    auto below = [&](std::uint64_t k) { return k ? rng() % k : 0; };
    const unsigned sigma = std::max(1u, o.alphabet);
    const std::uint64_t max_len = std::max<std::uint64_t>(1, o.doc_len);

    std::vector<fuzz_op> ops;
    std::vector<std::pair<doc_id, std::vector<symbol>>> live;
    doc_id next_id = 0;
    ops.reserve(o.ops);
    for (std::uint64_t i = 0; i < o.ops; ++i) {
        const auto roll = below(100);
        fuzz_op op{command_kind::insert, 0, {}};
        if (live.empty() || roll < 35) {
            op.id = next_id++;
            op.text.resize(1 + below(max_len));
            for (auto& s : op.text) s = 1 + static_cast<symbol>(below(sigma));
            live.emplace_back(op.id, op.text);
        } else if (roll < 55) {
            op.kind = command_kind::erase;
            const auto k = below(live.size());
            op.id = live[k].first;
            live[k] = std::move(live.back());
            live.pop_back();
        } else {
            op.kind = roll < 85 ? command_kind::query : command_kind::count;
            if (below(2) == 0) {
                const auto& doc = live[below(live.size())].second;
                const auto len = 1 + below(std::min<std::uint64_t>(doc.size(), 8));
                const auto from = below(doc.size() - len + 1);
                op.text.assign(doc.begin() + static_cast<std::ptrdiff_t>(from),
                               doc.begin() + static_cast<std::ptrdiff_t>(from + len));
            } else {
                op.text.resize(1 + below(6));
                for (auto& s : op.text) s = 1 + static_cast<symbol>(below(sigma));
            }
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

std::optional<mismatch> check_session(const std::vector<fuzz_op>& ops, const index_params& p) {
    any_index index(p);
    oracle::naive_collection naive;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto& op = ops[i];
        try {
            switch (op.kind) {
                case command_kind::insert:
                    if (naive.contains(op.id)) break;
                    naive.insert(op.id, op.text);
                    index.insert(op.id, op.text);
                    break;
                case command_kind::erase:
                    if (!naive.contains(op.id)) break;
                    naive.erase(op.id);
                    index.erase(op.id);
                    break;
                case command_kind::query: {
                    auto got = index.query(op.text);
                    std::sort(got.begin(), got.end());
                    const auto want = naive.occurrences(op.text);
                    occurrence_list expected;
                    for (const auto& [d, off] : want) expected.push_back({d, off});
                    if (got != expected)
                        return mismatch{i, "QUERY returned {" + format_hits(got) + "}, expected {" +
                                               format_hits(expected) + "}"};
                    break;
                }
                case command_kind::count: {
                    const auto got = index.count(op.text);
                    const auto want = naive.occurrences(op.text).size();
                    if (got != want)
                        return mismatch{i, "COUNT returned " + std::to_string(got) + ", expected " +
                                               std::to_string(want)};
                    break;
                }
            }
        } catch (const std::exception& e) {
            return mismatch{i, std::string("exception: ") + e.what()};
        }
    }
    return std::nullopt;
}

std::vector<fuzz_op> minimize(std::vector<fuzz_op> ops, const index_params& p) {
    auto first = check_session(ops, p);
    if (!first) return ops;
    ops.resize(first->op + 1);
    for (std::size_t chunk = std::max<std::size_t>(1, ops.size() / 2);; chunk /= 2) {
        for (std::size_t start = 0; start < ops.size();) {
            std::vector<fuzz_op> trial;
            trial.reserve(ops.size());
            trial.insert(trial.end(), ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(start));
            trial.insert(trial.end(), ops.begin() + static_cast<std::ptrdiff_t>(std::min(ops.size(), start + chunk)),
                         ops.end());
            if (auto m = check_session(trial, p)) {
                trial.resize(m->op + 1);
                ops = std::move(trial);
            } else {
                start += chunk;
            }
        }
        if (chunk == 1) break;
    }
    return ops;
}

std::string describe(const fuzz_op& op) {
    auto text = [&] {
        std::string s;
        for (const auto c : op.text) {
            if (!s.empty()) s += ',';
            s += std::to_string(c);
        }
        return s;
    };
    switch (op.kind) {
        case command_kind::insert: return "INSERT " + std::to_string(op.id) + " [" + text() + "]";
        case command_kind::erase: return "DELETE " + std::to_string(op.id);
        case command_kind::query: return "QUERY [" + text() + "]";
        case command_kind::count: return "COUNT [" + text() + "]";
    }
    return "?";
}

fuzz_result run_fuzz(const fuzz_options& o) {
    index_params p;
    p.mode = o.mode;
    p.epsilon = o.epsilon;
    p.tau = o.tau;
    p.seed = o.seed;
    const auto ops = generate_session(o);
    fuzz_result r;
    r.ops = ops.size();
    r.queries = static_cast<std::uint64_t>(std::count_if(ops.begin(), ops.end(), [](const fuzz_op& op) {
        return op.kind == command_kind::query || op.kind == command_kind::count;
    }));
    if (const auto m = check_session(ops, p)) {
        r.passed = false;
        r.message = "op " + std::to_string(m->op) + ": " + m->message;
        r.reproducer = minimize(ops, p);
    }
    return r;
}

}  // namespace dyndex::workload
