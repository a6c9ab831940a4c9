#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dyndex/oracle.hpp"
#include "dyndex/relation.hpp"
#include "dyndex/workload.hpp"

namespace fs = std::filesystem;
using namespace dyndex;
using namespace dyndex::workload;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_parse = 2;
constexpr int exit_verify = 3;

/// Failure that maps straight to an exit code.
struct cli_failure {
    int code;
    std::string message;
};

struct index_flags {
    std::string mode = "amortized";
    double epsilon = 0.5;
    unsigned tau = 0;
    std::uint64_t sample_rate = 0;
    std::uint64_t seed = 1;
};

void add_index_flags(CLI::App* cmd, index_flags& f) {
    cmd->add_option("--mode", f.mode, "amortized, worstcase or amortized-loglog")
        ->check(CLI::IsMember({"amortized", "worstcase", "amortized-loglog"}));
    cmd->add_option("--epsilon", f.epsilon, "level growth exponent")->check(CLI::Range(0.05, 1.0));
    cmd->add_option("--tau", f.tau, "deletion granularity, 0 for ceil(log log n)");
    cmd->add_option("--sample-rate", f.sample_rate, "suffix array sample rate, 0 for ceil(log2 n)");
    cmd->add_option("--seed", f.seed, "random seed");
}

index_params to_params(const index_flags& f, std::uint64_t expected_size = 0) {
    index_params p;
    p.mode = *parse_mode(f.mode);
    p.epsilon = f.epsilon;
    p.tau = f.tau;
    p.sample_rate = f.sample_rate;
    p.seed = f.seed;
    p.expected_size = expected_size;
    return p;
}

std::ifstream open_input(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw cli_failure{exit_parse, "cannot open " + path};
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cli_failure{exit_parse, "cannot write " + path};
    return out;
}

void write_stats_file(const std::string& path, const any_index& index) {
    auto out = open_output(path);
    index.write_stats(out);
}

int cmd_index(const index_flags& f, const std::string& corpus, const std::string& out_path) {
    if (!fs::is_directory(corpus)) throw cli_failure{exit_parse, corpus + " is not a directory"};
    const auto files = corpus_files(corpus);
    document_list docs;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        auto text = read_document(files[i]);
        if (text.empty()) throw cli_failure{exit_parse, files[i].string() + " is empty"};
        total += text.size() + 1;
        docs.emplace_back(i, std::move(text));
    }
    any_index index(to_params(f, total));
    for (auto& [id, text] : docs) index.insert(id, std::move(text));
    auto out = open_output(out_path);
    index.save(out);
    if (!out) throw cli_failure{exit_parse, "write error on " + out_path};
    for (std::size_t i = 0; i < files.size(); ++i) std::cout << "doc." << i << '=' << files[i].filename().string() << '\n';
    std::cout << "documents=" << index.document_count() << '\n' << "alive_symbols=" << index.alive_symbols() << '\n';
    return 0;
}

void dump_reproducer(const std::vector<command>& script, std::size_t upto, const std::string& why) {
    std::cerr << "verification failed at line " << script[upto].line << ": " << why << '\n';
    std::cerr << "reproducer (script lines 1.." << script[upto].line << "):\n";
    for (std::size_t i = 0; i <= upto; ++i) {
        const auto& c = script[i];
        const char* word = c.kind == command_kind::insert  ? "INSERT"
                           : c.kind == command_kind::erase ? "DELETE"
                           : c.kind == command_kind::query ? "QUERY"
                                                           : "COUNT";
        std::cerr << "  " << word << ' ' << c.arg << '\n';
    }
}

int cmd_replay(const index_flags& f, const std::string& script_path, const std::string& snapshot, bool verify,
               const std::string& stats_out, const std::string& save_path) {
    auto script_in = open_input(script_path);
    std::vector<command> script;
    try {
        script = parse_script(script_in);
    } catch (const parse_error& e) {
        throw cli_failure{exit_parse, script_path + ": " + e.what()};
    }

    std::optional<any_index> index;
    if (!snapshot.empty()) {
        auto in = open_input(snapshot, true);
        try {
            index.emplace(any_index::load(in));
        } catch (const std::exception& e) {
            throw cli_failure{exit_parse, snapshot + ": " + e.what()};
        }
    } else {
        index.emplace(to_params(f));
    }

    oracle::naive_collection naive;
    doc_id next_id = 0;
    for (auto& [id, text] : index->documents()) {
        next_id = std::max(next_id, id + 1);
        if (verify) naive.insert(id, text);
    }

    const fs::path base = fs::path(script_path).parent_path();
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto& c = script[i];
        const auto where = script_path + ": line " + std::to_string(c.line) + ": ";
        switch (c.kind) {
            case command_kind::insert: {
                fs::path doc = c.arg;
                if (doc.is_relative()) doc = base / doc;
                std::vector<symbol> text;
                try {
                    text = read_document(doc);
                } catch (const std::exception& e) {
                    throw cli_failure{exit_parse, where + e.what()};
                }
                if (text.empty()) throw cli_failure{exit_parse, where + doc.string() + " is empty"};
                if (verify) naive.insert(next_id, text);
                index->insert(next_id++, std::move(text));
                break;
            }
            case command_kind::erase: {
                const auto id = parse_doc_id(c);
                if (!index->contains(id)) throw cli_failure{exit_parse, where + "unknown docId " + c.arg};
                index->erase(id);
                if (verify) naive.erase(id);
                break;
            }
            case command_kind::query: {
                const auto pattern = bytes_to_symbols(c.arg);
                auto hits = index->query(pattern);
                std::sort(hits.begin(), hits.end());
                if (verify) {
                    occurrence_list want;
                    for (const auto& [d, off] : naive.occurrences(pattern)) want.push_back({d, off});
                    if (hits != want) {
                        dump_reproducer(script, i, "got {" + format_hits(hits) + "}, expected {" + format_hits(want) + "}");
                        return exit_verify;
                    }
                }
                std::cout << format_hits(hits) << '\n';
                break;
            }
            case command_kind::count: {
                const auto pattern = bytes_to_symbols(c.arg);
                const auto n = index->count(pattern);
                if (verify) {
                    const auto want = naive.occurrences(pattern).size();
                    if (n != want) {
                        dump_reproducer(script, i, "got " + std::to_string(n) + ", expected " + std::to_string(want));
                        return exit_verify;
                    }
                }
                std::cout << n << '\n';
                break;
            }
        }
    }
    if (!stats_out.empty()) write_stats_file(stats_out, *index);
    if (!save_path.empty()) {
        auto out = open_output(save_path);
        index->save(out);
    }
    return 0;
}

std::string join(const auto& values) {
    std::string s;
    for (const auto v : values) {
        if (!s.empty()) s += ' ';
        s += std::to_string(v);
    }
    return s;
}

int cmd_graph(const index_flags& f, const std::string& edges_path, bool verify, const std::string& stats_out) {
    auto in = open_input(edges_path);
    std::vector<edge_command> edges;
    try {
        edges = parse_edges(in);
    } catch (const parse_error& e) {
        throw cli_failure{exit_parse, edges_path + ": " + e.what()};
    }
    relation_options o;
    o.epsilon = f.epsilon;
    o.tau = f.tau;
    o.seed = f.seed;
    directed_graph g(o);
    oracle::naive_graph naive;

    for (const auto& c : edges) {
        std::string got, want;
        switch (c.kind) {
            case edge_kind::add:
                if (!g.has_edge(c.u, c.v)) g.add_edge(c.u, c.v);
                naive.add_edge(c.u, c.v);
                continue;
            case edge_kind::remove:
                if (g.has_edge(c.u, c.v)) g.remove_edge(c.u, c.v);
                naive.remove_edge(c.u, c.v);
                continue;
            case edge_kind::out:
                got = join(g.out_neighbors(c.u));
                if (verify) want = join(naive.out_neighbors(c.u));
                break;
            case edge_kind::in:
                got = join(g.in_neighbors(c.u));
                if (verify) want = join(naive.in_neighbors(c.u));
                break;
            case edge_kind::has:
                got = g.has_edge(c.u, c.v) ? "1" : "0";
                if (verify) want = naive.has_edge(c.u, c.v) ? "1" : "0";
                break;
            case edge_kind::outdeg:
                got = std::to_string(g.out_degree(c.u));
                if (verify) want = std::to_string(naive.out_degree(c.u));
                break;
            case edge_kind::indeg:
                got = std::to_string(g.in_degree(c.u));
                if (verify) want = std::to_string(naive.in_degree(c.u));
                break;
        }
        if (verify && got != want) {
            std::cerr << "verification failed at line " << c.line << ": got {" << got << "}, expected {" << want
                      << "}\nreproducer: lines 1.." << c.line << " of " << edges_path << '\n';
            return exit_verify;
        }
        std::cout << got << '\n';
    }
    if (!stats_out.empty()) {
        auto out = open_output(stats_out);
        const auto s = g.relation().stats();
        out << "edges=" << s.pairs << '\n'
            << "sources=" << s.objects << '\n'
            << "targets=" << s.labels << '\n'
            << "label_slots=" << s.label_slots << '\n'
            << "blocks=" << s.blocks << '\n'
            << "block_bits=" << s.block_bits << '\n'
            << "list_bits=" << s.list_bits << '\n';
    }
    return 0;
}

int cmd_fuzz(const fuzz_options& o) {
    const auto r = run_fuzz(o);
    std::cout << "mode=" << mode_name(o.mode) << '\n'
              << "seed=" << o.seed << '\n'
              << "ops=" << r.ops << '\n'
              << "queries=" << r.queries << '\n'
              << "result=" << (r.passed ? "PASS" : "FAIL") << '\n';
    if (r.passed) return 0;
    std::cout << "failure=" << r.message << '\n' << "reproducer_ops=" << r.reproducer.size() << '\n';
    for (const auto& op : r.reproducer) std::cout << "  " << describe(op) << '\n';
    return exit_verify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed dynamic document index and graph tool"};
    app.require_subcommand(1);

    index_flags index_f;
    std::string corpus, out_path;
    auto* index_cmd = app.add_subcommand("index", "Build an index snapshot from a directory of documents");
    add_index_flags(index_cmd, index_f);
    index_cmd->add_option("corpus", corpus, "directory of documents, indexed in file-name order")->required();
    index_cmd->add_option("-o,--out", out_path, "snapshot file")->required();

    index_flags replay_f;
    std::string script, snapshot, stats_out, save_path;
    bool verify = false;
    auto* replay_cmd = app.add_subcommand("replay", "Run a workload script against a snapshot or a fresh index");
    add_index_flags(replay_cmd, replay_f);
    replay_cmd->add_option("script", script, "workload script")->required();
    replay_cmd->add_option("--snapshot", snapshot, "start from this snapshot instead of an empty index");
    replay_cmd->add_flag("--verify-oracle", verify, "check every result against a brute-force scan");
    replay_cmd->add_option("--stats-out", stats_out, "write a key=value stats report here");
    replay_cmd->add_option("--save", save_path, "write the final index snapshot here");

    index_flags graph_f;
    std::string edges_path, graph_stats;
    bool graph_verify = false;
    auto* graph_cmd = app.add_subcommand("graph", "Run an edge stream against a dynamic directed graph");
    graph_cmd->add_option("edges", edges_path, "edge-stream file")->required();
    graph_cmd->add_flag("--verify-oracle", graph_verify, "check every result against adjacency sets");
    graph_cmd->add_option("--epsilon", graph_f.epsilon, "level growth exponent")->check(CLI::Range(0.05, 1.0));
    graph_cmd->add_option("--tau", graph_f.tau, "deletion granularity, 0 for ceil(log log n)");
    graph_cmd->add_option("--seed", graph_f.seed, "random seed");
    graph_cmd->add_option("--stats-out", graph_stats, "write a key=value stats report here");

    fuzz_options fuzz;
    std::string fuzz_mode = "amortized";
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Random oracle-checked session");
    fuzz_cmd->add_option("--ops", fuzz.ops, "number of operations");
    fuzz_cmd->add_option("--seed", fuzz.seed, "random seed");
    fuzz_cmd->add_option("--mode", fuzz_mode, "amortized, worstcase or amortized-loglog")
        ->check(CLI::IsMember({"amortized", "worstcase", "amortized-loglog"}));
    fuzz_cmd->add_option("--doc-len", fuzz.doc_len, "maximum document length")->check(CLI::PositiveNumber);
    fuzz_cmd->add_option("--alphabet", fuzz.alphabet, "number of distinct symbols")->check(CLI::Range(1u, 256u));
    fuzz_cmd->add_option("--epsilon", fuzz.epsilon, "level growth exponent")->check(CLI::Range(0.05, 1.0));
    fuzz_cmd->add_option("--tau", fuzz.tau, "deletion granularity, 0 for ceil(log log n)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (*index_cmd) return cmd_index(index_f, corpus, out_path);
        if (*replay_cmd) return cmd_replay(replay_f, script, snapshot, verify, stats_out, save_path);
        if (*graph_cmd) return cmd_graph(graph_f, edges_path, graph_verify, graph_stats);
        fuzz.mode = *parse_mode(fuzz_mode);
        return cmd_fuzz(fuzz);
    } catch (const cli_failure& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_parse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_parse;
    }
}
