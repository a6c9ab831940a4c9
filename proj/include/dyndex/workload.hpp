#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyndex/amortized_index.hpp"
#include "dyndex/static_index.hpp"
#include "dyndex/worstcase_index.hpp"

namespace dyndex::workload {

/// Malformed script or edge-stream line.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class command_kind { insert, erase, query, count };

/// One workload line. arg is the document path, the decimal docId, or the
/// raw pattern bytes.
struct command {
    command_kind kind;
    std::string arg;
    std::size_t line = 0;
};

/// Blank lines and lines starting with '#' are skipped.
std::vector<command> parse_script(std::istream& in);
/// Returns the id of a DELETE command.
doc_id parse_doc_id(const command& c);

enum class edge_kind { add, remove, out, in, has, outdeg, indeg };

struct edge_command {
    edge_kind kind;
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::size_t line = 0;
};

std::vector<edge_command> parse_edges(std::istream& in);

/// Byte b becomes symbol b + 1, keeping 0 free for the terminator.
std::vector<symbol> bytes_to_symbols(std::string_view bytes);
std::string symbols_to_bytes(std::span<const symbol> text);
/// Reads a whole file as raw bytes; throws std::runtime_error on I/O failure.
std::vector<symbol> read_document(const std::filesystem::path& path);
/// Regular files of dir in name order.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir);

/// Sorted "docId:offset" pairs separated by spaces.
std::string format_hits(occurrence_list hits);

enum class index_mode { amortized, amortized_loglog, worstcase };

std::optional<index_mode> parse_mode(std::string_view name);
std::string_view mode_name(index_mode m);

struct index_params {
    index_mode mode = index_mode::amortized;
    double epsilon = 0.5;
    unsigned tau = 0;
    std::uint64_t sample_rate = 0;
    std::uint64_t seed = 1;
    /// Only seeds the default tau of the worst-case mode.
    std::uint64_t expected_size = 0;
};

/// Either dynamic index behind one interface.
class any_index {
public:
    explicit any_index(const index_params& p);

    index_mode mode() const { return mode_; }
    void insert(doc_id id, std::vector<symbol> text);
    void erase(doc_id id);
    occurrence_list query(std::span<const symbol> pattern) const;
    std::uint64_t count(std::span<const symbol> pattern) const;
    bool contains(doc_id id) const;
    std::uint64_t alive_symbols() const;
    std::uint64_t document_count() const;
    document_list documents() const;
    std::string validate() const;

    /// Line-oriented key=value report.
    void write_stats(std::ostream& out) const;

    void save(std::ostream& out);
    /// Recognises either snapshot kind by its magic.
    static any_index load(std::istream& in);

    const amortized_index* amortized() const { return std::get_if<amortized_index>(&impl_); }
    const worstcase_index* worstcase() const { return std::get_if<worstcase_index>(&impl_); }

private:
    any_index(index_mode m, std::variant<amortized_index, worstcase_index> impl)
        : mode_(m), impl_(std::move(impl)) {}

    index_mode mode_;
    std::variant<amortized_index, worstcase_index> impl_;
};

/// One fuzz step. text holds the document for inserts and the pattern for queries.
struct fuzz_op {
    command_kind kind;
    doc_id id = 0;
    std::vector<symbol> text;
};

struct fuzz_options {
    std::uint64_t ops = 1000;
    std::uint64_t seed = 1;
    index_mode mode = index_mode::amortized;
    std::uint64_t doc_len = 64;
    unsigned alphabet = 4;
    double epsilon = 0.5;
    unsigned tau = 0;
};

/// Seeded random session: inserts, deletes of live ids, queries and counts,
/// with patterns cut from live documents about half the time.
std::vector<fuzz_op> generate_session(const fuzz_options& o);

/// Index of the first op whose result disagrees with the oracle, with a
/// description. Invalid ops (unknown deletes, duplicate inserts) are skipped.
struct mismatch {
    std::size_t op = 0;
    std::string message;
};
std::optional<mismatch> check_session(const std::vector<fuzz_op>& ops, const index_params& p);

struct fuzz_result {
    bool passed = true;
    std::uint64_t ops = 0;
    std::uint64_t queries = 0;
    std::string message;
    /// Shortest failing subsequence found, empty when passed.
    std::vector<fuzz_op> reproducer;
};

fuzz_result run_fuzz(const fuzz_options& o);

/// Shrinks a failing sequence by removing chunks while it still fails.
std::vector<fuzz_op> minimize(std::vector<fuzz_op> ops, const index_params& p);

/// Script-like rendering of an op: symbols are printed as numbers.
std::string describe(const fuzz_op& op);

}  // namespace dyndex::workload
