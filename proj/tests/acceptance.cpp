// Acceptance gate: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dyndex/amortized_index.hpp"
#include "dyndex/bit_reporting.hpp"
#include "dyndex/oracle.hpp"
#include "dyndex/relation.hpp"
#include "dyndex/static_index.hpp"
#include "dyndex/worstcase_index.hpp"

using namespace dyndex;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

/// Collects the first few failure descriptions and counts the rest.
struct tally {
    std::uint64_t checks = 0;
    std::uint64_t failures = 0;
    std::string first;

    void expect(bool ok, const std::function<std::string()>& what) {
        ++checks;
        if (ok) return;
        if (failures++ == 0) first = what();
    }
};

struct verdict {
    bool pass;
    std::string detail;
};

std::vector<symbol> random_text(std::mt19937_64& rng, std::size_t len, unsigned sigma) {
    std::vector<symbol> t(len);
    for (auto& c : t) c = 1 + static_cast<symbol>(rng() % sigma);
    return t;
}

std::vector<oracle::hit> sorted_hits(const occurrence_list& hits) {
    std::vector<oracle::hit> out;
    out.reserve(hits.size());
    for (const auto& h : hits) out.emplace_back(h.doc, h.offset);
    std::sort(out.begin(), out.end());
    return out;
}

// ------------------------------------------------------------------ documents

struct document_totals {
    std::uint64_t sessions = 0;
    std::uint64_t queries = 0;
    tally oracle;          // criterion 1
    tally deleted;         // criterion 4
    tally work;            // criterion 5
    tally amortized_work;  // criterion 6
    tally overhead;        // criterion 7
    tally counting;        // criterion 8
    double max_top_ratio = 0;
    double max_level_ratio = 0;
    double max_work_ratio = 0;
    double max_build_ratio[2] = {0, 0};
    double max_overhead_ratio = 0;
    double seconds = 0;
};

void check_holders(const worstcase_index& idx, document_totals& t, std::size_t session, std::size_t op) {
    const auto& e = idx.engine();
    const double top_bound = e.top_deletion_bound();
    for (const auto& h : e.holders()) {
        if (h.role == holder_info::kind::top) {
            const double m = static_cast<double>(h.m);
            t.max_top_ratio = std::max(t.max_top_ratio, m / top_bound);
            t.deleted.expect(m <= top_bound, [&] {
                return "session " + std::to_string(session) + " op " + std::to_string(op) + ": top m=" +
                       std::to_string(h.m) + " over " + std::to_string(top_bound);
            });
        } else if (h.role == holder_info::kind::level) {
            const double cap = static_cast<double>(e.layout().caps[h.slot]);
            const double bound = cap / 2 + 1;
            t.max_level_ratio = std::max(t.max_level_ratio, static_cast<double>(h.deleted_symbols) / bound);
            t.deleted.expect(static_cast<double>(h.deleted_symbols) <= bound, [&] {
                return "session " + std::to_string(session) + " op " + std::to_string(op) + ": level " +
                       std::to_string(h.slot) + " holds " + std::to_string(h.deleted_symbols) + " deleted";
            });
        }
    }
}

void check_update_work(const worstcase_index& idx, document_totals& t, std::size_t session, std::size_t op) {
    const auto& e = idx.engine();
    const auto& w = e.work();
    const double ratio = static_cast<double>(w.last_update_work) /
                         static_cast<double>(std::max<std::uint64_t>(w.last_update_size, 1));
    const double bound = 8.0 * std::pow(e.layout().log_n, 0.5) * static_cast<double>(e.layout().r() + 1);
    t.max_work_ratio = std::max(t.max_work_ratio, ratio / bound);
    t.work.expect(ratio <= bound, [&] {
        return "session " + std::to_string(session) + " op " + std::to_string(op) + ": work ratio " +
               std::to_string(ratio) + " over " + std::to_string(bound);
    });
}

double overhead_bound(std::uint64_t n, unsigned sigma, unsigned tau) {
    return 8.0 * static_cast<double>(n) * (std::log2(static_cast<double>(sigma)) + std::log2(static_cast<double>(tau))) /
           static_cast<double>(tau);
}

void document_session(std::size_t session, std::uint64_t seed, document_totals& t) {
    static constexpr unsigned sigmas[] = {2, 4, 26, 256};
    std::mt19937_64 rng(seed);
    const unsigned sigma = sigmas[session % 4];
    const std::uint64_t symbol_cap = 2000 + rng() % 18000;
    const std::size_t ops = 1000 + rng() % 1000;
    const bool loglog = session % 2 == 1;

    amortized_options ao;
    ao.mode = loglog ? level_mode::loglog_levels : level_mode::constant_levels;
    ao.seed = rng();
    amortized_index amortized(ao);
    worstcase_options wo;
    wo.seed = rng();
    wo.expected_size = symbol_cap;
    worstcase_index worstcase(wo);
    oracle::naive_collection naive;

    std::vector<doc_id> live;
    doc_id next = 0;
    std::uint64_t inserted = 0, n_max = 0;
    const auto tag = [&](std::size_t op) { return "session " + std::to_string(session) + " op " + std::to_string(op); };

    for (std::size_t op = 0; op < ops; ++op) {
        const auto roll = rng() % 100;
        const bool full = naive.total_symbols() >= symbol_cap;
        if (live.empty() || (roll < 40 && !full)) {
            const auto len = 1 + rng() % (rng() % 20 == 0 ? 600 : 60);
            const auto text = random_text(rng, len, sigma);
            amortized.insert(next, text);
            worstcase.insert(next, text);
            naive.insert(next, text);
            live.push_back(next++);
            inserted += len + 1;
        } else if (roll < 60 || full) {
            const auto k = rng() % live.size();
            amortized.erase(live[k]);
            worstcase.erase(live[k]);
            naive.erase(live[k]);
            live[k] = live.back();
            live.pop_back();
        } else {
            std::vector<symbol> pattern;
            if (rng() % 10 < 7) {
                const auto& text = naive.document(live[rng() % live.size()]);
                const std::size_t min_len = sigma <= 4 ? std::min<std::size_t>(text.size(), 4) : 1;
                const auto len = min_len + rng() % (std::min<std::size_t>(text.size(), 12) - min_len + 1);
                const auto from = rng() % (text.size() - len + 1);
                pattern.assign(text.begin() + static_cast<std::ptrdiff_t>(from),
                               text.begin() + static_cast<std::ptrdiff_t>(from + len));
            } else {
                pattern = random_text(rng, 1 + rng() % 8, sigma);
            }
            const auto want_set = naive.occurrences(pattern);
            const std::vector<oracle::hit> want(want_set.begin(), want_set.end());
            const auto got_a = amortized.query(pattern);
            const auto got_w = worstcase.query(pattern);
            t.oracle.expect(sorted_hits(got_a) == want, [&] { return tag(op) + ": amortized query differs"; });
            t.oracle.expect(sorted_hits(got_w) == want, [&] { return tag(op) + ": worst-case query differs"; });
            const auto count_a = amortized.count(pattern);
            const auto count_w = worstcase.count(pattern);
            t.oracle.expect(count_a == want.size() && count_w == want.size(),
                            [&] { return tag(op) + ": count differs from the oracle"; });
            t.counting.expect(count_a == got_a.size() && count_w == got_w.size(),
                              [&] { return tag(op) + ": count differs from the reported list"; });
            ++t.queries;
            continue;
        }
        n_max = std::max(n_max, naive.total_symbols());
        check_holders(worstcase, t, session, op);
        check_update_work(worstcase, t, session, op);
    }

    const auto& w = worstcase.engine().work();
    t.work.expect(w.relock_conflicts == 0 && w.forced_completions == 0, [&] {
        return "session " + std::to_string(session) + ": " + std::to_string(w.relock_conflicts) + " relock conflicts, " +
               std::to_string(w.forced_completions) + " forced completions";
    });

    const auto stats = amortized.stats();
    const double lg = std::log2(static_cast<double>(std::max<std::uint64_t>(n_max, 4)));
    const double factor = loglog ? 8.0 * std::log2(lg) : 8.0 * (1.0 / ao.epsilon) * std::pow(lg, ao.epsilon);
    const double build_bound = factor * static_cast<double>(inserted);
    auto& build_max = t.max_build_ratio[loglog ? 1 : 0];
    build_max = std::max(build_max, static_cast<double>(stats.build_symbols) / build_bound);
    t.amortized_work.expect(static_cast<double>(stats.build_symbols) <= build_bound, [&] {
        return "session " + std::to_string(session) + ": " + std::to_string(stats.build_symbols) +
               " build symbols over " + std::to_string(build_bound);
    });

    // At rest: pending rebuilds finished, tau = ceil(log log n).
    worstcase.settle();
    const auto n = naive.total_symbols();
    const std::tuple<const char*, std::uint64_t, unsigned> measured[] = {
        {"amortized", amortized.deletion_overhead_bits(), amortized.tau()},
        {"worst-case", worstcase.deletion_overhead_bits(), worstcase.engine().tau()}};
    for (const auto& [name, bits, tau] : measured) {
        const double bound = overhead_bound(n, sigma, tau);
        if (bound > 0) t.max_overhead_ratio = std::max(t.max_overhead_ratio, static_cast<double>(bits) / bound);
        t.overhead.expect(static_cast<double>(bits) <= bound, [&] {
            return "session " + std::to_string(session) + ": " + name + " overhead " + std::to_string(bits) + " bits over " +
                   std::to_string(bound) + " (n=" + std::to_string(n) + ", tau=" + std::to_string(tau) + ")";
        });
    }
    ++t.sessions;
}

document_totals run_document_sessions() {
    document_totals t;
    const auto t0 = clock_type::now();
    std::mt19937_64 seeds(20240601);
    for (std::size_t s = 0; s < 200; ++s) document_session(s, seeds(), t);
    t.seconds = seconds_since(t0);
    return t;
}

// ------------------------------------------------------------------ relations

struct relation_totals {
    std::uint64_t sessions = 0;
    std::uint64_t queries = 0;
    tally oracle;
    tally counting;
    double seconds = 0;
};

template <class A, class B>
bool same_set(const std::vector<A>& got, const std::set<B>& want) {
    if (got.size() != want.size()) return false;
    std::vector<A> sorted(got);
    std::sort(sorted.begin(), sorted.end());
    return std::equal(sorted.begin(), sorted.end(), want.begin(),
                      [](const A& a, const B& b) { return static_cast<std::uint64_t>(a) == b; });
}

void relation_session(std::size_t session, std::uint64_t seed, relation_totals& t) {
    std::mt19937_64 rng(seed);
    relation_options o;
    o.seed = rng();
    if (session % 2) o.expected_pairs = 10000;
    dynamic_relation rel(o);
    oracle::naive_relation naive;
    const auto objects = 1 + rng() % 2000, labels = 1 + rng() % 2000;
    std::vector<std::pair<object_id, std::uint64_t>> alive;
    const auto tag = [&](int op) { return "relation session " + std::to_string(session) + " op " + std::to_string(op); };
    for (int op = 0; op < 10000; ++op) {
        const auto roll = rng() % 10;
        const auto a = static_cast<object_id>(rng() % objects);
        const auto b = rng() % labels;
        if (roll < 5) {
            if (naive.add(a, b)) {
                rel.add(a, b);
                alive.emplace_back(a, b);
            }
        } else if (roll < 8 && !alive.empty()) {
            const auto k = rng() % alive.size();
            rel.remove(alive[k].first, alive[k].second);
            naive.remove(alive[k].first, alive[k].second);
            alive[k] = alive.back();
            alive.pop_back();
        } else {
            const auto got_labels = rel.labels_of(a);
            const auto got_objects = rel.objects_of(b);
            const auto want_labels = naive.labels_of(a);
            const auto want_objects = naive.objects_of(b);
            t.oracle.expect(same_set(got_labels, want_labels), [&] { return tag(op) + ": labels_of differs"; });
            t.oracle.expect(same_set(got_objects, want_objects), [&] { return tag(op) + ": objects_of differs"; });
            t.oracle.expect(rel.related(a, b) == naive.related(a, b), [&] { return tag(op) + ": related differs"; });
            const auto cl = rel.count_labels(a), co = rel.count_objects(b);
            t.oracle.expect(cl == want_labels.size() && co == want_objects.size(),
                            [&] { return tag(op) + ": counts differ from the oracle"; });
            t.counting.expect(cl == got_labels.size() && co == got_objects.size(),
                              [&] { return tag(op) + ": counts differ from the reported lists"; });
            t.queries += 2;
        }
    }
    ++t.sessions;
}

void graph_session(std::size_t session, std::uint64_t seed, relation_totals& t) {
    std::mt19937_64 rng(seed);
    relation_options o;
    o.seed = rng();
    directed_graph g(o);
    oracle::naive_graph naive;
    const auto nodes = 2 + rng() % 1999;
    std::vector<std::pair<object_id, object_id>> edges;
    const auto tag = [&](int op) { return "graph session " + std::to_string(session) + " op " + std::to_string(op); };
    for (int op = 0; op < 10000; ++op) {
        const auto roll = rng() % 10;
        const auto u = static_cast<object_id>(rng() % nodes), v = static_cast<object_id>(rng() % nodes);
        if (roll < 5) {
            if (naive.add_edge(u, v)) {
                g.add_edge(u, v);
                edges.emplace_back(u, v);
            }
        } else if (roll < 8 && !edges.empty()) {
            const auto k = rng() % edges.size();
            g.remove_edge(edges[k].first, edges[k].second);
            naive.remove_edge(edges[k].first, edges[k].second);
            edges[k] = edges.back();
            edges.pop_back();
        } else {
            const auto out = g.out_neighbors(u);
            const auto in = g.in_neighbors(v);
            const auto want_out = naive.out_neighbors(u);
            const auto want_in = naive.in_neighbors(v);
            t.oracle.expect(same_set(out, want_out), [&] { return tag(op) + ": out_neighbors differs"; });
            t.oracle.expect(same_set(in, want_in), [&] { return tag(op) + ": in_neighbors differs"; });
            t.oracle.expect(g.has_edge(u, v) == naive.has_edge(u, v), [&] { return tag(op) + ": has_edge differs"; });
            const auto od = g.out_degree(u), id = g.in_degree(v);
            t.oracle.expect(od == want_out.size() && id == want_in.size(),
                            [&] { return tag(op) + ": degrees differ from the oracle"; });
            t.counting.expect(od == out.size() && id == in.size(),
                              [&] { return tag(op) + ": degrees differ from the reported lists"; });
            t.queries += 2;
        }
    }
    ++t.sessions;
}

relation_totals run_relation_sessions() {
    relation_totals t;
    const auto t0 = clock_type::now();
    std::mt19937_64 seeds(20240602);
    for (std::size_t s = 0; s < 50; ++s) relation_session(s, seeds(), t);
    for (std::size_t s = 0; s < 50; ++s) graph_session(s, seeds(), t);
    t.seconds = seconds_since(t0);
    return t;
}

// ------------------------------------------------------------- bit reporting

verdict criterion_3() {
    const auto t0 = clock_type::now();
    constexpr std::size_t n = std::size_t{1} << 20;
    std::mt19937_64 rng(20240603);
    tally result;
    std::ostringstream sizes;
    for (const unsigned tau : {4u, 16u, 64u}) {
        const std::size_t clear = n / (2 * tau);
        compact_report_bit_vector v(n, tau, clear);
        std::vector<bool> naive(n, true);
        std::size_t cleared = 0;
        while (cleared < clear) {
            const auto i = rng() % n;
            if (!naive[i]) continue;
            naive[i] = false;
            v.zero(i);
            ++cleared;
        }
        const auto space = v.space();
        const double bound = 4.0 * (static_cast<double>(n) / tau) * (std::log2(static_cast<double>(tau)) + 2) +
                             static_cast<double>(space.summary_bits);
        result.expect(static_cast<double>(space.total_bits) <= bound, [&] {
            return "tau " + std::to_string(tau) + ": " + std::to_string(space.total_bits) + " bits over " +
                   std::to_string(bound);
        });
        sizes << " tau" << tau << "=" << space.total_bits << "/" << static_cast<std::uint64_t>(bound);
        for (int q = 0; q < 1000; ++q) {
            auto s = rng() % n, e = rng() % n;
            if (q % 2 == 0) e = std::min(n - 1, s + rng() % 4096);
            if (s > e) std::swap(s, e);
            std::vector<std::size_t> want;
            for (auto i = s; i <= e; ++i)
                if (naive[i]) want.push_back(i);
            result.expect(v.report(s, e) == want, [&] {
                return "tau " + std::to_string(tau) + ": report [" + std::to_string(s) + ", " + std::to_string(e) +
                       "] differs";
            });
        }
    }
    const double secs = seconds_since(t0);
    result.expect(secs < 10, [&] { return "took " + std::to_string(secs) + " s"; });
    std::ostringstream d;
    d << "bits/bound" << sizes.str() << ", " << result.checks << " checks, " << secs << " s";
    if (result.failures) d << "; " << result.failures << " failures, first: " << result.first;
    return {result.failures == 0, d.str()};
}

// ------------------------------------------------------------------ static core

verdict criterion_9() {
    std::mt19937_64 rng(20240609);
    tally result;
    std::uint64_t queries = 0;
    for (int round = 0; round < 20; ++round) {
        const unsigned sigma = 1 + static_cast<unsigned>(rng() % 40);
        document_list docs;
        std::uint64_t total = 0;
        const std::uint64_t target = 100 + rng() % 9000;
        for (doc_id id = 0; total < target; ++id) {
            auto text = random_text(rng, 1 + rng() % 200, sigma);
            total += text.size() + 1;
            docs.emplace_back(id * 3 + 1, std::move(text));
        }
        const auto idx = static_index::build(docs);
        for (std::uint64_t i = 0; i < idx.size(); ++i) {
            const auto o = idx.locate_occurrence(i);
            result.expect(idx.suffix_rank(o.doc, o.offset) == i, [&] {
                return "collection " + std::to_string(round) + ": suffix_rank(locate(" + std::to_string(i) + ")) differs";
            });
        }
        for (int q = 0; q < 500; ++q) {
            std::vector<symbol> p;
            if (q % 2 == 0) {
                const auto& text = docs[rng() % docs.size()].second;
                const auto len = 1 + rng() % std::min<std::size_t>(text.size(), 30);
                const auto from = rng() % (text.size() - len + 1);
                p.assign(text.begin() + static_cast<std::ptrdiff_t>(from),
                         text.begin() + static_cast<std::ptrdiff_t>(from + len));
            } else {
                p = random_text(rng, 1 + rng() % 30, sigma + 1);
            }
            const auto r = idx.range_find(p);
            result.expect(r.steps == p.size(), [&] {
                return "collection " + std::to_string(round) + ": " + std::to_string(r.steps) + " steps for a pattern of " +
                       std::to_string(p.size());
            });
            ++queries;
        }
    }
    std::ostringstream d;
    d << "20 collections, " << queries << " patterns, " << result.checks << " checks";
    if (result.failures) d << "; " << result.failures << " failures, first: " << result.first;
    return {result.failures == 0, d.str()};
}

std::string failures_of(const tally& t) {
    if (t.failures == 0) return "";
    return "; " + std::to_string(t.failures) + " failures, first: " + t.first;
}

}  // namespace

int main() {
    std::vector<verdict> results(9);

    const auto docs = run_document_sessions();
    {
        std::ostringstream d;
        d << docs.sessions << " sessions x 2 transforms, " << docs.queries << " queries, " << docs.seconds << " s"
          << failures_of(docs.oracle);
        const bool fast = docs.seconds < 120;
        if (!fast) d << "; over the 120 s budget";
        results[0] = {docs.oracle.failures == 0 && fast, d.str()};
    }
    {
        std::ostringstream d;
        d << docs.deleted.checks << " checks, max top m/bound " << docs.max_top_ratio << ", max level deleted/bound "
          << docs.max_level_ratio << failures_of(docs.deleted);
        results[3] = {docs.deleted.failures == 0, d.str()};
    }
    {
        std::ostringstream d;
        d << docs.work.checks << " checks, max work/bound " << docs.max_work_ratio << failures_of(docs.work);
        results[4] = {docs.work.failures == 0, d.str()};
    }
    {
        std::ostringstream d;
        d << "max build/bound constant " << docs.max_build_ratio[0] << ", loglog " << docs.max_build_ratio[1]
          << failures_of(docs.amortized_work);
        results[5] = {docs.amortized_work.failures == 0, d.str()};
    }
    {
        std::ostringstream d;
        d << docs.overhead.checks << " checks, max overhead/bound " << docs.max_overhead_ratio << failures_of(docs.overhead);
        results[6] = {docs.overhead.failures == 0, d.str()};
    }

    const auto rels = run_relation_sessions();
    {
        std::ostringstream d;
        d << rels.sessions << " sessions, " << rels.queries << " queries, " << rels.seconds << " s" << failures_of(rels.oracle);
        const bool fast = rels.seconds < 60;
        if (!fast) d << "; over the 60 s budget";
        results[1] = {rels.oracle.failures == 0 && fast, d.str()};
    }
    {
        std::ostringstream d;
        const auto fails = docs.counting.failures + rels.counting.failures;
        d << docs.counting.checks + rels.counting.checks << " queries" << failures_of(docs.counting)
          << failures_of(rels.counting);
        results[7] = {fails == 0, d.str()};
    }

    results[2] = criterion_3();
    results[8] = criterion_9();

    bool all = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        std::printf("criterion %zu: %s %s\n", i + 1, results[i].pass ? "PASS" : "FAIL", results[i].detail.c_str());
        all = all && results[i].pass;
    }
    return all ? 0 : 1;
}
