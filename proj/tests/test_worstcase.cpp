#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dyndex/oracle.hpp"
#include "dyndex/routing.hpp"
#include "dyndex/top_scheduler.hpp"
#include "dyndex/worstcase_index.hpp"
#include "support.hpp"

using namespace dyndex;
using test_support::as_set;
using test_support::sym;

using caps_t = std::vector<std::uint64_t>;
using kind = holder_info::kind;

namespace {

std::size_t count_role(const worstcase_index& idx, kind k) {
    std::size_t c = 0;
    for (const auto& h : idx.engine().holders()) c += h.role == k;
    return c;
}

/// Structural bounds that must hold after every update; empty when fine.
std::string check_bounds(const worstcase_index& idx) {
    const auto& e = idx.engine();
    std::uint64_t alive = 0;
    for (const auto& h : e.holders()) {
        alive += h.alive_symbols;
        if (h.role == kind::top && static_cast<double>(h.m) > e.top_deletion_bound()) return "top counter over bound";
        if (h.role == kind::level && 2 * h.deleted_symbols >= e.layout().caps[h.slot]) return "level half deleted";
        if (h.role == kind::level && h.alive_symbols + h.deleted_symbols > e.layout().caps[h.slot]) return "level over cap";
        if (h.role == kind::temp && h.items > 1) return "temp holds several items";
    }
    if (alive != e.size()) return "holder sizes do not add up";
    if (e.size() >= 2 * e.nf()) return "nf too small";
    if (e.nf() > 64 && 2 * e.size() <= e.nf()) return "nf too large";
    return idx.validate();
}

}  // namespace

TEST_CASE("routing rules") {
    const caps_t caps{8, 16, 32};
    // nf / tau = 100: an item of 150 symbols gets its own top.
    CHECK(route_item(caps_t{0, 0, 0}, caps, 150, 400, 4).action == staged_action::single_top);
    CHECK(route_item(caps_t{2, 0, 0}, caps, 5, 1000, 4).action == staged_action::tree);

    // 10+6+5 > 16, then 0+10+5 <= 32 and 5 < 16/2: lock C_1.
    auto r = route_item(caps_t{6, 10, 0}, caps, 5, 1000, 4);
    CHECK(r.action == staged_action::lock);
    CHECK(r.level == 1);
    // 9 >= 16/2: build C_2 at once.
    r = route_item(caps_t{6, 10, 0}, caps, 9, 1000, 4);
    CHECK(r.action == staged_action::immediate);
    CHECK(r.level == 1);
    r = route_item(caps_t{8, 16, 30}, caps, 5, 1000, 4);
    CHECK(r.action == staged_action::lock_last);
    CHECK(r.level == 2);
}

TEST_CASE("purge rounds and top packing") {
    // tau = 4, log tau = 2, nf = 1600.
    CHECK(purge_round_length(1600, 4) == 100);
    CHECK(purge_round_length(10, 16) == 1);

    // 30 alive symbols against nf / 2tau = 200: joins a top.
    CHECK_FALSE(locked_top_stands_alone(30, 1600, 4));
    CHECK(locked_top_stands_alone(200, 1600, 4));
    // 380 + 30 symbols stay under 2nf / tau = 800: one top.
    caps_t sizes(41, 10);
    auto groups = pack_tops(sizes, 1600, 4);
    CHECK(groups.size() == 1);
    CHECK(groups[0].items.size() == 41);

    // Big items stand alone; a short tail joins the previous group.
    groups = pack_tops(caps_t{500, 300, 300, 300, 10}, 1600, 4);
    REQUIRE(groups.size() == 3);
    CHECK(groups[0].single);
    CHECK(groups[0].items == std::vector<std::size_t>{0});
    CHECK(groups[1].items == std::vector<std::size_t>{1, 2});
    CHECK(groups[2].items == std::vector<std::size_t>{3, 4});
    CHECK_FALSE(groups[2].single);
}

TEST_CASE("staged layout follows its formula") {
    for (const std::uint64_t n : {1ull << 12, 1ull << 16, 1ull << 20}) {
        for (const unsigned tau : {2u, 4u, 8u}) {
            const auto l = level_layout::staged(n, 0.5, tau);
            const double lg = std::log2(static_cast<double>(n));
            const auto top = static_cast<std::uint64_t>(2.0 * static_cast<double>(n) / tau);
            CHECK(l.caps.back() == top);
            for (std::size_t i = 0; i + 1 < l.caps.size(); ++i) {
                const double want = 2.0 * static_cast<double>(n) / std::pow(lg, 2.0 - 0.5 * static_cast<double>(i));
                CHECK(l.caps[i] == static_cast<std::uint64_t>(want));
                CHECK(want < static_cast<double>(top));
            }
            // Doubling n doubles the top cap exactly.
            CHECK(level_layout::staged(2 * n, 0.5, tau).caps.back() == 2 * top);
        }
    }
}

TEST_CASE("scheduler rounds") {
    top_purge_scheduler s(10);
    s.add_top(1);
    s.add_top(2);
    int rounds = 0;
    s.record(1, 25, [&] { ++rounds; });
    CHECK(rounds == 2);
    CHECK(s.m(1) == 25);
    CHECK(s.progress() == 5);
    s.record(std::nullopt, 5, [&] { ++rounds; });
    CHECK(rounds == 3);
    s.record(2, 3, [] {});
    CHECK(s.argmax([](std::uint64_t) { return true; }) == std::optional<std::uint64_t>{1});
    CHECK(s.argmax([](std::uint64_t k) { return k == 2; }) == std::optional<std::uint64_t>{2});
    s.reset(1);
    CHECK(s.m(1) == 0);
    s.set_delta(2);
    CHECK(s.progress() == 0);
}

TEST_CASE("largest-counter scheduling keeps every counter bounded") {
    std::uint64_t rounds = 0;
    for (const unsigned tau : {2u, 3u, 4u, 8u}) {
        for (const std::uint64_t delta : {1ull, 4ull, 16ull}) {
            for (const std::uint64_t g : {std::uint64_t{2}, std::uint64_t{tau}, std::uint64_t{2} * tau}) {
                const auto t = simulate_top_scheduler(g, delta, 1'000'000 / 36 + 1, tau * 1000 + delta);
                CHECK(t.max_ratio <= 1.0 + harmonic(2 * tau - 1) + 1.0);
                rounds += t.rounds;
            }
        }
    }
    CHECK(rounds >= 1'000'000);
}

TEST_CASE("a large document gets a top of its own") {
    worstcase_options o;
    o.tau = 2;
    worstcase_index idx(o);
    std::mt19937_64 rng(7);
    // nf starts at 64, so 40 symbols already reach nf / tau.
    idx.insert(1, test_support::random_text(rng, 40, 3));
    CHECK(count_role(idx, kind::top) == 1);
    CHECK(idx.engine().holders().back().single);
    idx.insert(2, sym("abc"));
    idx.erase(1);
    CHECK(count_role(idx, kind::top) == 0);
    CHECK(as_set(idx.query(sym("b"))) == test_support::hit_set{{2, 1}});
    CHECK_THROWS_AS(idx.erase(1), std::out_of_range);
    CHECK_THROWS_AS(idx.insert(2, sym("x")), std::invalid_argument);
    CHECK_THROWS_AS(idx.insert(3, {}), std::invalid_argument);
}

TEST_CASE("queries stay exact while rebuilds are pending") {
    std::mt19937_64 rng(61);
    std::uint64_t pending_checks = 0;
    for (const unsigned sigma : {2u, 4u, 26u, 256u}) {
        worstcase_options o;
        o.seed = rng();
        o.expected_size = sigma == 26 ? 100000 : 0;
        worstcase_index idx(o);
        CHECK(idx.query(sym("a")).empty());
        CHECK(idx.count(sym("a")) == 0);
        oracle::naive_collection naive;
        doc_id next = 0;
        for (int step = 0; step < 2500; ++step) {
            const auto roll = rng() % 10;
            if (naive.documents().empty() || roll < 4) {
                const auto len = 1 + rng() % (rng() % 10 == 0 ? 500 : 60);
                const auto text = test_support::random_text(rng, len, sigma);
                idx.insert(next, text);
                naive.insert(next++, text);
            } else if (roll < 6) {
                const auto victim = std::next(naive.documents().begin(),
                                              static_cast<std::ptrdiff_t>(rng() % naive.documents().size()))->first;
                idx.erase(victim);
                naive.erase(victim);
            } else {
                const auto p = test_support::random_pattern(rng, naive.documents(), sigma);
                const auto got = idx.query(p);
                const auto want = naive.occurrences(p);
                CHECK(as_set(got) == want);
                CHECK(got.size() == want.size());
                CHECK(idx.count(p) == want.size());
                pending_checks += idx.engine().pending_jobs() > 0;
            }
            const auto problem = check_bounds(idx);
            REQUIRE_MESSAGE(problem.empty(), "step " << step << ": " << problem);
        }
        const auto& w = idx.engine().work();
        CHECK(w.relock_conflicts == 0);
        CHECK(w.forced_completions == 0);
        CHECK(w.max_normalized_work <= 8.0);

        std::stringstream buf;
        idx.save(buf);
        CHECK(idx.engine().pending_jobs() == 0);
        const auto back = worstcase_index::load(buf);
        CHECK(back.validate().empty());
        CHECK(back.documents() == idx.documents());
        CHECK(back.engine().nf() == idx.engine().nf());
    }
    CHECK(pending_checks > 100);
}

TEST_CASE("deleting a huge document relayouts and stays exact") {
    worstcase_options o;
    o.tau = 4;
    worstcase_index idx(o);
    oracle::naive_collection naive;
    std::mt19937_64 rng(62);
    for (doc_id k = 0; k < 200; ++k) {
        const auto text = test_support::random_text(rng, 1 + rng() % 30, 4);
        idx.insert(k, text);
        naive.insert(k, text);
    }
    const auto giant = test_support::random_text(rng, 20000, 4);
    idx.insert(1000, giant);
    naive.insert(1000, giant);
    const auto nf_before = idx.engine().nf();
    idx.erase(1000);
    naive.erase(1000);
    CHECK(idx.engine().nf() < nf_before);
    CHECK(check_bounds(idx).empty());
    for (int q = 0; q < 100; ++q) {
        const auto p = test_support::random_pattern(rng, naive.documents(), 4);
        CHECK(as_set(idx.query(p)) == naive.occurrences(p));
    }
    idx.settle();
    CHECK(idx.engine().pending_jobs() == 0);
    CHECK(check_bounds(idx).empty());
}
