#include <random>
#include <sstream>

#include "doctest.h"
#include "dyndex/oracle.hpp"
#include "dyndex/semi_dynamic.hpp"
#include "support.hpp"

using namespace dyndex;
using test_support::as_set;
using test_support::hit_set;
using test_support::sym;

TEST_CASE("deleted documents disappear from results") {
    semi_dynamic_options o;
    o.tau = 2;
    semi_dynamic_index idx({{0, sym("abab")}, {1, sym("bb")}}, o);
    CHECK(as_set(idx.query(sym("b"))) == hit_set{{0, 1}, {0, 3}, {1, 0}, {1, 1}});
    CHECK(idx.delete_document(1) == purge_signal::none);
    CHECK(as_set(idx.query(sym("b"))) == hit_set{{0, 1}, {0, 3}});
    CHECK(idx.count(sym("b")) == 2);
    CHECK_THROWS_AS(idx.delete_document(1), std::out_of_range);
    CHECK_THROWS_AS(idx.delete_document(9), std::out_of_range);
}

TEST_CASE("deleting the only document empties the index") {
    semi_dynamic_index idx({{5, sym("hello")}});
    idx.delete_document(5);
    CHECK(idx.empty());
    CHECK(idx.query(sym("l")).empty());
    CHECK(idx.count(sym("l")) == 0);
}

TEST_CASE("purge fires once deletions exceed a tau-th of the symbols") {
    semi_dynamic_options o;
    o.tau = 4;
    // Sizes 6, 6, 7, 7, 7, 7: 40 symbols with terminators.
    semi_dynamic_index idx({{0, sym("aaaaa")}, {1, sym("bbbbb")}, {2, sym("abcabc")}, {3, sym("cbacba")},
                            {4, sym("aabbcc")}, {5, sym("ccbbaa")}},
                           o);
    REQUIRE(idx.total_symbols() == 40);
    CHECK(idx.delete_document(0) == purge_signal::none);
    CHECK(idx.deleted_symbols() == 6);
    CHECK(idx.delete_document(1) == purge_signal::rebuilt);
    CHECK(idx.deleted_symbols() == 0);
    CHECK(idx.total_symbols() == 28);
    CHECK(idx.marks().zeros() == 0);
    CHECK(idx.alive_ids() == std::vector<doc_id>{2, 3, 4, 5});
}

TEST_CASE("count needs the rank structure") {
    semi_dynamic_options o;
    o.counting = false;
    semi_dynamic_index idx({{0, sym("ab")}}, o);
    CHECK_THROWS_AS(idx.count(sym("a")), std::logic_error);
    CHECK(idx.query(sym("a")).size() == 1);
}

TEST_CASE("random deletions agree with the oracle") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 100; ++round) {
        const unsigned sigma = 1 + static_cast<unsigned>(rng() % 26);
        semi_dynamic_options o;
        o.tau = 2 + static_cast<unsigned>(rng() % 10);
        o.auto_purge = rng() % 4 != 0;
        document_list docs;
        oracle::naive_collection naive;
        const std::size_t count = 1 + rng() % 30;
        for (std::size_t k = 0; k < count; ++k) {
            docs.emplace_back(k * 3, test_support::random_text(rng, 1 + rng() % 80, sigma));
            naive.insert(k * 3, docs.back().second);
        }
        semi_dynamic_index idx(docs, o);
        const auto plain = static_index::build(docs);

        auto pattern = test_support::random_pattern(rng, naive.documents(), sigma);
        test_support::hit_set from_core;
        const auto r = plain.range_find(pattern);
        for (auto i = r.begin; i < r.end; ++i) {
            const auto occ = plain.locate_occurrence(i);
            from_core.emplace(occ.doc, occ.offset);
        }
        CHECK(as_set(idx.query(pattern)) == from_core);

        while (!naive.documents().empty()) {
            const auto victim = std::next(naive.documents().begin(),
                                          static_cast<std::ptrdiff_t>(rng() % naive.documents().size()))->first;
            const auto before = as_set(idx.query(pattern));
            naive.erase(victim);
            idx.delete_document(victim);
            auto expected = before;
            std::erase_if(expected, [&](const auto& h) { return h.first == victim; });
            CHECK(as_set(idx.query(pattern)) == expected);

            for (int q = 0; q < 3; ++q) {
                const auto p = test_support::random_pattern(rng, naive.documents(), sigma);
                const auto got = idx.query(p);
                CHECK(as_set(got) == naive.occurrences(p));
                CHECK(idx.count(p) == got.size());
            }
            if (o.auto_purge) CHECK(idx.deleted_symbols() * o.tau <= idx.total_symbols());
            if (rng() % 10 == 0) {
                const auto alive = idx.alive_pairs();
                idx.purge();
                CHECK(idx.marks().zeros() == 0);
                CHECK(idx.deleted_symbols() == 0);
                CHECK(idx.alive_pairs() == alive);
            }
        }
        CHECK(idx.count(sym("a")) == 0);
    }
}

TEST_CASE("snapshot keeps deletion marks") {
    std::mt19937_64 rng(32);
    document_list docs;
    for (doc_id k = 0; k < 20; ++k) docs.emplace_back(k, test_support::random_text(rng, 1 + rng() % 50, 3));
    semi_dynamic_options o;
    o.tau = 100;
    semi_dynamic_index idx(docs, o);
    for (doc_id k = 0; k < 20; k += 3) idx.delete_document(k);
    std::stringstream buf;
    idx.save(buf);
    const auto back = semi_dynamic_index::load(buf, o);
    CHECK(back.alive_pairs() == idx.alive_pairs());
    CHECK(back.deleted_symbols() == idx.deleted_symbols());
    for (const auto* p : {"a", "ab", "\x01\x02", "\x03\x03"}) {
        const auto pat = sym(p);
        CHECK(as_set(back.query(pat)) == as_set(idx.query(pat)));
    }
}
