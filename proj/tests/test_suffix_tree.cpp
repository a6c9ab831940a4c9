#include <random>

#include "doctest.h"
#include "dyndex/oracle.hpp"
#include "dyndex/suffix_tree.hpp"
#include "support.hpp"

using namespace dyndex;
using test_support::as_set;
using test_support::hit_set;
using test_support::sym;

TEST_CASE("insert and query") {
    suffix_tree t;
    t.insert(4, sym("abab"));
    CHECK(as_set(t.query(sym("ab"))) == hit_set{{4, 0}, {4, 2}});
    CHECK(as_set(t.query(sym("abab"))) == hit_set{{4, 0}});
    CHECK(t.query(sym("abc")).empty());
    CHECK(t.total_symbols() == 5);

    t.insert(9, sym("abab"));
    CHECK(t.count(sym("ab")) == 4);
    CHECK(t.count(sym("b")) == 4);
    CHECK(t.validate().empty());
}

TEST_CASE("single symbol document") {
    suffix_tree t;
    t.insert(1, sym("x"));
    // Root plus the leaves of "x$" and "$".
    CHECK(t.node_count() == 3);
    CHECK(as_set(t.query(sym("x"))) == hit_set{{1, 0}});
}

TEST_CASE("deletion round trips") {
    suffix_tree t;
    const auto empty_nodes = t.node_count();
    t.insert(1, sym("mississippi"));
    t.erase(1);
    CHECK(t.empty());
    CHECK(t.node_count() == empty_nodes);
    CHECK(t.validate().empty());

    t.insert(2, sym("banana"));
    const auto one_doc = t.node_count();
    t.insert(3, sym("bandana"));
    t.erase(3);
    CHECK(t.node_count() == one_doc);
    oracle::naive_collection naive;
    naive.insert(2, sym("banana"));
    for (const auto* p : {"a", "an", "ana", "nd", "banana", "b"}) CHECK(as_set(t.query(sym(p))) == naive.occurrences(sym(p)));
}

TEST_CASE("invalid updates throw") {
    suffix_tree t;
    t.insert(1, sym("ab"));
    CHECK_THROWS_AS(t.insert(1, sym("cd")), std::invalid_argument);
    CHECK_THROWS_AS(t.insert(2, {}), std::invalid_argument);
    CHECK_THROWS_AS(t.insert(3, std::vector<symbol>{1, 0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(t.erase(7), std::out_of_range);
}

TEST_CASE("random updates agree with the oracle") {
    std::mt19937_64 rng(41);
    for (const unsigned sigma : {2u, 4u, 26u}) {
        suffix_tree t(rng());
        oracle::naive_collection naive;
        doc_id next = 0;
        std::uint64_t max_ops_per_symbol = 0;
        for (int step = 0; step < 10000 / 3; ++step) {
            const auto roll = rng() % 10;
            if (naive.documents().empty() || roll < 4) {
                const auto text = test_support::random_text(rng, 1 + rng() % 200, sigma);
                const auto before = t.node_operations();
                t.insert(next, text);
                naive.insert(next++, text);
                max_ops_per_symbol = std::max(max_ops_per_symbol, (t.node_operations() - before) / (text.size() + 1));
            } else if (roll < 7) {
                const auto victim = std::next(naive.documents().begin(),
                                              static_cast<std::ptrdiff_t>(rng() % naive.documents().size()))->first;
                t.erase(victim);
                naive.erase(victim);
            } else {
                const auto p = test_support::random_pattern(rng, naive.documents(), sigma);
                CHECK(as_set(t.query(p)) == naive.occurrences(p));
                CHECK(t.count(p) == naive.occurrences(p).size());
            }
            if (step % 50 == 0) REQUIRE(t.validate().empty());
            REQUIRE(t.total_symbols() == naive.total_symbols());
        }
        CHECK(max_ops_per_symbol <= 64);
    }
}
