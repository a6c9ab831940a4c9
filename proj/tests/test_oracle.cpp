#include "doctest.h"
#include "dyndex/oracle.hpp"
#include "support.hpp"

using namespace dyndex::oracle;
using test_support::sym;

TEST_CASE("naive scan finds every occurrence") {
    naive_collection c;
    c.insert(7, sym("abab"));
    CHECK(c.occurrences(sym("ab")) == std::set<hit>{{7, 0}, {7, 2}});
    CHECK(c.occurrences(sym("zz")).empty());

    naive_collection d;
    d.insert(3, sym("aaa"));
    CHECK(d.occurrences(sym("aa")) == std::set<hit>{{3, 0}, {3, 1}});
    CHECK(d.total_symbols() == 4);
}

TEST_CASE("naive collection rejects duplicates and unknown deletes") {
    naive_collection c;
    CHECK(c.insert(1, sym("x")));
    CHECK_FALSE(c.insert(1, sym("y")));
    CHECK(c.erase(1));
    CHECK_FALSE(c.erase(1));
    CHECK(c.occurrences(sym("x")).empty());
}

TEST_CASE("naive suffix array") {
    // Hand-sorted suffixes of abracadabra$.
    CHECK(naive_suffix_array({sym("abracadabra")}) ==
          std::vector<std::uint64_t>{11, 10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2});
    CHECK(naive_suffix_array({sym("a")}) == std::vector<std::uint64_t>{1, 0});
    // ab$ab$: equal suffixes are ordered by document.
    CHECK(naive_suffix_array({sym("ab"), sym("ab")}) == std::vector<std::uint64_t>{2, 5, 0, 3, 1, 4});
}

TEST_CASE("naive relation has set semantics") {
    naive_relation r;
    CHECK(r.add(0, 1));
    CHECK(r.add(0, 2));
    CHECK(r.add(1, 2));
    CHECK_FALSE(r.add(0, 1));
    CHECK(r.labels_of(0) == std::set<std::uint64_t>{1, 2});
    CHECK(r.objects_of(2) == std::set<std::uint64_t>{0, 1});
    CHECK(r.related(1, 2));
    CHECK_FALSE(r.related(1, 1));
    CHECK(r.remove(0, 2));
    CHECK_FALSE(r.remove(0, 2));
    CHECK(r.objects_of(2) == std::set<std::uint64_t>{1});
    CHECK(r.size() == 2);
}

TEST_CASE("naive graph mirrors adjacency") {
    naive_graph g;
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 0);
    g.add_edge(2, 2);
    CHECK(g.out_neighbors(2) == std::set<std::uint64_t>{0, 2});
    CHECK(g.in_neighbors(2) == std::set<std::uint64_t>{1, 2});
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK(g.out_degree(2) == 2);
    CHECK(g.remove_edge(2, 2));
    CHECK(g.in_degree(2) == 1);
}
