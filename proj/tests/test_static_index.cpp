#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dyndex/oracle.hpp"
#include "dyndex/static_index.hpp"
#include "support.hpp"

using namespace dyndex;
using test_support::sym;

namespace {

std::vector<std::uint64_t> suffix_array(const static_index& idx) {
    std::vector<std::uint64_t> sa(idx.size());
    for (std::uint64_t i = 0; i < idx.size(); ++i) sa[i] = idx.locate(i);
    return sa;
}

document_list random_collection(std::mt19937_64& rng, std::uint64_t max_n, unsigned sigma) {
    document_list docs;
    std::uint64_t n = 0;
    const std::size_t count = 1 + rng() % 40;
    for (std::size_t k = 0; k < count && n < max_n; ++k) {
        const std::size_t len = 1 + rng() % std::min<std::uint64_t>(max_n - n, 600);
        docs.emplace_back(rng() % 100000 * 100 + k, test_support::random_text(rng, len, sigma));
        n += len + 1;
    }
    return docs;
}

double entropy0(const static_index& idx, const document_list& docs) {
    std::map<symbol, std::uint64_t> freq;
    for (const auto& [id, text] : docs)
        for (const auto c : text) ++freq[c];
    freq[terminator] += docs.size();
    double h = 0;
    const auto n = static_cast<double>(idx.size());
    for (const auto& [c, f] : freq) h -= static_cast<double>(f) / n * std::log2(static_cast<double>(f) / n);
    return h;
}

}  // namespace

TEST_CASE("abracadabra") {
    const auto idx = static_index::build({{0, sym("abracadabra")}}, 3);
    CHECK(suffix_array(idx) == std::vector<std::uint64_t>{11, 10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2});

    const auto abra = idx.range_find(sym("abra"));
    CHECK(abra.begin == 2);
    CHECK(abra.end == 4);
    const auto a = idx.range_find(sym("a"));
    CHECK(a.begin == 1);
    CHECK(a.end == 6);
    CHECK(idx.range_find(sym("zz")).empty());

    CHECK(idx.locate(2) == 7);
    CHECK(idx.extract(0, 4) == sym("abra"));
    CHECK(idx.extract(7, 4) == sym("abra"));
    CHECK(idx.extract(3, 0).empty());
    CHECK(idx.suffix_rank(0, 7) == 2);
    CHECK(idx.suffix_rank(0, 11) == 0);
    CHECK_THROWS_AS(idx.locate(12), std::out_of_range);
    CHECK_THROWS_AS(idx.extract(10, 3), std::out_of_range);
    CHECK_THROWS_AS(idx.suffix_rank(1, 0), std::out_of_range);
}

TEST_CASE("single symbol and twin documents") {
    const auto one = static_index::build({{4, sym("a")}});
    CHECK(suffix_array(one) == std::vector<std::uint64_t>{1, 0});

    const auto twins = static_index::build({{1, sym("ab")}, {2, sym("ab")}});
    CHECK(suffix_array(twins) == std::vector<std::uint64_t>{2, 5, 0, 3, 1, 4});
    // Terminators rank by document order.
    CHECK(twins.suffix_rank(1, 2) == 0);
    CHECK(twins.suffix_rank(2, 2) == 1);
}

TEST_CASE("build rejects malformed collections") {
    CHECK_THROWS_AS(static_index::build({{1, {}}}), std::invalid_argument);
    CHECK_THROWS_AS(static_index::build({{1, {1, 0, 2}}}), std::invalid_argument);
    CHECK_THROWS_AS(static_index::build({{1, {1}}, {1, {2}}}), std::invalid_argument);
}

TEST_CASE("random collections agree with the naive scan") {
    std::mt19937_64 rng(77);
    const unsigned sigmas[] = {2, 4, 26, 200};
    for (int round = 0; round < 200; ++round) {
        const unsigned sigma = sigmas[round % 4];
        auto docs = random_collection(rng, 10000, sigma);
        oracle::naive_collection naive;
        for (const auto& [id, text] : docs) naive.insert(id, text);
        const auto idx = static_index::build(docs, 1 + rng() % 16);

        for (int q = 0; q < 50; ++q) {
            const auto p = test_support::random_pattern(rng, docs, sigma);
            const auto range = idx.range_find(p);
            CHECK(range.steps == p.size());
            test_support::hit_set got;
            for (auto i = range.begin; i < range.end; ++i) {
                const auto o = idx.locate_occurrence(i);
                got.emplace(o.doc, o.offset);
            }
            CHECK(got == naive.occurrences(p));
        }
    }
}

TEST_CASE("suffix rank inverts locate") {
    std::mt19937_64 rng(78);
    for (int round = 0; round < 20; ++round) {
        auto docs = random_collection(rng, 10000, 1 + rng() % 30);
        const auto idx = static_index::build(docs);
        for (std::uint64_t i = 0; i < idx.size(); ++i) {
            const auto o = idx.locate_occurrence(i);
            REQUIRE(idx.suffix_rank(o.doc, o.offset) == i);
        }
    }
}

TEST_CASE("suffix array matches the naive sort") {
    std::mt19937_64 rng(79);
    for (int round = 0; round < 30; ++round) {
        auto docs = random_collection(rng, 3000, 1 + rng() % 5);
        std::sort(docs.begin(), docs.end());
        std::vector<oracle::text> texts;
        for (const auto& [id, text] : docs) texts.push_back(text);
        CHECK(suffix_array(static_index::build(docs)) == oracle::naive_suffix_array(texts));
    }
}

TEST_CASE("to_pairs and snapshots round trip") {
    std::mt19937_64 rng(80);
    for (int round = 0; round < 100; ++round) {
        auto docs = random_collection(rng, 4000, 1 + rng() % 200);
        const auto idx = static_index::build(docs);
        std::sort(docs.begin(), docs.end());
        REQUIRE(idx.to_pairs() == docs);

        std::stringstream buf;
        idx.save(buf);
        const auto back = static_index::load(buf);
        CHECK(back.to_pairs() == docs);
        CHECK(suffix_array(back) == suffix_array(idx));
    }
    std::stringstream junk("not an index");
    CHECK_THROWS(static_index::load(junk));
}

TEST_CASE("measured size stays within the entropy bound") {
    std::mt19937_64 rng(81);
    for (const unsigned sigma : {2u, 4u, 26u, 200u}) {
        auto docs = random_collection(rng, 10000, sigma);
        const auto idx = static_index::build(docs);
        const double n = static_cast<double>(idx.size());
        const double log_n = std::ceil(std::log2(n));
        const double s = static_cast<double>(idx.sample_rate());
        // The document table is the registry every multi-document index needs.
        const double bound = 4.0 * n * (entropy0(idx, docs) + 1) + n * log_n / s + 64.0 * (sigma + 1) * log_n +
                             128.0 * static_cast<double>(docs.size());
        CHECK(static_cast<double>(idx.space().total_bits) <= bound);
    }
}
