#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dyndex/bit_array.hpp"
#include "dyndex/packed_vector.hpp"
#include "dyndex/wavelet_tree.hpp"

using namespace dyndex;

TEST_CASE("bit array rank and select") {
    std::mt19937_64 rng(81);
    for (const std::size_t n : {1u, 63u, 64u, 65u, 511u, 512u, 513u, 5000u}) {
        std::vector<bool> bits(n);
        for (std::size_t i = 0; i < n; ++i) bits[i] = rng() % 3 == 0;
        const bit_array b(bits);
        std::size_t ones = 0, zeros = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(b.rank1(i) == ones);
            CHECK(b[i] == bits[i]);
            if (bits[i])
                CHECK(b.select1(ones++) == i);
            else
                CHECK(b.select0(zeros++) == i);
        }
        CHECK(b.rank1(n) == ones);
        CHECK(b.ones() == ones);
    }
}

TEST_CASE("packed vector keeps its values") {
    const std::vector<std::uint64_t> values{0, 5, 1023, 7, 1u << 20, 3};
    const packed_vector p(values);
    CHECK(p.width() == 21);
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(p[i] == values[i]);
    std::stringstream buf;
    p.save(buf);
    const auto back = packed_vector::load(buf);
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(back[i] == values[i]);
}

TEST_CASE("wavelet tree small cases") {
    const wavelet_tree one({7, 7, 7});
    CHECK(one.access(1) == 7);
    CHECK(one.rank(7, 2) == 2);
    CHECK(one.select(7, 2) == 2);
    CHECK(one.rank(3, 3) == 0);
    CHECK(one.count(3) == 0);
    CHECK_THROWS_AS(one.select(7, 3), std::out_of_range);

    // a b r a c a d a b r a with a = 1 .. r = 5.
    const wavelet_tree wt({1, 2, 5, 1, 3, 1, 4, 1, 2, 5, 1});
    CHECK(wt.alphabet_size() == 5);
    CHECK(wt.count(1) == 5);
    CHECK(wt.rank(1, 6) == 3);
    CHECK(wt.select(5, 1) == 9);
    CHECK(wt.inverse_select(8) == std::pair<symbol, std::size_t>{2, 1});
    CHECK_THROWS_AS(wt.access(11), std::out_of_range);
    CHECK(wt.contains(4));
    CHECK_FALSE(wt.contains(6));

    const wavelet_tree empty(std::vector<symbol>{});
    CHECK(empty.size() == 0);
    CHECK(empty.rank(1, 5) == 0);
}

TEST_CASE("wavelet tree agrees with a scan") {
    std::mt19937_64 rng(82);
    for (int round = 0; round < 40; ++round) {
        const std::size_t n = 1 + rng() % 3000;
        const symbol sigma = 1 + static_cast<symbol>(rng() % (round % 2 ? 5000 : 20));
        std::vector<symbol> seq(n);
        std::geometric_distribution<symbol> skew(0.05);
        for (auto& c : seq) c = round % 3 == 0 ? skew(rng) % sigma : static_cast<symbol>(rng() % sigma);
        wavelet_tree wt(seq);
        if (round % 4 == 0) {
            std::stringstream buf;
            wt.save(buf);
            wt = wavelet_tree::load(buf);
        }
        std::vector<std::size_t> seen(sigma + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = seq[i];
            REQUIRE(wt.access(i) == c);
            CHECK(wt.rank(c, i) == seen[c]);
            CHECK(wt.select(c, seen[c]) == i);
            CHECK(wt.inverse_select(i).second == seen[c]);
            ++seen[c];
        }
        for (symbol c = 0; c <= sigma; ++c) {
            CHECK(wt.count(c) == seen[c]);
            CHECK(wt.rank(c, n) == seen[c]);
        }
    }
}

TEST_CASE("wavelet tree size follows the entropy") {
    std::mt19937_64 rng(83);
    std::vector<symbol> seq(1 << 16);
    for (auto& c : seq) c = static_cast<symbol>(rng() % 4);
    const wavelet_tree wt(seq);
    // Four equiprobable symbols: two bits each plus the rank directory.
    CHECK(wt.size_in_bits() <= static_cast<std::uint64_t>(2.0 * seq.size() * 1.2) + 1024);
}
