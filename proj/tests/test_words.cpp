#include <random>

#include "doctest.h"

#include "autgrp/errors.hpp"
#include "autgrp/words.hpp"

using namespace autgrp;

TEST_SUITE("words") {

TEST_CASE("index of the empty word is zero") {
    Alphabet a(2);
    CHECK(word_index({}, a) == 0);
}

TEST_CASE("binary index by definition") {
    Alphabet a(2);
    CHECK(word_index({1, 0}, a) == 2);
}

TEST_CASE("ternary index cross-checked by lexicographic enumeration") {
    Alphabet a(3);
    // Oracle: generate X^3 in lexicographic order and locate 121.
    std::vector<Word> all;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 3; ++z) all.push_back({x, y, z});
    Word target{1, 2, 1};
    std::size_t pos = 0;
    while (all[pos] != target) ++pos;
    CHECK(pos == 16);
    CHECK(word_index(target, a) == 16);
}

TEST_CASE("index_word inverts word_index") {
    Alphabet a2(2), a3(3);
    CHECK(index_word(0, 3, a2) == Word{0, 0, 0});
    CHECK(index_word(2, 2, a2) == Word{1, 0});
    CHECK(index_word(16, 3, a3) == Word{1, 2, 1});
}

TEST_CASE("letters outside the alphabet are rejected") {
    Alphabet a(2);
    CHECK_THROWS_AS(word_index({0, 2}, a), DomainError);
    CHECK_THROWS_AS(index_word(8, 3, a), DomainError);
}

TEST_CASE("round trip and monotonicity, exhaustive at small sizes") {
    for (int d = 2; d <= 4; ++d) {
        Alphabet a(d);
        for (int n = 0; n <= (d == 2 ? 12 : 6); ++n) {
            std::uint64_t span = 1;
            for (int i = 0; i < n; ++i) span *= std::uint64_t(d);
            Word prev;
            for (std::uint64_t i = 0; i < span; ++i) {
                Word w = index_word(i, n, a);
                CHECK(word_index(w, a) == i);
                if (i > 0) CHECK(prev < w);  // lexicographic monotonicity
                prev = w;
            }
        }
    }
}

TEST_CASE("randomized round trips at larger lengths") {
    std::mt19937 rng(2024);
    for (int d = 3; d <= 4; ++d) {
        Alphabet a(d);
        for (int trial = 0; trial < 200; ++trial) {
            int n = 7 + int(rng() % 6);  // lengths 7..12
            Word w(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) w[std::size_t(i)] = int(rng() % std::uint32_t(d));
            CHECK(index_word(word_index(w, a), n, a) == w);
        }
    }
}

TEST_CASE("rendering for small and large alphabets") {
    Alphabet a2(2), a12(12);
    CHECK(format_word({1, 0, 1}, a2) == "101");
    CHECK(format_word({}, a2) == "~");
    CHECK(format_word({10, 3, 11}, a12) == "10.3.11");
    CHECK(parse_word("101", a2) == Word{1, 0, 1});
    CHECK(parse_word("10.3.11", a12) == Word{10, 3, 11});
    CHECK(parse_word("~", a2) == Word{});
    CHECK_THROWS_AS(parse_word("102", a2), ParseError);
}

TEST_CASE("degenerate alphabets are rejected") {
    CHECK_THROWS_AS(Alphabet(1), DomainError);
}

}  // TEST_SUITE
