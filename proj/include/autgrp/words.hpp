#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace autgrp {

// Alphabet {0, ..., d-1} of a d-ary rooted tree.
struct Alphabet {
    explicit Alphabet(int d);
    int size() const { return d_; }

private:
    int d_;
};

// A vertex of the tree: finite word over the alphabet, leftmost letter
// nearest the root. The empty word is the root.
using Word = std::vector<int>;

// Big-endian mixed-radix index of w in {0, ..., d^|w| - 1}. Bijective on
// words of a fixed length; strictly monotone in lexicographic order.
std::uint64_t word_index(const Word& w, const Alphabet& a);

// Inverse of word_index restricted to length n.
Word index_word(std::uint64_t index, int n, const Alphabet& a);

// Rendering: plain digits for d <= 10, dot-separated decimal otherwise
// (e.g. "10.3.11"). The empty word renders as "~".
std::string format_word(const Word& w, const Alphabet& a);
Word parse_word(std::string_view text, const Alphabet& a);

}  // namespace autgrp
