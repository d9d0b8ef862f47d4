#include "autgrp/words.hpp"

#include <charconv>

#include "autgrp/errors.hpp"

namespace autgrp {

Alphabet::Alphabet(int d) : d_(d) {
    if (d < 2) throw DomainError("alphabet needs at least two letters, got " + std::to_string(d));
}

std::uint64_t word_index(const Word& w, const Alphabet& a) {
    const int d = a.size();
    std::uint64_t idx = 0;
    for (int x : w) {
        if (x < 0 || x >= d)
            throw DomainError("malformed word: letter " + std::to_string(x) +
                              " outside alphabet of size " + std::to_string(d));
        idx = idx * d + std::uint64_t(x);
    }
    return idx;
}

Word index_word(std::uint64_t index, int n, const Alphabet& a) {
    const int d = a.size();
    std::uint64_t span = 1;
    for (int i = 0; i < n; ++i) span *= std::uint64_t(d);
    if (index >= span)
        throw DomainError("index " + std::to_string(index) + " out of range for length " +
                          std::to_string(n) + " over " + std::to_string(d) + " letters");
    Word w(n);
    for (int i = n - 1; i >= 0; --i) {
        w[i] = int(index % d);
        index /= d;
    }
    return w;
}

std::string format_word(const Word& w, const Alphabet& a) {
    if (w.empty()) return "~";
    std::string s;
    const bool dotted = a.size() > 10;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (dotted && i > 0) s += '.';
        s += std::to_string(w[i]);
    }
    return s;
}

Word parse_word(std::string_view text, const Alphabet& a) {
    Word w;
    if (text == "~") return w;
    const int d = a.size();
    if (d <= 10) {
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c < '0' || c > '9')
                throw ParseError({0, int(i) + 1, "invalid letter character in word literal"});
            int x = c - '0';
            if (x >= d)
                throw ParseError({0, int(i) + 1,
                                  "letter " + std::to_string(x) + " outside alphabet of size " +
                                      std::to_string(d)});
            w.push_back(x);
        }
        return w;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t dot = text.find('.', pos);
        std::string_view tok = text.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
        int x = -1;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw ParseError({0, int(pos) + 1, "invalid letter in dotted word literal"});
        if (x < 0 || x >= d)
            throw ParseError({0, int(pos) + 1,
                              "letter " + std::to_string(x) + " outside alphabet of size " +
                                  std::to_string(d)});
        w.push_back(x);
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return w;
}

}  // namespace autgrp
