#include "autgrp/permutil.hpp"

#include <algorithm>

#include "autgrp/errors.hpp"

namespace autgrp {

Perm identity_perm(std::size_t n) {
    Perm p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::uint32_t(i);
    return p;
}

bool is_identity(const Perm& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return false;
    return true;
}

bool is_permutation(const Perm& p) {
    std::vector<bool> seen(p.size(), false);
    for (std::uint32_t v : p) {
        if (v >= p.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

Perm compose(const Perm& p, const Perm& q) {
    Perm r(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
    return r;
}

Perm inverse_perm(const Perm& p) {
    Perm r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = std::uint32_t(i);
    return r;
}

std::vector<std::uint32_t> fixed_points(const Perm& p) {
    std::vector<std::uint32_t> f;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] == i) f.push_back(std::uint32_t(i));
    return f;
}

std::size_t count_fixed_points(const Perm& p) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] == i) ++c;
    return c;
}

std::vector<std::vector<std::uint32_t>> nontrivial_cycles(const Perm& p) {
    std::vector<std::vector<std::uint32_t>> cycles;
    std::vector<bool> seen(p.size(), false);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i] || p[i] == i) continue;
        std::vector<std::uint32_t> cyc;
        std::uint32_t x = std::uint32_t(i);
        while (!seen[x]) {
            seen[x] = true;
            cyc.push_back(x);
            x = p[x];
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

bool is_single_n_cycle(const Perm& p) {
    if (p.empty()) return false;
    std::uint32_t x = 0;
    for (std::size_t steps = 1; steps < p.size(); ++steps) {
        x = p[x];
        if (x == 0) return false;
    }
    return p[x] == 0;
}

std::string format_cycles(const Perm& p) {
    auto cycles = nontrivial_cycles(p);
    if (cycles.empty()) return "()";
    std::string s;
    for (const auto& cyc : cycles) {
        s += '(';
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            if (i > 0) s += ' ';
            s += std::to_string(cyc[i]);
        }
        s += ')';
    }
    return s;
}

Perm parse_cycles(std::string_view text, std::size_t n) {
    Perm p = identity_perm(n);
    std::vector<bool> used(n, false);
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    skip_ws();
    if (pos == text.size()) throw ParseError({0, 1, "expected permutation in cycle notation"});
    bool any_cycle = false;
    while (pos < text.size()) {
        skip_ws();
        if (pos == text.size()) break;
        if (text[pos] != '(')
            throw ParseError({0, int(pos) + 1, "expected '(' in cycle notation"});
        ++pos;
        std::vector<std::uint32_t> cyc;
        for (;;) {
            skip_ws();
            if (pos < text.size() && text[pos] == ')') {
                ++pos;
                break;
            }
            std::size_t start = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
            if (pos == start)
                throw ParseError({0, int(pos) + 1, "expected letter or ')' in cycle"});
            unsigned long v = std::stoul(std::string(text.substr(start, pos - start)));
            if (v >= n)
                throw ParseError({0, int(start) + 1,
                                  "letter " + std::to_string(v) + " outside alphabet of size " +
                                      std::to_string(n)});
            if (used[v])
                throw ParseError({0, int(start) + 1,
                                  "non-bijective permutation: letter " + std::to_string(v) +
                                      " appears twice"});
            used[v] = true;
            cyc.push_back(std::uint32_t(v));
        }
        any_cycle = true;
        if (cyc.size() == 1)
            throw ParseError({0, int(pos), "cycles of length one are omitted, not written"});
        for (std::size_t i = 0; i + 1 < cyc.size(); ++i) p[cyc[i]] = cyc[i + 1];
        if (!cyc.empty()) p[cyc.back()] = cyc.front();
        skip_ws();
    }
    if (!any_cycle) throw ParseError({0, 1, "expected permutation in cycle notation"});
    return p;
}

}  // namespace autgrp
