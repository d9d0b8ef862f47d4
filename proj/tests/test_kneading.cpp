#include <algorithm>
#include <set>

#include "doctest.h"

#include "autgrp/builtins.hpp"
#include "autgrp/errors.hpp"
#include "autgrp/kneading.hpp"

using namespace autgrp;

namespace {

std::set<std::string> names_of(const AutomatonGroup& g, const std::vector<Element>& v) {
    std::set<std::string> out;
    for (const auto& e : v) out.insert(e.to_string());
    (void)g;
    return out;
}

Word block_of(const std::vector<KneadingSequence>& seqs, const Automaton& a,
              const std::string& name, bool inv) {
    int s = a.find_state(name);
    for (const auto& ks : seqs)
        if (ks.who.state == s && ks.who.inv == inv) return ks.repeating_block;
    FAIL("sequence not found for state");
    return {};
}

}  // namespace

TEST_SUITE("kneading") {

TEST_CASE("basilica passes all four conditions") {
    auto rep = validate_kneading(builtin_automaton("basilica"));
    CHECK(rep.unique_in_arrows);
    CHECK(rep.cycle_restrictions);
    CHECK(rep.tree_like);
    CHECK(rep.single_loop_components);
    CHECK(rep.all());
}

TEST_CASE("chebyshev passes all four conditions") {
    auto rep = validate_kneading(builtin_automaton("chebyshev2"));
    CHECK(rep.all());
}

TEST_CASE("odometer and tricycle pass all four conditions") {
    CHECK(validate_kneading(builtin_automaton("odometer")).all());
    CHECK(validate_kneading(builtin_automaton("tricycle")).all());
}

TEST_CASE("double restriction into one state violates condition 1") {
    auto rep = validate_kneading(parse_automaton("alphabet = 2\na : () [a, a]\n"));
    CHECK_FALSE(rep.unique_in_arrows);
    REQUIRE(rep.in_arrow_witness.has_value());
    CHECK(rep.in_arrow_witness->state == 0);
    CHECK(rep.in_arrow_witness->arrows == 2);
}

TEST_CASE("two non-trivial restrictions in one root cycle violate condition 2") {
    // a swaps 0 and 1 and restricts to b at both letters of that cycle.
    auto rep =
        validate_kneading(parse_automaton("alphabet = 2\na : (0 1) [b, b]\nb : () [1, 1]\n"));
    CHECK_FALSE(rep.cycle_restrictions);
    REQUIRE(rep.cycle_witness.has_value());
    CHECK(rep.cycle_witness->state == 0);
}

TEST_CASE("duplicated swaps violate condition 3") {
    auto rep =
        validate_kneading(parse_automaton("alphabet = 2\na : (0 1) [1, b]\nb : (0 1) [1, a]\n"));
    CHECK_FALSE(rep.tree_like);
}

TEST_CASE("tricycle kneading sequences match the cycle letters") {
    Automaton a = builtin_automaton("tricycle");
    auto seqs = kneading_sequences(a);
    CHECK(block_of(seqs, a, "a", false) == Word{1, 2, 1});
    CHECK(block_of(seqs, a, "b", false) == Word{2, 1, 1});
    CHECK(block_of(seqs, a, "c", false) == Word{1, 1, 2});
}

TEST_CASE("basilica kneading sequences, including inverses") {
    Automaton a = builtin_automaton("basilica");
    auto seqs = kneading_sequences(a);
    CHECK(block_of(seqs, a, "a", false) == Word{1});
    CHECK(block_of(seqs, a, "b", false) == Word{1});
    CHECK(block_of(seqs, a, "a", true) == Word{0, 1});
    CHECK(block_of(seqs, a, "b", true) == Word{1, 0});
}

TEST_CASE("chebyshev kneading sequences collapse to the zero ray") {
    Automaton a = builtin_automaton("chebyshev2");
    auto seqs = kneading_sequences(a);
    CHECK(block_of(seqs, a, "a", false) == Word{0});
    CHECK(block_of(seqs, a, "a", true) == Word{0});
    // b is finitary: no sequence back at all
    for (const auto& ks : seqs) CHECK(ks.who.state == a.find_state("a"));
}

TEST_CASE("basilica kneading graph has three vertices and four edges") {
    Automaton a = builtin_automaton("basilica");
    KneadingGraph g = build_kneading_graph(a);
    CHECK(g.period_m == 2);
    REQUIRE(g.vertices.size() == 3);
    CHECK(g.vertices[0] == Word{0, 1});
    CHECK(g.vertices[1] == Word{1, 0});
    CHECK(g.vertices[2] == Word{1, 1});
    REQUIRE(g.edges.size() == 4);
    int v01 = g.find_vertex({0, 1}), v10 = g.find_vertex({1, 0}), v11 = g.find_vertex({1, 1});
    int a_idx = a.find_state("a"), b_idx = a.find_state("b");
    for (const auto& e : g.edges) {
        if (e.label.state == a_idx && !e.label.inv) {
            CHECK(e.from == v11);
            CHECK(e.to == v01);
        } else if (e.label.state == b_idx && !e.label.inv) {
            CHECK(e.from == v11);
            CHECK(e.to == v10);
        } else if (e.label.state == a_idx) {
            CHECK(e.from == v01);
            CHECK(e.to == v11);
        } else {
            CHECK(e.from == v10);
            CHECK(e.to == v11);
        }
    }
}

TEST_CASE("chebyshev kneading graph is one vertex with paired loops") {
    KneadingGraph g = build_kneading_graph(builtin_automaton("chebyshev2"));
    CHECK(g.period_m == 1);
    REQUIRE(g.vertices.size() == 1);
    CHECK(g.vertices[0] == Word{0});
    CHECK(g.edges.size() == 2);
    for (const auto& e : g.edges) CHECK(e.from == e.to);
}

TEST_CASE("automata without cycle states give the empty kneading graph") {
    // With no states at all there are no cycles, so no kneading sequences.
    KneadingGraph g = build_kneading_graph(parse_automaton("alphabet = 2\n"));
    CHECK(g.vertices.empty());
    CHECK(g.edges.empty());
    // A lone finitary generator has no in-arrow, which condition 1 rejects;
    // such automata never reach the kneading-graph stage.
    auto rep = validate_kneading(parse_automaton("alphabet = 2\nb : (0 1) [1, 1]\n"));
    CHECK_FALSE(rep.unique_in_arrows);
}

TEST_CASE("basilica stable sets: seven elements, trivial circuits") {
    AutomatonGroup g(builtin_automaton("basilica"));
    StableSets ss = stable_sets(g);
    CHECK(ss.n0.size() == 7);
    auto names = names_of(g, ss.n0);
    for (const char* want : {"1", "a", "b", "a^-1", "b^-1", "b*a^-1", "a*b^-1"})
        CHECK(names.contains(want));
    CHECK(ss.n1.size() == 1);
    CHECK(ss.n1[0].is_trivial());
    // The nucleus coincides with the stable set here.
    CHECK(ss.nucleus.size() == 7);
}

TEST_CASE("chebyshev stable sets and nucleus") {
    AutomatonGroup g(builtin_automaton("chebyshev2"));
    StableSets ss = stable_sets(g);
    auto n0 = names_of(g, ss.n0);
    CHECK(ss.n0.size() == 2);
    CHECK(n0.contains("1"));
    CHECK(n0.contains("a"));
    // N1 includes a: the loop trip around the single vertex.
    auto n1 = names_of(g, ss.n1);
    CHECK(ss.n1.size() == 2);
    CHECK(n1.contains("a"));
    auto nuc = names_of(g, ss.nucleus);
    CHECK(ss.nucleus.size() == 3);
    for (const char* want : {"1", "a", "b"}) CHECK(nuc.contains(want));
}

TEST_CASE("odometer stable sets") {
    AutomatonGroup g(builtin_automaton("odometer"));
    StableSets ss = stable_sets(g);
    auto n0 = names_of(g, ss.n0);
    CHECK(ss.n0.size() == 3);
    for (const char* want : {"1", "c", "c^-1"}) CHECK(n0.contains(want));
    CHECK(ss.n1.size() == 1);
    // Oracle: no word of length <= 5 is fixed by c.
    Element c = g.parse_element("c");
    for (int n = 1; n <= 5; ++n) CHECK(c.count_fixed(n) == 0);
}

TEST_CASE("stable elements really are stable and N1 fixes its witness") {
    for (const auto& name : builtin_names()) {
        AutomatonGroup g(builtin_automaton(name));
        KneadingGraph kg = build_kneading_graph(g.automaton());
        const int m = std::max(1, kg.period_m);
        StableSets ss = stable_sets(g);
        Alphabet al = g.automaton().alphabet();
        // Containments: N1 inside N0 inside the nucleus.
        for (const auto& e : ss.n1) {
            bool in_n0 = false;
            for (const auto& s : ss.n0) in_n0 |= s.equals(e);
            CHECK(in_n0);
        }
        for (const auto& e : ss.n0) {
            bool in_nuc = false;
            for (const auto& s : ss.nucleus) in_nuc |= s.equals(e);
            CHECK(in_nuc);
        }
        for (const auto& e : ss.n0) {
            if (e.is_trivial()) continue;
            bool stable = false;
            for (int len = 1; len <= 2 * m && !stable; ++len) {
                std::uint64_t span = 1;
                for (int i = 0; i < len; ++i) span *= std::uint64_t(g.degree());
                for (std::uint64_t i = 0; i < span && !stable; ++i) {
                    Word v = index_word(i, len, al);
                    if (e.restrict_at(v).equals(e)) stable = true;
                }
            }
            CHECK(stable);
        }
        for (const auto& e : ss.n1) {
            if (e.is_trivial()) continue;
            bool witnessed = false;
            for (int len = 1; len <= 2 * m && !witnessed; ++len) {
                std::uint64_t span = 1;
                for (int i = 0; i < len; ++i) span *= std::uint64_t(g.degree());
                for (std::uint64_t i = 0; i < span && !witnessed; ++i) {
                    Word v = index_word(i, len, al);
                    if (e.restrict_at(v).equals(e) && e.act(v) == v) witnessed = true;
                }
            }
            CHECK(witnessed);
        }
    }
}

TEST_CASE("definition-based stable membership agrees with the enumeration") {
    // Exhaustive over words of length <= 2 in states and inverses.
    for (const auto& name : {"chebyshev2", "basilica", "odometer", "tricycle"}) {
        AutomatonGroup g(builtin_automaton(name));
        KneadingGraph kg = build_kneading_graph(g.automaton());
        const int m = std::max(1, kg.period_m);
        StableSets ss = stable_sets(g);
        Alphabet al = g.automaton().alphabet();
        const int ns = g.automaton().state_count();

        std::vector<Element> words{g.identity()};
        for (int s = 0; s < ns; ++s)
            for (bool inv : {false, true}) words.push_back(g.generator(s, inv));
        std::size_t singles = words.size();
        for (std::size_t i = 1; i < singles; ++i)
            for (std::size_t j = 1; j < singles; ++j) words.push_back(words[i].times(words[j]));

        for (const auto& e : words) {
            bool by_def = false;
            for (int len = 1; len <= std::max(4, 2 * m) && !by_def; ++len) {
                std::uint64_t span = 1;
                for (int i = 0; i < len; ++i) span *= std::uint64_t(g.degree());
                for (std::uint64_t i = 0; i < span && !by_def; ++i)
                    if (e.restrict_at(index_word(i, len, al)).equals(e)) by_def = true;
            }
            bool enumerated = false;
            for (const auto& s : ss.n0) enumerated |= s.equals(e);
            CHECK(by_def == enumerated);
        }
    }
}

TEST_CASE("every N1 member is torsion with order bounded by the stable set") {
    for (const auto& name : builtin_names()) {
        AutomatonGroup g(builtin_automaton(name));
        StableSets ss = stable_sets(g);
        for (const auto& e : ss.n1) {
            bool torsion = false;
            Element p = g.identity();
            for (std::size_t k = 1; k <= ss.n0.size() + 1 && !torsion; ++k) {
                p = p.times(e);
                if (p.is_trivial()) torsion = true;
            }
            CHECK(torsion);
        }
    }
}

TEST_CASE("n1 structure: chebyshev decomposes as the loop power") {
    AutomatonGroup g(builtin_automaton("chebyshev2"));
    N1Structure s = n1_structure(g);
    CHECK(s.all_cycles_are_loops);
    CHECK(s.components_single_loop);
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].decomposed);
    CHECK(s.entries[0].loop_state == g.automaton().find_state("a"));
    CHECK(s.entries[0].exponent == 1);
    CHECK(s.entries[0].conjugator.is_trivial());
}

TEST_CASE("n1 structure: basilica has nothing to decompose") {
    AutomatonGroup g(builtin_automaton("basilica"));
    N1Structure s = n1_structure(g);
    CHECK(s.entries.empty());
    CHECK(s.all_cycles_are_loops);
    CHECK(s.components_single_loop);
}

TEST_CASE("n1 structure: the odd involutive pair decomposes per component") {
    // Two self-looping involutions in distinct components; the non-trivial
    // circuit elements are exactly the loop labels themselves.
    AutomatonGroup g(parse_automaton(
        "alphabet = 3\n"
        "a : (1 2) [a, 1, 1]\n"
        "b : (0 1) [1, 1, b]\n"));
    N1Structure s = n1_structure(g);
    CHECK(s.all_cycles_are_loops);
    CHECK(s.components_single_loop);
    REQUIRE(s.entries.size() == 2);
    std::set<int> loop_states;
    for (const auto& e : s.entries) {
        CHECK(e.decomposed);
        CHECK(e.exponent == 1);
        CHECK(e.conjugator.is_trivial());
        CHECK(e.element.equals(g.generator(e.loop_state)));
        loop_states.insert(e.loop_state);
    }
    CHECK(loop_states.size() == 2);
}

TEST_CASE("stable-set cap raises an explicit budget error") {
    Budgets tight;
    tight.stable_set_cap = 1;
    AutomatonGroup g(builtin_automaton("basilica"), tight);
    CHECK_THROWS_AS(stable_sets(g), BudgetError);
}

TEST_CASE("kneading preconditions are enforced") {
    Automaton bad = parse_automaton("alphabet = 2\na : () [a, a]\n");
    CHECK_THROWS_AS(kneading_sequences(bad), DomainError);
    AutomatonGroup g(bad);
    CHECK_THROWS_AS(stable_sets(g), DomainError);
}

}  // TEST_SUITE
