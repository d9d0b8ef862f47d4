#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autgrp/automaton.hpp"
#include "autgrp/wreath.hpp"
#include "autgrp/words.hpp"

namespace autgrp {

// Outcome of the four structural conditions on a finite invertible
// automaton. Conditions 1-3 make it a kneading automaton; condition 4 is
// checked through its kneading-graph equivalent (two one-cycles with
// distinct underlying states in one component).
struct KneadingReport {
    struct InArrowViolation {
        int state;
        int arrows;
    };
    struct CycleViolation {
        int state;
        std::vector<std::uint32_t> cycle;
        int first_letter, second_letter;
    };
    struct ComponentViolation {
        std::string vertex1, vertex2;  // rendered kneading sequences
        int state1, state2;            // loop labels (underlying states)
    };

    bool unique_in_arrows = false;   // condition 1
    bool cycle_restrictions = false;  // condition 2
    bool tree_like = false;           // condition 3
    bool single_loop_components = false;  // condition 4

    std::optional<InArrowViolation> in_arrow_witness;
    std::optional<CycleViolation> cycle_witness;
    std::optional<ComponentViolation> component_witness;

    bool kneading() const { return unique_in_arrows && cycle_restrictions && tree_like; }
    bool all() const { return kneading() && single_loop_components; }
};

KneadingReport validate_kneading(const Automaton& a);

// Cycles of the reduced Moore diagram, with the letter along which each
// cycle state restricts to its successor. Meaningful once condition 1 holds.
struct MooreCycles {
    std::vector<int> cycle_letter;         // per state; -1 when not in a cycle
    std::vector<std::vector<int>> cycles;  // members in cycle order
};
MooreCycles moore_cycle_structure(const Automaton& a);

// Purely periodic kneading sequence of a cycle state or its inverse.
struct KneadingSequence {
    SymLetter who;
    Word repeating_block;  // minimal period
    int period() const { return int(repeating_block.size()); }
    Word prefix(int n) const;
};

// Sequences for every state lying in a cycle of the reduced Moore diagram,
// and for their formal inverses. Requires conditions 1-2.
std::vector<KneadingSequence> kneading_sequences(const Automaton& a);

struct KneadingGraph {
    int period_m = 0;
    std::vector<Word> vertices;  // distinct length-m sequences, lex order
    struct Edge {
        int from, to;
        SymLetter label;
    };
    std::vector<Edge> edges;  // one per cycle state and inverse

    std::vector<int> vertex_component() const;  // undirected components
    int find_vertex(const Word& w) const;
};

// Requires conditions 1-2.
KneadingGraph build_kneading_graph(const Automaton& a);

std::string kneading_graph_dot(const KneadingGraph& g, const Automaton& a);

// Stable sets of the generated group: N0 (elements equal to a proper
// restriction of themselves), N1 (those also fixing the witnessing word),
// and the nucleus (all restrictions of N0 members).
struct StableSets {
    std::vector<Element> n0;
    std::vector<Element> n1;
    std::vector<Element> nucleus;
    // Start vertex of a witnessing circuit for each n1 entry (parallel
    // to n1); -1 for the identity.
    std::vector<int> n1_start_vertex;
};

// Requires conditions 1-3. Enumerates labels of walks in the kneading graph
// by breadth-first search over (vertex, element) pairs, deduplicating with
// the exact equality decision; capped by budgets().stable_set_cap.
StableSets stable_sets(const AutomatonGroup& g);

// Structure of N1 under condition 4: every non-trivial member is a
// conjugate of a power of a loop label.
struct N1Structure {
    struct Entry {
        Element element;
        int loop_state;     // underlying automaton state of the loop
        int exponent;
        Element conjugator;  // h with element == h^-1 * loop^exponent * h
        bool decomposed;
    };
    std::vector<Entry> entries;  // non-trivial N1 members
    bool all_cycles_are_loops = true;
    bool components_single_loop = true;
    bool all_decomposed() const;
};

// Requires conditions 1-4.
N1Structure n1_structure(const AutomatonGroup& g);

}  // namespace autgrp
