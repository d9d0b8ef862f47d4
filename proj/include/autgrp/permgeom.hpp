#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autgrp/automaton.hpp"
#include "autgrp/permutil.hpp"

namespace autgrp {

// An ordered multiset of permutations of {0, ..., d-1}; repeats allowed.
struct PermMultiset {
    int domain;
    std::vector<Perm> members;
};

// Bipartite graph of a reduced cycle diagram: white vertices are the domain
// points, black vertices are the non-trivial cycles of the members, and each
// black vertex joins the points of its cycle.
struct CycleGraph {
    int domain;
    struct BlackVertex {
        int member;                         // index into the multiset
        std::vector<std::uint32_t> points;  // the cycle, smallest point first
    };
    std::vector<BlackVertex> blacks;

    std::size_t vertex_count() const { return std::size_t(domain) + blacks.size(); }
    std::size_t edge_count() const;
    int component_count() const;  // isolated white vertices count
    bool is_tree() const;
};

CycleGraph cycle_graph(const PermMultiset& t);

// True iff the cycle graph is connected and acyclic.
bool is_tree_like(const PermMultiset& t);

// Materializes every state's action on X^n and tests tree-likeness.
bool treelike_at_level(const Automaton& a, int n);

// Per-pair fixed-point sums and Euler data of the reduced two-member cycle
// diagram, plus bound checks that must hold for tree-like multisets.
struct PairEuler {
    int i, j;
    std::size_t fix_i, fix_j;
    std::size_t V, E, F;  // F includes the outer face
    int components;
    bool euler_identity;   // V - E + F == 2 + (components - 1)
    bool fix_sum_ok;       // fix_i + fix_j >= 2
    bool low_sum_isolated;  // sum <= 3 implies every other member is trivial
};

struct TreelikeReport {
    std::size_t total_cells;
    bool cell_bound_ok;  // total_cells <= domain - 1
    std::vector<PairEuler> pairs;
    bool all_ok() const;
};

// Precondition: t is tree-like (checked; DomainError otherwise).
TreelikeReport treeperms_report(const PermMultiset& t);

// DOT rendering: white vertices as circles, black as squares.
std::string cycle_graph_dot(const PermMultiset& t);

}  // namespace autgrp
