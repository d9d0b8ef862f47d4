#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "autgrp/permutil.hpp"
#include "autgrp/words.hpp"

namespace autgrp {

// Restriction target meaning the distinguished identity state "1".
inline constexpr int kIdentityState = -1;

// A finite invertible automaton over {0, ..., d-1}: each state carries a
// permutation of the alphabet (its action on the first level) and one
// restriction per letter. States define automorphisms of the d-ary tree by
// wreath recursion. The identity state is implicit and never declared.
class Automaton {
public:
    Automaton(Alphabet alphabet, std::vector<std::string> names,
              std::vector<Perm> root_perms, std::vector<std::vector<int>> restrictions);

    const Alphabet& alphabet() const { return alphabet_; }
    int degree() const { return alphabet_.size(); }
    int state_count() const { return int(names_.size()); }

    const std::string& state_name(int s) const { return names_[s]; }
    // Index of a named state, kIdentityState for "1", or -2 if unknown.
    int find_state(std::string_view name) const;

    const Perm& root_perm(int s) const { return root_perms_[s]; }
    // Restriction of state s at letter x: a state index or kIdentityState.
    int restriction(int s, int x) const { return restrictions_[s][int(x)]; }

private:
    Alphabet alphabet_;
    std::vector<std::string> names_;
    std::vector<Perm> root_perms_;
    std::vector<std::vector<int>> restrictions_;
};

// Parses the line-based automaton DSL:
//
//   file     := "alphabet" "=" INT NEWLINE (staterow)*
//   staterow := NAME ":" PERM "[" restr ("," restr)* "]"
//   restr    := NAME | "1"
//   PERM     := "()" | ( "(" INT (WS INT)+ ")" )+
//
// '#' starts a comment; blank lines are skipped. Restriction lists are
// ordered by letter and must have exactly d entries. Forward references are
// fine. A row named "1" must describe the identity and is folded into the
// implicit identity state.
Automaton parse_automaton(std::string_view text);

// Canonical DSL serialization; parse_automaton round-trips it.
std::string to_dsl(const Automaton& a);

// The inverse automaton: state s_inv acts as the inverse permutation, and
// (s_inv)|_x = (s|_{s_inv(x)})_inv. State names gain an "_inv" suffix.
Automaton inverse_automaton(const Automaton& a);

// Per-state growth classification of the automorphism defined by each state.
struct StateClassification {
    struct Entry {
        bool finite_state = true;  // always: these are finite automata
        bool bounded = false;
        bool finitary = false;
        // q_profile[k] = number of length-(k+1) words with non-trivial
        // restriction, for k+1 <= requested depth.
        std::vector<std::uint64_t> q_profile;
    };
    std::vector<Entry> states;
};

// finitary(s): no cycle of non-trivial states is reachable from s in the
// Moore diagram. bounded(s): in the non-trivial sub-diagram reachable from s,
// cycles are pairwise disjoint and no cycle reaches a different cycle.
// q_profile holds exact counts for levels 1..depth.
StateClassification classify_states(const Automaton& a, int depth);

// Moore diagram in DOT form. With reduced=true the identity vertex and all
// arrows into it are omitted; otherwise the implicit identity vertex appears
// with its self-loops.
std::string moore_dot(const Automaton& a, bool reduced);

// True if the state is semantically trivial (acts as the identity on the
// whole tree). Purely structural: trivial states are exactly those from
// which no state with a non-identity root permutation is reachable.
std::vector<bool> trivial_states(const Automaton& a);

}  // namespace autgrp
