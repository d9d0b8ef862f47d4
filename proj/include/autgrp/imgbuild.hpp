#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autgrp/automaton.hpp"

namespace autgrp {

// Combinatorial post-critical data of a degree-d polynomial: named points
// with their images, and for every post-critical point the multiset of
// multiplicities of its preimages. Anonymous entries stand for preimages
// that never recur.
struct Portrait {
    struct FiberEntry {
        std::string point;  // empty = anonymous "_"
        int multiplicity = 1;
        bool postcritical = false;
    };

    int degree = 0;
    std::vector<std::string> points;            // declaration order
    std::vector<int> image;                     // per point; -1 = undeclared image
    std::vector<int> postcritical;              // indices of P, declaration order
    std::vector<std::vector<FiberEntry>> fiber;  // per P entry (parallel)

    int find_point(std::string_view name) const;
    bool is_postcritical(int point) const;
};

// Line-based portrait format:
//   degree = d
//   point NAME -> NAME
//   fiber NAME : (NAME|_, MULT, pc|npc), ...
// '#' comments. Fibers may omit anonymous simple entries; they are
// synthesized so multiplicities sum to the degree.
Portrait parse_portrait(std::string_view text);
std::string to_text(const Portrait& p);

// Checks every portrait invariant, in order: fiber sums, the critical
// multiplicity count, forward closure, post-critical orbit coverage, and
// entry/image consistency. Returns diagnostics instead of throwing.
std::vector<std::string> validate_portrait(const Portrait& p);

// Standard-action automaton of the portrait: one generator per
// post-critical point whose first-level action has one m-cycle per fiber
// entry, the post-critical entries carrying the matching generator as the
// restriction at exactly one position. Letters are assigned by
// lexicographic backtracking to the first choice satisfying the kneading
// conditions 1-3.
Automaton portrait_automaton(const Portrait& p);

// Built-in portraits. Chebyshev uses the {-1, 1} normalization; negate is
// only meaningful for odd degrees. power(d) is the z^d monomial; basilica
// is the z^2 - 1 critical orbit.
Portrait chebyshev_portrait(int degree, bool negate);
Portrait power_portrait(int degree);
Portrait basilica_portrait();

// Shape analysis of the cycles whose states fix finitely many ends.
struct ExceptionalReport {
    enum Verdict {
        NotExceptionalShape,
        ChebyshevEven,   // one cycle state with two first-level fixed points
        ChebyshevOdd,    // involutive pair, as one 2-cycle or two 1-cycles
        SinglePoint,     // lone fixed letter carrying the state itself
    } verdict = NotExceptionalShape;
    std::vector<int> shape_states;  // the states realizing the shape
};

// Precondition: the automaton passes kneading conditions 1-4.
ExceptionalReport detect_exceptional_shape(const Automaton& a);

// Best-effort search for an invariant set among the post-critical points:
// subsets S of size <= 2 with f^-1(S) minus critical entries equal to S as
// far as the declared fibers can tell. Fibers of points outside P are
// unknown, so a hit is a strong hint, not a proof.
std::optional<std::vector<int>> portrait_sigma_hint(const Portrait& p);

}  // namespace autgrp
