#pragma once

#include <cstddef>
#include <cstdint>

namespace autgrp {

// Exploration and memory budgets. Exhaustion raises BudgetError; it never
// silently degrades an answer.
struct Budgets {
    // Triviality/equality decision: cap on distinct restriction words visited
    // and on the BFS depth of the restriction closure.
    std::size_t max_restrictions = 100000;
    int max_restriction_depth = 20;

    // Stable-set enumeration: cap on candidate elements before giving up on
    // confirming contraction.
    std::size_t stable_set_cap = 10000;

    // Largest d^n for which a level action may be materialized or walked.
    std::uint64_t max_level_points = std::uint64_t(1) << 22;

    // Largest group order enumerated element by element.
    std::uint64_t enumeration_budget = 10000000;

    // Default sample count for estimated fixed-point fractions.
    std::uint64_t default_samples = 100000;
};

}  // namespace autgrp
