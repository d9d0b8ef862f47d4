#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace autgrp {

// A permutation of {0, ..., n-1} stored as its image table.
using Perm = std::vector<std::uint32_t>;

Perm identity_perm(std::size_t n);
bool is_identity(const Perm& p);
bool is_permutation(const Perm& p);

// (p * q)(x) = p(q(x)); q acts first.
Perm compose(const Perm& p, const Perm& q);
Perm inverse_perm(const Perm& p);

std::vector<std::uint32_t> fixed_points(const Perm& p);
std::size_t count_fixed_points(const Perm& p);

// Cycles of length >= 2, each rotated to start at its smallest element,
// ordered by that element.
std::vector<std::vector<std::uint32_t>> nontrivial_cycles(const Perm& p);

bool is_single_n_cycle(const Perm& p);

// Disjoint-cycle notation with fixed points omitted; identity is "()".
std::string format_cycles(const Perm& p);

// Parses "()" or a sequence of "(i j ...)" cycles over {0, ..., n-1}.
// Reports overlapping cycles and out-of-range entries.
Perm parse_cycles(std::string_view text, std::size_t n);

}  // namespace autgrp
