#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autgrp/automaton.hpp"
#include "autgrp/config.hpp"
#include "autgrp/permutil.hpp"
#include "autgrp/wreath.hpp"

namespace autgrp {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Deterministic 64-bit generator (splitmix64) so sampled runs are
// reproducible byte for byte across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Uniform value in [0, n) by rejection; n >= 1.
    std::uint64_t below(std::uint64_t n);
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t worker);

private:
    std::uint64_t state_;
};

// Stabilizer chain with explicit transversals. Base points are taken in
// increasing point order (the first point moved at each level), generators
// are processed in a fixed order, so orders, transversals, and element
// enumeration are reproducible.
class StabilizerChain {
public:
    static StabilizerChain build(std::vector<Perm> generators, std::size_t num_points);

    std::size_t num_points() const { return n_; }
    const BigInt& order() const { return order_; }
    bool contains(const Perm& p) const;

    // Exactly uniform: one uniformly chosen transversal representative per
    // level, multiplied together.
    Perm sample(SplitMix64& rng) const;

    // Visits every element once (deterministic order). The caller is
    // responsible for checking order() against its budget first.
    void for_each_element(const std::function<void(const Perm&)>& fn) const;

private:
    struct Level {
        std::uint32_t base;
        // Strong generators homed here: they move this base but fix all
        // shallower bases. The orbit at level j is taken under every
        // generator homed at level j or deeper.
        std::vector<Perm> homed;
        std::vector<std::int32_t> position;  // orbit position per point, -1 outside
        std::vector<std::uint32_t> orbit;    // discovery order
        std::vector<Perm> transversal;       // u with u(base) = orbit[i]
    };

    void insert(std::size_t level, Perm g);
    void rebuild_orbit(std::size_t level);
    void complete(std::size_t level);

    std::size_t n_ = 0;
    std::vector<Level> levels_;
    BigInt order_ = 1;
};

// The group G_n: level-n actions of all states with a stabilizer chain.
struct LevelGroup {
    int level;
    int degree;
    std::vector<Perm> generators;
    StabilizerChain chain;
};

LevelGroup build_level_group(const Automaton& a, int n, const Budgets& b = {});

// One row of the fixed-point fraction table.
struct FStatRow {
    int n;
    BigInt order;
    bool exact;
    BigRat f_exact;           // when exact
    double f_estimate = 0.0;  // when sampled
    double ci_low = 0.0, ci_high = 0.0;
    std::uint64_t samples = 0;
};

enum class FStatMode { Exact, Sample, Auto };

struct FStatOptions {
    FStatMode mode = FStatMode::Auto;
    std::uint64_t samples = 0;  // 0 = budget default
    std::uint64_t seed = 0;
    int workers = 1;
    Budgets budgets;
};

// Fraction of elements of G_n fixing at least one length-n word, for
// n = 1..n_max. Exact rows enumerate G_n; sampled rows use uniform chain
// samples with a 95% Wilson interval.
std::vector<FStatRow> fstat(const Automaton& a, int n_max, const FStatOptions& opt);

// Joint distribution of the fixed-point counts (Y_1, ..., Y_n) over a
// uniform element of G_n, as exact multiplicities.
struct FPTable {
    int n;
    BigInt order;
    std::map<std::vector<std::uint64_t>, BigInt> rows;
};

FPTable fp_table(const Automaton& a, int n, const Budgets& b = {});

// Conditional means E(Y_n | Y_1..Y_{n-1}) in exact rationals, for
// 2 <= n <= n_max. The transitivity precondition makes the means match the
// previous count; require_transitive=false runs the arithmetic anyway and
// reports the violations.
struct MartingaleReport {
    bool transitive = false;
    int first_failing_level = 0;
    struct Row {
        int n;
        std::vector<std::uint64_t> history;
        BigInt class_size;
        BigRat mean;
        bool matches;  // mean == history.back()
    };
    std::vector<Row> rows;
    bool all_match() const;
};

MartingaleReport martingale_check(const Automaton& a, int n_max, bool require_transitive = true,
                                  const Budgets& b = {});

// Exact limiting fraction for two-involution dihedral actions: r/4 where r
// counts generators fixing at least one end. Preconditions: exactly two
// non-trivial states, both involutions, product spherically transitive.
BigRat dihedral_fraction(const Automaton& a, int transitivity_depth = 12,
                         const Budgets& b = {});

}  // namespace autgrp
