#include <cmath>
#include <map>
#include <set>

#include "doctest.h"

#include "autgrp/builtins.hpp"
#include "autgrp/errors.hpp"
#include "autgrp/fixstat.hpp"
#include "autgrp/imgbuild.hpp"
#include "oracles.hpp"

using namespace autgrp;

namespace {

// Wilson-Hilferty approximation of the chi-square 99% critical value.
double chi2_crit99(int dof) {
    const double k = double(dof);
    const double z99 = 2.3263478740408408;
    const double t = 1.0 - 2.0 / (9.0 * k) + z99 * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

BigInt pow2(int n) { return BigInt(1) << n; }

}  // namespace

TEST_SUITE("fixstat") {

TEST_CASE("chebyshev level groups are dihedral of order 2*2^n") {
    Automaton a = builtin_automaton("chebyshev2");
    for (int n = 2; n <= 8; ++n) {
        LevelGroup lg = build_level_group(a, n);
        CHECK(lg.chain.order() == 2 * pow2(n));
    }
    // n = 1 collapses: the plain state acts trivially on one letter level.
    CHECK(build_level_group(a, 1).chain.order() == 2);
}

TEST_CASE("odometer level groups are cyclic of order 2^n") {
    Automaton a = builtin_automaton("odometer");
    for (int n = 1; n <= 8; ++n) CHECK(build_level_group(a, n).chain.order() == pow2(n));
}

TEST_CASE("basilica level-2 group has order 8") {
    CHECK(build_level_group(builtin_automaton("basilica"), 2).chain.order() == 8);
}

TEST_CASE("chain orders match brute-force closures") {
    for (const auto& name : builtin_names()) {
        Automaton a = builtin_automaton(name);
        AutomatonGroup g(a);
        for (int n = 1; n <= 5; ++n) {
            std::uint64_t points = 1;
            for (int i = 0; i < n; ++i) points *= std::uint64_t(a.degree());
            if (points > 4096) break;
            std::vector<Perm> gens;
            for (int s = 0; s < a.state_count(); ++s)
                gens.push_back(g.generator(s).level_permutation(n));
            LevelGroup lg = build_level_group(a, n);
            if (lg.chain.order() > 100000) break;
            std::uint64_t brute = oracle::closure_order(gens, 100000);
            REQUIRE(brute > 0);
            CHECK(lg.chain.order() == BigInt(brute));
        }
    }
}

TEST_CASE("membership agrees with the brute-force element list") {
    Automaton a = builtin_automaton("basilica");
    AutomatonGroup g(a);
    LevelGroup lg = build_level_group(a, 2);
    auto elements = oracle::closure_elements(lg.generators, 1000);
    REQUIRE(elements.size() == 8);
    for (const Perm& p : elements) CHECK(lg.chain.contains(p));
    // A permutation outside the group: a 3-cycle is not in this 2-group.
    Perm odd = identity_perm(4);
    odd[0] = 1;
    odd[1] = 2;
    odd[2] = 0;
    CHECK_FALSE(lg.chain.contains(odd));
}

TEST_CASE("enumeration visits each element exactly once") {
    LevelGroup lg = build_level_group(builtin_automaton("chebyshev2"), 3);
    std::set<Perm> seen;
    lg.chain.for_each_element([&](const Perm& p) { CHECK(seen.insert(p).second); });
    CHECK(BigInt(seen.size()) == lg.chain.order());
}

TEST_CASE("sampling is deterministic given the seed") {
    LevelGroup lg = build_level_group(builtin_automaton("basilica"), 4);
    SplitMix64 r1(42), r2(42);
    for (int i = 0; i < 50; ++i) CHECK(lg.chain.sample(r1) == lg.chain.sample(r2));
    SplitMix64 r3(43);
    bool all_same = true;
    SplitMix64 r4(42);
    for (int i = 0; i < 50; ++i) all_same &= lg.chain.sample(r3) == lg.chain.sample(r4);
    CHECK_FALSE(all_same);
}

TEST_CASE("chain samples are uniform (chi-square at 99%)") {
    LevelGroup lg = build_level_group(builtin_automaton("chebyshev2"), 3);
    REQUIRE(lg.chain.order() == 16);
    std::map<Perm, int> index;
    int next = 0;
    lg.chain.for_each_element([&](const Perm& p) { index[p] = next++; });
    std::vector<std::uint64_t> counts(16, 0);
    SplitMix64 rng(20250810);
    const std::uint64_t samples = 10000;
    for (std::uint64_t i = 0; i < samples; ++i) ++counts[std::size_t(index.at(lg.chain.sample(rng)))];
    const double expected = double(samples) / 16.0;
    double chi2 = 0;
    for (auto c : counts) {
        const double dev = double(c) - expected;
        chi2 += dev * dev / expected;
    }
    CHECK(chi2 < chi2_crit99(15));
}

TEST_CASE("the trivial group samples the identity forever") {
    LevelGroup lg = build_level_group(parse_automaton("alphabet = 2\n"), 3);
    CHECK(lg.chain.order() == 1);
    SplitMix64 rng(7);
    CHECK(is_identity(lg.chain.sample(rng)));
}

TEST_CASE("exact fixed-point fractions for the chebyshev group") {
    FStatOptions opt;
    opt.mode = FStatMode::Exact;
    auto rows = fstat(builtin_automaton("chebyshev2"), 6, opt);
    // (1 + 2^{n-1}) / 2^{n+1}
    for (const auto& row : rows) {
        CHECK(row.exact);
        CHECK(row.f_exact == BigRat(1 + pow2(row.n - 1), pow2(row.n + 1)));
    }
    CHECK(rows[2].f_exact == BigRat(5, 16));
}

TEST_CASE("the identity automaton has fraction one at every level") {
    FStatOptions opt;
    opt.mode = FStatMode::Exact;
    for (const auto& row : fstat(parse_automaton("alphabet = 2\n"), 5, opt))
        CHECK(row.f_exact == BigRat(1));
}

TEST_CASE("odometer fractions count only the identity") {
    FStatOptions opt;
    opt.mode = FStatMode::Exact;
    auto rows = fstat(builtin_automaton("odometer"), 6, opt);
    for (const auto& row : rows) CHECK(row.f_exact == BigRat(1, pow2(row.n)));
    CHECK(rows[2].f_exact == BigRat(1, 8));
}

TEST_CASE("degree-4 dihedral fractions follow the involution-class count") {
    // Exactly one generator class keeps fixed points, so the fixing count
    // is 1 + 4^n/2 out of 2*4^n at every level.
    Automaton a = portrait_automaton(chebyshev_portrait(4, false));
    FStatOptions opt;
    opt.mode = FStatMode::Exact;
    auto rows = fstat(a, 5, opt);
    for (const auto& r : rows) {
        BigInt dn = 1;
        for (int i = 0; i < r.n; ++i) dn *= 4;
        CHECK(r.order == 2 * dn);
        CHECK(r.f_exact == BigRat(1 + dn / 2, 2 * dn));
    }
}

TEST_CASE("exact fractions are non-increasing for all built-ins") {
    FStatOptions opt;
    opt.mode = FStatMode::Exact;
    for (const auto& name : builtin_names()) {
        // As deep as the enumeration budget allows.
        std::vector<FStatRow> rows;
        for (int depth = 8; depth >= 1; --depth) {
            try {
                rows = fstat(builtin_automaton(name), depth, opt);
                break;
            } catch (const BudgetError&) {
            }
        }
        REQUIRE(rows.size() >= 3);
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].f_exact <= rows[i - 1].f_exact);
    }
}

TEST_CASE("sampled intervals cover the exact value in at least 90% of 50 trials") {
    Automaton a = builtin_automaton("chebyshev2");
    FStatOptions exact_opt;
    exact_opt.mode = FStatMode::Exact;
    BigRat truth = fstat(a, 4, exact_opt)[3].f_exact;
    const double truth_d = double(boost::multiprecision::numerator(truth)) /
                           double(boost::multiprecision::denominator(truth));
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        FStatOptions opt;
        opt.mode = FStatMode::Sample;
        opt.samples = 2000;
        opt.seed = seed;
        auto row = fstat(a, 4, opt)[3];
        CHECK_FALSE(row.exact);
        if (row.ci_low <= truth_d && truth_d <= row.ci_high) ++covered;
    }
    CHECK(covered >= 45);
}

TEST_CASE("sampling requires workers to agree with the single-thread result") {
    Automaton a = builtin_automaton("basilica");
    FStatOptions one;
    one.mode = FStatMode::Sample;
    one.samples = 4000;
    one.seed = 99;
    one.workers = 1;
    FStatOptions four = one;
    four.workers = 4;
    auto r1 = fstat(a, 3, one);
    auto r4 = fstat(a, 3, four);
    // Worker substreams partition the samples, so totals differ from the
    // single stream by scheduling-independent re-seeding only; both must be
    // deterministic for their own configuration.
    auto r1b = fstat(a, 3, one);
    auto r4b = fstat(a, 3, four);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].f_estimate == r1b[i].f_estimate);
        CHECK(r4[i].f_estimate == r4b[i].f_estimate);
    }
}

TEST_CASE("auto mode switches to sampling beyond the enumeration budget") {
    FStatOptions opt;
    opt.mode = FStatMode::Auto;
    opt.budgets.enumeration_budget = 64;
    opt.samples = 500;
    opt.seed = 5;
    auto rows = fstat(builtin_automaton("chebyshev2"), 6, opt);
    CHECK(rows[0].exact);
    CHECK_FALSE(rows[5].exact);  // order 128 > 64
    FStatOptions strict = opt;
    strict.mode = FStatMode::Exact;
    CHECK_THROWS_AS(fstat(builtin_automaton("chebyshev2"), 6, strict), BudgetError);
}

TEST_CASE("fp table for the chebyshev group at level 2") {
    FPTable t = fp_table(builtin_automaton("chebyshev2"), 2);
    CHECK(t.order == 8);
    BigInt total = 0;
    for (const auto& [ys, mult] : t.rows) total += mult;
    CHECK(total == 8);
    CHECK(t.rows.at({2, 4}) == 1);
    CHECK(t.rows.at({2, 2}) == 2);
    CHECK(t.rows.at({2, 0}) == 1);
    CHECK(t.rows.at({0, 0}) == 4);
}

TEST_CASE("fp table of the trivial group is a single full row") {
    FPTable t = fp_table(parse_automaton("alphabet = 2\n"), 3);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows.begin()->first == std::vector<std::uint64_t>{2, 4, 8});
    CHECK(t.rows.begin()->second == 1);
}

TEST_CASE("basilica fp-table multiplicities sum to the group order") {
    FPTable t = fp_table(builtin_automaton("basilica"), 3);
    BigInt total = 0;
    for (const auto& [ys, mult] : t.rows) total += mult;
    CHECK(total == t.order);
    // Row shape: counts are bounded by the level size and by d times the
    // previous count.
    for (const auto& [ys, mult] : t.rows) {
        std::uint64_t cap = 1;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            cap *= 2;
            CHECK(ys[i] <= cap);
            if (i > 0) CHECK(ys[i] <= 2 * ys[i - 1]);
        }
    }
    // Oracle: the order matches the brute-force closure.
    LevelGroup lg = build_level_group(builtin_automaton("basilica"), 3);
    CHECK(BigInt(oracle::closure_order(lg.generators, 100000)) == t.order);
}

TEST_CASE("fp-table marginal matches sampled Y_n frequencies (chi-square)") {
    Automaton a = builtin_automaton("chebyshev2");
    const int n = 3;
    FPTable t = fp_table(a, n);
    std::map<std::uint64_t, double> expected;  // Y_n value -> probability
    for (const auto& [ys, mult] : t.rows)
        expected[ys.back()] += double(mult) / double(t.order);
    LevelGroup lg = build_level_group(a, n);
    SplitMix64 rng(31337);
    const std::uint64_t samples = 20000;
    std::map<std::uint64_t, std::uint64_t> observed;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Perm p = lg.chain.sample(rng);
        std::uint64_t fixed = 0;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (p[j] == j) ++fixed;
        ++observed[fixed];
    }
    double chi2 = 0;
    int bins = 0;
    for (const auto& [value, prob] : expected) {
        const double want = prob * double(samples);
        const double got = double(observed[value]);
        chi2 += (got - want) * (got - want) / want;
        ++bins;
    }
    CHECK(chi2 < chi2_crit99(bins - 1));
}

TEST_CASE("martingale equalities hold exactly for chebyshev and basilica") {
    auto cheb = martingale_check(builtin_automaton("chebyshev2"), 4);
    CHECK(cheb.transitive);
    CHECK(cheb.all_match());
    auto bas = martingale_check(builtin_automaton("basilica"), 3);
    CHECK(bas.transitive);
    CHECK(bas.all_match());
}

TEST_CASE("the non-transitive two-element group violates the equality") {
    Automaton a = parse_automaton("alphabet = 2\nb : (0 1) [1, 1]\n");
    CHECK_THROWS_AS(martingale_check(a, 2), DomainError);
    auto rep = martingale_check(a, 2, false);
    CHECK_FALSE(rep.transitive);
    CHECK(rep.first_failing_level == 2);
    REQUIRE_FALSE(rep.all_match());
    bool found = false;
    for (const auto& row : rep.rows) {
        if (row.history == std::vector<std::uint64_t>{2}) {
            CHECK(row.mean == BigRat(4));
            CHECK_FALSE(row.matches);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("dihedral fractions for the chebyshev family") {
    CHECK(dihedral_fraction(builtin_automaton("chebyshev2")) == BigRat(1, 4));
    CHECK(dihedral_fraction(portrait_automaton(chebyshev_portrait(2, false))) == BigRat(1, 4));
    CHECK(dihedral_fraction(portrait_automaton(chebyshev_portrait(3, true))) == BigRat(1, 2));
    CHECK(dihedral_fraction(portrait_automaton(chebyshev_portrait(3, false))) == BigRat(1, 2));
    CHECK(dihedral_fraction(portrait_automaton(chebyshev_portrait(5, false))) == BigRat(1, 2));
    CHECK(dihedral_fraction(portrait_automaton(chebyshev_portrait(4, false))) == BigRat(1, 4));
}

TEST_CASE("dihedral preconditions are shape errors") {
    CHECK_THROWS_AS(dihedral_fraction(builtin_automaton("basilica")), DomainError);
    CHECK_THROWS_AS(dihedral_fraction(builtin_automaton("odometer")), DomainError);
}

TEST_CASE("sampled fixed-point sequences are eventually constant") {
    // For groups with a transitive element the per-sample sequence of
    // fixed-point counts settles. The proxy for a finite window is a
    // constant tail (last two counts equal).
    auto settled_fraction = [&](const char* name, int depth) {
        LevelGroup lg = build_level_group(builtin_automaton(name), depth);
        SplitMix64 rng(777);
        const int samples = 10000;
        int settled = 0;
        for (int i = 0; i < samples; ++i) {
            Perm p = lg.chain.sample(rng);
            std::uint64_t span = p.size();
            std::uint64_t last = 0, before = 0;
            for (int j = 1; j <= depth; ++j) {
                std::uint64_t step = span >> j;
                std::uint64_t count = 0;
                for (std::uint64_t blk = 0; blk < (span / step); ++blk)
                    if (p[blk * step] / step == blk) ++count;
                if (j == depth - 1) before = count;
                if (j == depth) last = count;
            }
            if (last == before) ++settled;
        }
        return settled;
    };
    // Dihedral and cyclic groups settle almost immediately.
    CHECK(settled_fraction("chebyshev2", 12) >= 9900);
    CHECK(settled_fraction("odometer", 12) >= 9900);
    // The basilica settles slowly (about one extra percent per level); its
    // level-12 chain is out of reach, so assert the rising trend at the
    // depths that build quickly.
    int b6 = settled_fraction("basilica", 6);
    int b8 = settled_fraction("basilica", 8);
    CHECK(b8 > b6);
    CHECK(b8 >= 9000);
}

}  // TEST_SUITE
