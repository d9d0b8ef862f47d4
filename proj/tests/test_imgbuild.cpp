#include <set>

#include "doctest.h"

#include "autgrp/builtins.hpp"
#include "autgrp/errors.hpp"
#include "autgrp/imgbuild.hpp"
#include "autgrp/kneading.hpp"
#include "autgrp/permgeom.hpp"
#include "autgrp/wreath.hpp"

using namespace autgrp;

namespace {

const char* kSquareMinusTwo =
    "# z^2 - 2\n"
    "degree = 2\n"
    "point -2 -> 2\n"
    "point 2 -> 2\n"
    "point 0 -> -2\n"
    "fiber -2 : (0, 2, npc)\n"
    "fiber 2 : (-2, 1, pc), (2, 1, pc)\n";

const char* kBasilicaPortrait =
    "# z^2 - 1\n"
    "degree = 2\n"
    "point -1 -> 0\n"
    "point 0 -> -1\n"
    "fiber -1 : (0, 2, pc)\n"
    "fiber 0 : (-1, 1, pc)\n";  // the second simple preimage is elided

}  // namespace

TEST_SUITE("imgbuild") {

TEST_CASE("the z^2-2 portrait validates") {
    Portrait p = parse_portrait(kSquareMinusTwo);
    CHECK(validate_portrait(p).empty());
    CHECK(p.degree == 2);
    CHECK(p.postcritical.size() == 2);
}

TEST_CASE("the basilica portrait validates with a synthesized entry") {
    Portrait p = parse_portrait(kBasilicaPortrait);
    CHECK(validate_portrait(p).empty());
    // fiber over 0 was padded to sum 2
    int zero = p.find_point("0");
    for (std::size_t k = 0; k < p.postcritical.size(); ++k) {
        if (p.postcritical[k] != zero) continue;
        int sum = 0;
        for (const auto& e : p.fiber[k]) sum += e.multiplicity;
        CHECK(sum == 2);
        CHECK(p.fiber[k].size() == 2);
    }
}

TEST_CASE("fibers summing past the degree are diagnosed") {
    Portrait p = parse_portrait(kSquareMinusTwo);
    p.fiber[0].push_back({"", 1, false});
    auto diags = validate_portrait(p);
    bool found = false;
    for (const auto& d : diags) found |= d.find("sums to") != std::string::npos;
    CHECK(found);
}

TEST_CASE("programmatic builtin portraits validate") {
    CHECK(validate_portrait(chebyshev_portrait(2, false)).empty());
    CHECK(validate_portrait(chebyshev_portrait(3, false)).empty());
    CHECK(validate_portrait(chebyshev_portrait(3, true)).empty());
    CHECK(validate_portrait(chebyshev_portrait(4, false)).empty());
    CHECK(validate_portrait(chebyshev_portrait(5, false)).empty());
    CHECK(validate_portrait(chebyshev_portrait(5, true)).empty());
    CHECK(validate_portrait(power_portrait(2)).empty());
    CHECK(validate_portrait(power_portrait(3)).empty());
    CHECK(validate_portrait(basilica_portrait()).empty());
    CHECK_THROWS_AS(chebyshev_portrait(4, true), DomainError);
    CHECK_THROWS_AS(power_portrait(1), DomainError);
}

TEST_CASE("portrait text round-trips") {
    for (const Portrait& p : {chebyshev_portrait(3, true), power_portrait(3), basilica_portrait()}) {
        Portrait q = parse_portrait(to_text(p));
        CHECK(validate_portrait(q).empty());
        CHECK(q.degree == p.degree);
        CHECK(q.postcritical.size() == p.postcritical.size());
        CHECK(to_text(q) == to_text(p));
    }
}

TEST_CASE("z^2-2 builds a two-state dihedral automaton") {
    Automaton a = portrait_automaton(parse_portrait(kSquareMinusTwo));
    CHECK(a.state_count() == 2);
    CHECK(validate_kneading(a).all());
    AutomatonGroup g(a);
    // One state acts trivially on letters with restrictions {itself, other};
    // the partner is the swap with trivial restrictions.
    int plain = is_identity(a.root_perm(0)) ? 0 : 1;
    int swap = 1 - plain;
    CHECK(is_identity(a.root_perm(plain)));
    CHECK(a.root_perm(swap) == Perm{1, 0});
    std::multiset<int> restr{a.restriction(plain, 0), a.restriction(plain, 1)};
    CHECK(restr == std::multiset<int>{plain, swap});
    for (int x = 0; x < 2; ++x) CHECK(a.restriction(swap, x) == kIdentityState);
    // Same group behavior as the built-in: involutions, transitive product.
    CHECK(g.generator(plain).power(2).is_trivial());
    CHECK(g.generator(swap).power(2).is_trivial());
    CHECK(g.generator(plain).times(g.generator(swap)).spherically_transitive(10).transitive);
}

TEST_CASE("the z^2 portrait builds the odometer") {
    Automaton a = portrait_automaton(power_portrait(2));
    CHECK(a.state_count() == 1);
    CHECK(a.root_perm(0) == Perm{1, 0});
    // restriction to itself under exactly one letter
    int self_edges = 0;
    for (int x = 0; x < 2; ++x)
        if (a.restriction(0, x) == 0) ++self_edges;
    CHECK(self_edges == 1);
    AutomatonGroup g(a);
    CHECK(g.generator(0).spherically_transitive(12).transitive);
}

TEST_CASE("the z^2-1 portrait rebuilds the basilica up to renaming") {
    Automaton a = portrait_automaton(basilica_portrait());
    CHECK(a.state_count() == 2);
    CHECK(validate_kneading(a).all());
    AutomatonGroup g(a);
    StableSets ss = stable_sets(g);
    CHECK(ss.n0.size() == 7);
    CHECK(ss.n1.size() == 1);
    CHECK(ss.nucleus.size() == 7);
}

TEST_CASE("every built-in portrait automaton passes conditions 1-3 with a transitive product") {
    std::vector<Portrait> ps{chebyshev_portrait(2, false), chebyshev_portrait(3, false),
                             chebyshev_portrait(3, true),  chebyshev_portrait(4, false),
                             chebyshev_portrait(5, false), chebyshev_portrait(5, true),
                             power_portrait(2),            power_portrait(3),
                             basilica_portrait()};
    for (const auto& p : ps) {
        Automaton a = portrait_automaton(p);
        CHECK(validate_kneading(a).kneading());
        CHECK(int(a.state_count()) == int(p.postcritical.size()));
        AutomatonGroup g(a);
        CHECK(g.state_product().spherically_transitive(10).transitive);
        // Root cycle structure matches the fiber multiplicities.
        for (std::size_t k = 0; k < p.postcritical.size(); ++k) {
            std::multiset<int> want;
            for (const auto& e : p.fiber[k])
                if (e.multiplicity >= 2) want.insert(e.multiplicity);
            std::multiset<int> got;
            for (const auto& cyc : nontrivial_cycles(a.root_perm(int(k))))
                got.insert(int(cyc.size()));
            CHECK(want == got);
        }
    }
}

TEST_CASE("exceptional shapes: chebyshev parity for degrees 2..5") {
    CHECK(detect_exceptional_shape(portrait_automaton(chebyshev_portrait(2, false))).verdict ==
          ExceptionalReport::ChebyshevEven);
    CHECK(detect_exceptional_shape(portrait_automaton(chebyshev_portrait(3, false))).verdict ==
          ExceptionalReport::ChebyshevOdd);
    CHECK(detect_exceptional_shape(portrait_automaton(chebyshev_portrait(3, true))).verdict ==
          ExceptionalReport::ChebyshevOdd);
    CHECK(detect_exceptional_shape(portrait_automaton(chebyshev_portrait(4, false))).verdict ==
          ExceptionalReport::ChebyshevEven);
    CHECK(detect_exceptional_shape(portrait_automaton(chebyshev_portrait(5, false))).verdict ==
          ExceptionalReport::ChebyshevOdd);
    CHECK(detect_exceptional_shape(portrait_automaton(chebyshev_portrait(5, true))).verdict ==
          ExceptionalReport::ChebyshevOdd);
}

TEST_CASE("the built-in chebyshev2 automaton is the even shape") {
    CHECK(detect_exceptional_shape(builtin_automaton("chebyshev2")).verdict ==
          ExceptionalReport::ChebyshevEven);
}

TEST_CASE("power maps and the basilica are not exceptional shapes") {
    CHECK(detect_exceptional_shape(portrait_automaton(power_portrait(2))).verdict ==
          ExceptionalReport::NotExceptionalShape);
    CHECK(detect_exceptional_shape(portrait_automaton(power_portrait(3))).verdict ==
          ExceptionalReport::NotExceptionalShape);
    CHECK(detect_exceptional_shape(builtin_automaton("basilica")).verdict ==
          ExceptionalReport::NotExceptionalShape);
    CHECK(detect_exceptional_shape(builtin_automaton("tricycle")).verdict ==
          ExceptionalReport::NotExceptionalShape);
}

TEST_CASE("a single-point exceptional shape is recognized") {
    // A cubic with a non-critical fixed point 0 whose other preimage is a
    // double critical point, while the second critical orbit lands on a
    // separate fixed point w. Only the cycle at g0 fixes finitely many ends.
    Portrait p = parse_portrait(
        "degree = 3\n"
        "point 0 -> 0\n"
        "point v -> w\n"
        "point w -> w\n"
        "fiber 0 : (0, 1, pc), (_, 2, npc)\n"
        "fiber v : (_, 2, npc)\n"
        "fiber w : (v, 1, pc), (w, 1, pc)\n");
    REQUIRE(validate_portrait(p).empty());
    Automaton a = portrait_automaton(p);
    ExceptionalReport rep = detect_exceptional_shape(a);
    CHECK(rep.verdict == ExceptionalReport::SinglePoint);
    REQUIRE(rep.shape_states.size() == 1);
    CHECK(a.state_name(rep.shape_states[0]) == "g0");
}

TEST_CASE("sigma hints: chebyshev pairs are found, power and basilica are not") {
    auto hit = portrait_sigma_hint(chebyshev_portrait(2, false));
    REQUIRE(hit.has_value());
    CHECK(hit->size() == 2);
    hit = portrait_sigma_hint(chebyshev_portrait(3, true));
    REQUIRE(hit.has_value());
    CHECK(hit->size() == 2);
    CHECK_FALSE(portrait_sigma_hint(power_portrait(2)).has_value());
    CHECK_FALSE(portrait_sigma_hint(power_portrait(3)).has_value());
    CHECK_FALSE(portrait_sigma_hint(basilica_portrait()).has_value());
}

TEST_CASE("parse errors carry locations") {
    CHECK_THROWS_AS(parse_portrait("degree = 2\nnonsense row\n"), ParseError);
    CHECK_THROWS_AS(parse_portrait("point a -> b\n"), ParseError);
    CHECK_THROWS_AS(parse_portrait("degree = 2\nfiber q : (_, 2, npc)\n"), ParseError);
}

}  // TEST_SUITE
