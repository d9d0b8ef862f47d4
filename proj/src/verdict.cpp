#include "autgrp/verdict.hpp"

#include "autgrp/errors.hpp"
#include "autgrp/imgbuild.hpp"
#include "autgrp/kneading.hpp"
#include "autgrp/wreath.hpp"

namespace autgrp {

Verdict report_verdict(const Automaton& a, const Budgets& b) {
    KneadingReport rep = validate_kneading(a);
    if (!rep.all())
        throw DomainError("verdicts need an automaton passing conditions 1-4");

    Verdict v;
    ExceptionalReport ex = detect_exceptional_shape(a);
    switch (ex.verdict) {
        case ExceptionalReport::ChebyshevEven:
        case ExceptionalReport::ChebyshevOdd: {
            v.kind = Verdict::Fraction;
            v.value = dihedral_fraction(a, 12, b);
            v.rule = "dihedral-limit";
            v.detail = ex.verdict == ExceptionalReport::ChebyshevEven
                           ? "two-fixed-letter dihedral shape"
                           : "involutive-pair dihedral shape";
            return v;
        }
        case ExceptionalReport::SinglePoint:
            v.kind = Verdict::UnknownShape;
            v.rule = "single-point-shape";
            v.detail = "lone fixed letter carries the state itself; no limit value is known";
            return v;
        case ExceptionalReport::NotExceptionalShape:
            break;
    }

    // Cycle-state dichotomy: if every cycle state of the reduced Moore
    // diagram fixes zero or infinitely many ends, the limiting fraction
    // vanishes.
    AutomatonGroup g(a, b);
    MooreCycles mc = moore_cycle_structure(a);
    bool dichotomy = true;
    for (const auto& cyc : mc.cycles)
        for (int s : cyc)
            if (g.generator(s).classify_fixed_ends().kind == FixedEnds::Finite) dichotomy = false;
    if (dichotomy) {
        v.kind = Verdict::Fraction;
        v.value = BigRat(0);
        v.rule = "stable-cycle-dichotomy";
        v.detail = "every cycle state fixes zero or infinitely many ends";
        return v;
    }

    v.kind = Verdict::NoVerdict;
    v.rule = "none";
    v.detail = "no structural rule applies; no limit is claimed";
    return v;
}

std::string verdict_text(const Verdict& v) {
    switch (v.kind) {
        case Verdict::Fraction:
            return "F = " + v.value.str() + "  [rule: " + v.rule + "; " + v.detail + "]";
        case Verdict::UnknownShape:
            return "F unknown  [rule: " + v.rule + "; " + v.detail + "]";
        case Verdict::NoVerdict:
        default:
            return "no verdict  [" + v.detail + "]";
    }
}

}  // namespace autgrp
