#pragma once

#include <optional>
#include <string>

#include "autgrp/automaton.hpp"
#include "autgrp/fixstat.hpp"

namespace autgrp {

// A limiting fixed-point fraction claim, always justified by a named
// structural rule; never extrapolated from finite tables.
struct Verdict {
    enum Kind {
        Fraction,      // value holds, with rule
        UnknownShape,  // single-point exceptional shape; no value known
        NoVerdict,     // no structural rule applies
    } kind = NoVerdict;
    BigRat value;      // for Fraction
    std::string rule;  // e.g. "dihedral-limit", "stable-cycle-dichotomy"
    std::string detail;
};

// Applies, in order: exceptional-shape analysis (dihedral limits 1/4 and
// 1/2), then the cycle-state dichotomy (every cycle state fixes zero or
// infinitely many ends -> fraction 0). Precondition: conditions 1-4 hold.
Verdict report_verdict(const Automaton& a, const Budgets& b = {});

std::string verdict_text(const Verdict& v);

}  // namespace autgrp
