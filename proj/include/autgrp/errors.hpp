#pragma once

#include <stdexcept>
#include <string>

namespace autgrp {

// Location-tagged diagnostic for parser errors. Lines and columns are 1-based;
// zero means "not applicable".
struct Diagnostic {
    int line = 0;
    int column = 0;
    std::string message;
};

// Malformed input: bad DSL text, bad portrait file, invalid word literal.
class ParseError : public std::runtime_error {
public:
    ParseError(Diagnostic d, const std::string& what_arg)
        : std::runtime_error(what_arg), diag_(std::move(d)) {}
    explicit ParseError(Diagnostic d)
        : std::runtime_error(format(d)), diag_(std::move(d)) {}
    const Diagnostic& diagnostic() const { return diag_; }

private:
    static std::string format(const Diagnostic& d) {
        std::string s;
        if (d.line > 0) {
            s += "line " + std::to_string(d.line);
            if (d.column > 0) s += ":" + std::to_string(d.column);
            s += ": ";
        }
        return s + d.message;
    }
    Diagnostic diag_;
};

// Violated precondition or invariant on otherwise well-formed data
// (wrong alphabet, shape mismatch, failed validation).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured exploration or memory budget ran out before the computation
// could decide. Never reported as a (possibly wrong) answer.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace autgrp
