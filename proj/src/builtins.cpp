#include "autgrp/builtins.hpp"

#include <map>

#include "autgrp/errors.hpp"

namespace autgrp {

namespace {

const std::map<std::string, std::string>& table() {
    static const std::map<std::string, std::string> t = {
        {"chebyshev2",
         "alphabet = 2\n"
         "a : () [a, b]\n"
         "b : (0 1) [1, 1]\n"},
        {"basilica",
         "alphabet = 2\n"
         "a : (0 1) [1, b]\n"
         "b : () [1, a]\n"},
        {"odometer",
         "alphabet = 2\n"
         "c : (0 1) [c, 1]\n"},
        {"tricycle",
         "alphabet = 3\n"
         "a : (0 1 2) [1, b, 1]\n"
         "b : () [1, 1, c]\n"
         "c : () [1, a, 1]\n"},
    };
    return t;
}

}  // namespace

std::vector<std::string> builtin_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : table()) names.push_back(k);
    return names;
}

const std::string& builtin_dsl(const std::string& name) {
    auto it = table().find(name);
    if (it == table().end()) throw DomainError("unknown builtin automaton '" + name + "'");
    return it->second;
}

Automaton builtin_automaton(const std::string& name) { return parse_automaton(builtin_dsl(name)); }

}  // namespace autgrp
