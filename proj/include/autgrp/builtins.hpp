#pragma once

#include <string>
#include <vector>

#include "autgrp/automaton.hpp"

namespace autgrp {

// Named automata used throughout the tests and the CLI:
//   chebyshev2 : a = (a, b), b = (0 1)(1, 1)      dihedral, degree 2
//   basilica   : a = (0 1)(1, b), b = (1, a)
//   odometer   : c = (0 1)(c, 1)                   binary adding machine
//   tricycle   : three-state cycle over {0,1,2}
std::vector<std::string> builtin_names();
Automaton builtin_automaton(const std::string& name);
const std::string& builtin_dsl(const std::string& name);

}  // namespace autgrp
