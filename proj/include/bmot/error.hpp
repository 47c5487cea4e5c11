#pragma once

#include <stdexcept>
#include <string>

namespace bmot {

// Malformed or inconsistent user data (bad files, dimension or barycentre
// mismatch, out-of-range parameters). The CLI maps it to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A conic solve that did not reach an optimal, certified point. Exit code 2.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bmot
