#pragma once

#include <stdexcept>
#include <string>

namespace padopt {

// Bad input: malformed datasets, invalid constraint sequences, infeasible
// windows, schema violations. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A solver postcondition did not hold. The CLI maps this to exit code 2.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace padopt
