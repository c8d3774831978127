#pragma once

#include <stdexcept>
#include <string>

namespace modfusion {

// Malformed user input: bad coordinates, carrier mismatches, invalid
// braiding matrices, unparsable configs. CLI exit code 1.
class invalid_input_error : public std::runtime_error {
public:
    explicit invalid_input_error(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration or brute-force routine was asked to exceed its
// configured size limit. CLI exit code 2.
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant that should hold for every valid pipeline call
// failed (integrality of multiplicities, descent well-definedness,
// overflow of the exact integer carrier). Indicates a bug, not bad
// input. CLI exit code 4.
class internal_invariant_error : public std::logic_error {
public:
    explicit internal_invariant_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace modfusion
