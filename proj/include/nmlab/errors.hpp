#pragma once

#include <stdexcept>
#include <string>

namespace nmlab {

// Operand shapes disagree (lengths, arities, row widths).
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A length precondition failed (slice past the end, too few random bits).
struct LengthError : std::length_error {
    using std::length_error::length_error;
};

// A parameter schedule is infeasible. `constraint` names the first failing rule.
struct ParameterError : std::invalid_argument {
    std::string constraint;
    ParameterError(std::string name, const std::string& detail)
        : std::invalid_argument(name + ": " + detail), constraint(std::move(name)) {}
};

// An exhaustive computation would exceed the representable domain.
struct DomainCapError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A named variable is not present.
struct LookupError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace nmlab
