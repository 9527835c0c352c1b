#pragma once

#include <stdexcept>
#include <string>

namespace wzlab {

/// Raised when an argument violates an operation's precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a state lies outside a model's admissible region.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// V(x) = 0 with a nonzero numerator in a |.|^2 / (eta V) quotient.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace wzlab
