#pragma once

#include <stdexcept>
#include <string>

namespace polymin {

/// Bad user input or violated precondition (CLI maps this to exit code 2).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation failed at runtime: singular point, corner frame, infeasible
/// determinant, under-resolved curve, and the like (CLI exit code 1).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace polymin
