#pragma once

#include <stdexcept>
#include <string>

namespace treeminer {

// Malformed files, unknown node ids, mismatched configurations.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An adversary (or caller) asked for a move the game rules forbid.
class RuleViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An engine-side invariant failed. Always a bug or a parameter violation.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A proven cost bound was exceeded.
class BoundViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative solver gave up.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

} // namespace treeminer
