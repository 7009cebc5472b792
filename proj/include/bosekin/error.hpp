#pragma once

#include <stdexcept>
#include <string>

namespace bosekin {

/// Invalid argument or violated precondition supplied by the caller.
class InputError : public std::invalid_argument
{
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Collision direction is undefined because v == v_star.
class DegenerateDirectionError : public InputError
{
public:
    explicit DegenerateDirectionError(const std::string& what) : InputError(what) {}
};

/// Failure raised while a solver is running (as opposed to bad input).
class RuntimeFailure : public std::runtime_error
{
public:
    explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergenceError : public RuntimeFailure
{
public:
    NonConvergenceError(const std::string& what, double last_residual)
        : RuntimeFailure(what), last_residual_(last_residual)
    {
    }
    double last_residual() const { return last_residual_; }

private:
    double last_residual_;
};

class ContractionViolationError : public RuntimeFailure
{
public:
    explicit ContractionViolationError(const std::string& what) : RuntimeFailure(what) {}
};

} // namespace bosekin
