#pragma once

#include <stdexcept>
#include <string>

namespace infc {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad input data: malformed config, inconsistent dimensions, out-of-range
// parameters.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// Enumeration or table size above a configured cap.
class SizeLimitError : public Error {
public:
    explicit SizeLimitError(const std::string& what) : Error(what) {}
};

// An operating point that violates a stability condition (gamma >= mu,
// rho >= 1, pole of a cost model inside the feasible box).
class InstabilityError : public Error {
public:
    explicit InstabilityError(const std::string& what) : Error(what) {}
};

// Source with zero entropy: entropic surjectivity is undefined.
class DegenerateSourceError : public Error {
public:
    explicit DegenerateSourceError(const std::string& what) : Error(what) {}
};

// Iterative solver failed to reach its tolerance. Carries the best value
// seen and the final convergence gap for diagnosis.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double best_value, double gap)
        : Error(what), best_value(best_value), gap(gap) {}
    double best_value;
    double gap;
};

// Constraint system with no feasible point. `where` names the offending
// node/class when known.
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what, std::string where = {})
        : Error(what), where(std::move(where)) {}
    std::string where;
};

}  // namespace infc
