#pragma once

#include <stdexcept>
#include <string>

namespace hypmass {

// Evaluation outside a metric's declared domain (below a horizon, below the
// positivity radius of a truncated asymptotic metric, ...).
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Degenerate geometric input: zero-length tangent, vanishing length element,
// non-positive-definite metric at an evaluated point.
class geometry_error : public std::domain_error {
public:
    explicit geometry_error(const std::string& what) : std::domain_error(what) {}
};

// Malformed user input: bad CSV, non-positive grid data, inconsistent flags.
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// A mathematical hypothesis of the computation is violated by the data
// (e.g. boundary curvature k(phi) <= 0 somewhere).
class hypothesis_error : public std::runtime_error {
public:
    explicit hypothesis_error(const std::string& what) : std::runtime_error(what) {}
};

// Base class for outward-integration failures.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// Step size underflowed: the problem looks stiffer than the scheme can handle.
class stiffness_error : public solver_error {
public:
    explicit stiffness_error(const std::string& what) : solver_error(what) {}
};

// The computed solution violates a bound the continuum solution provably
// satisfies; this indicates a defect in the solver, not in the data.
class solver_bug_error : public solver_error {
public:
    explicit solver_bug_error(const std::string& what) : solver_error(what) {}
};

// The asymptotic tail fit did not converge; usually means r_max is too small.
class tail_error : public solver_error {
public:
    explicit tail_error(const std::string& what) : solver_error(what) {}
};

} // namespace hypmass
