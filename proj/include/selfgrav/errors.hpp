#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace selfgrav {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parameter violates its documented precondition (e.g. nonpositive polytropic index).
class invalid_parameter_error : public error {
public:
    using error::error;
};

/// A constructed object fails one of its type invariants (e.g. non-convex sample table).
class invariant_violation_error : public error {
public:
    using error::error;
};

/// Evaluation requested outside the trusted domain of a tabulated function.
class domain_cutoff_error : public error {
public:
    using error::error;
};

/// An internally impossible state was reached (e.g. negative quadrature of a
/// nonnegative integrand); indicates a bug rather than bad input.
class internal_consistency_error : public error {
public:
    using error::error;
};

/// Two radial objects that must share a grid do not.
class incompatible_grid_error : public error {
public:
    using error::error;
};

/// The shooting profile never crossed zero before the maximum radius.
class unbounded_profile_error : public error {
public:
    using error::error;
};

/// Adaptive step size underflowed during ODE integration.
class stiffness_error : public error {
public:
    using error::error;
};

/// A root bracket could not be established (mass matching, multiplier search).
class bracket_failure_error : public error {
public:
    using error::error;
};

/// The Lagrange multiplier search failed inside the fixed-point iteration.
class multiplier_error : public error {
public:
    using error::error;
};

/// Fixed-point iteration stalled without meeting the convergence criteria.
/// Carries the energy trajectory observed so far for diagnosis.
class convergence_error : public error {
public:
    convergence_error(const std::string& msg, std::vector<double> energy_trajectory)
        : error(msg), energy_trajectory(std::move(energy_trajectory)) {}

    std::vector<double> energy_trajectory;
};

/// A phase-space operation was given a Q that does not generate the state's Phi.
class model_mismatch_error : public error {
public:
    using error::error;
};

/// Configuration file / CLI argument problems.
class config_error : public error {
public:
    using error::error;
};

/// File I/O problems (missing file, malformed CSV, ...).
class io_error : public error {
public:
    using error::error;
};

} // namespace selfgrav
