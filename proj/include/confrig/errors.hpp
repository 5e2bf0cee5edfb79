#pragma once

#include <stdexcept>
#include <string>

namespace confrig {

/// Malformed input: bad dimensions, non-unit points, invalid radii.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value that should satisfy a structural invariant (Lorentz form,
/// future-preservation, radial symmetry) does not.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Evaluation outside the domain of a field.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A geometric hypothesis of the rigidity statement is violated. `clause`
/// names the violated hypothesis, e.g. "(ii) boundary isometric to Sigma_rho".
class HypothesisViolation : public std::runtime_error {
public:
    HypothesisViolation(std::string clause, const std::string& what)
        : std::runtime_error(what), clause_(std::move(clause)) {}
    const std::string& clause() const noexcept { return clause_; }

private:
    std::string clause_;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int iterations = 0, double last_change = 0.0)
        : std::runtime_error(what), iterations_(iterations), last_change_(last_change) {}
    int iterations() const noexcept { return iterations_; }
    double last_change() const noexcept { return last_change_; }

private:
    int iterations_;
    double last_change_;
};

}  // namespace confrig
