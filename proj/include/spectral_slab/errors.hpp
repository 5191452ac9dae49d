#pragma once

#include <stdexcept>
#include <string>

namespace spectral_slab {

/// Input outside an operation's domain (bad angle, negative thickness, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// M22 is (numerically) zero, so R and T are not defined.
class SpectralSingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolverFailure {
    NoConvergence,
    UnphysicalBranch,
    NoGainSolution,
    InvalidMode,
    ApproximationSingular,
    NoInteriorMaximum,
};

inline const char* to_string(SolverFailure kind) {
    switch (kind) {
        case SolverFailure::NoConvergence: return "no convergence";
        case SolverFailure::UnphysicalBranch: return "unphysical branch";
        case SolverFailure::NoGainSolution: return "no gain solution";
        case SolverFailure::InvalidMode: return "invalid mode";
        case SolverFailure::ApproximationSingular: return "approximation singular";
        case SolverFailure::NoInteriorMaximum: return "no interior maximum";
    }
    return "solver failure";
}

class SolverError : public std::runtime_error {
public:
    SolverError(SolverFailure kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    SolverFailure kind() const noexcept { return kind_; }

private:
    SolverFailure kind_;
};

}  // namespace spectral_slab
