#pragma once

#include <stdexcept>
#include <string>

namespace dyad {

// Input data is not consistent with any Hamiltonian of the supported
// two-qubit form (e.g. first-order u-block not antisymmetric, Gram not PSD,
// cross-order values in contradiction).
struct MalformedDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The Taylor table does not reach the order the detected case needs.
struct InsufficientOrderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Candidate verification against the input coefficients failed.
struct ReconstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Observed mean-value data incompatible with the candidate Hamiltonian.
struct InconsistentDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Least-squares design matrix too ill-conditioned to fit.
struct FitConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dyad
