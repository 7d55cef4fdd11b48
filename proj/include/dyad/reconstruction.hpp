// reconstruction.hpp — the inverse problem: from the Taylor table of the
// u-maps alone, recover alpha exactly, the interaction Gram matrix, the
// canonical frame, the beta magnitudes and determined signs, classify the
// degenerate cases, and emit the two candidate Hamiltonians that generate
// identical observed-qubit dynamics.

#pragma once

#include "dyad/dynamics.hpp"
#include "dyad/errors.hpp"
#include "dyad/hamiltonian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dyad {

enum class CaseClass {
    CaseI,        // no canonical gamma vanishes
    CaseII,       // gamma1 = 0
    CaseIII,      // gamma1 = gamma2 = 0
    Exception,    // CaseIII with beta1 = beta2 = 0: beta3 unobservable
    NoInteraction // all gammas vanish; the observed qubit evolves alone
};

std::string to_string(CaseClass c);

struct ReconstructionDiagnostics {
    std::vector<double> order_residuals; // per order, max over both candidates
    double verify_max = 0.0;
    double beta_solve_residual = 0.0; // LS residual of the quadratic beta solve
    double alpha_antisymmetry_defect = 0.0;
    double epsilon = 0.0; // effective zero threshold
};

struct ReconstructionReport {
    CaseClass case_class = CaseClass::NoInteraction;
    CanonicalHamiltonian candidate_plus;
    CanonicalHamiltonian candidate_minus;
    Matrix3d frame_rotation = Matrix3d::Identity(); // applied to the data
    std::vector<std::string> undetermined;
    ReconstructionDiagnostics diagnostics;
};

// alpha from the antisymmetric first-order u-block. Throws MalformedDataError
// when the symmetric part exceeds tolerance (no Hamiltonian of the supported
// form produces such data).
Vector3d extract_alpha(const TaylorTable& table);

// Gram matrix of the interaction vectors from the second-order u-block with
// the known alpha contribution removed. Must come out PSD to tolerance.
Matrix3d extract_gram(const TaylorTable& table, const Vector3d& alpha);

struct FrameAlignResult {
    TaylorTable table;      // data rotated into the canonical Sigma frame
    Vector3d gamma_squares; // Gram eigenvalues, ascending, clamped at 0
    Matrix3d rotation;
};

FrameAlignResult frame_align(const TaylorTable& table, const Matrix3d& gram);

// Case classification; beta12_squared upgrades CaseIII to Exception when
// known. gamma_squares must be ascending.
CaseClass classify(const Vector3d& gamma_squares,
                   std::optional<double> beta12_squared, double eps);

struct BetaResult {
    Vector3d beta = Vector3d::Zero();
    std::vector<std::string> undetermined;
    CaseClass final_case = CaseClass::CaseI;
    double solve_residual = 0.0;
};

// Case-dependent beta extraction in the canonical frame. gamma_abs holds the
// (nonnegative) canonical gamma magnitudes with structural zeros already
// applied. Signs follow the candidate_plus branch convention. data_tolerance
// is the per-coefficient trust level of the input table (1e-6 for exact
// tables; looser for fitted ones).
BetaResult extract_beta(const TaylorTable& table, const Vector3d& alpha,
                        const Vector3d& gamma_abs, CaseClass case_class,
                        double eps, double data_tolerance = 1e-6);

// Scale-aware zero threshold for magnitude comparisons.
double default_epsilon(const Vector3d& alpha, const Vector3d& gamma_squares);

struct ReconstructOptions {
    std::optional<double> eps;    // zero-classification threshold override
    double data_tolerance = 1e-6; // trust level of the input coefficients
};

// Full pipeline. Throws InsufficientOrderError when the table is too short
// for the detected case, MalformedDataError for data outside the model
// class, ReconstructionError when candidate verification fails.
ReconstructionReport reconstruct(const TaylorTable& table,
                                 const ReconstructOptions& options = {});

} // namespace dyad
