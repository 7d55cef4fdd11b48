// hamiltonian.hpp — two-qubit Hamiltonian parameter records, the canonical
// (diagonal-interaction) form, frame canonicalization, sign partners, and
// exact spectra.
//
// H = 1/2 sum_j alpha_j Sigma_j + 1/2 sum_k beta_k Xi_k
//   + 1/2 sum_jk gamma_jk Sigma_j Xi_k          (general form)
// with gamma_jk diagonal in the canonical form. Energy units, hbar = 1.

#pragma once

#include "dyad/pauli.hpp"

#include <Eigen/Dense>

namespace dyad {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Eigen::Vector4d;
using pauli::Matrix4;

struct GeneralHamiltonian {
    Vector3d alpha = Vector3d::Zero();
    Vector3d beta = Vector3d::Zero();
    Matrix3d gamma = Matrix3d::Zero(); // row j = interaction vector gamma_j
};

struct CanonicalHamiltonian {
    Vector3d alpha = Vector3d::Zero();
    Vector3d beta = Vector3d::Zero();
    Vector3d gamma = Vector3d::Zero(); // diagonal entries (gamma1, gamma2, gamma3)
};

GeneralHamiltonian to_general(const CanonicalHamiltonian& h);

Matrix4 to_matrix(const GeneralHamiltonian& h);
Matrix4 to_matrix(const CanonicalHamiltonian& h);

// Gram matrix of the interaction row vectors: entry (m,n) = gamma_m . gamma_n.
Matrix3d gamma_gram(const GeneralHamiltonian& h);

// Triple product gamma_1 . (gamma_2 x gamma_3) = det(gamma). Its sign is the
// frame-independent bit the observed qubit cannot see.
double gamma_triple(const GeneralHamiltonian& h);

// sqrt(sum alpha^2 + sum beta^2 + sum gamma^2) = sqrt(tr(H^2)).
double parameter_norm(const GeneralHamiltonian& h);
double parameter_norm(const CanonicalHamiltonian& h);

// Rotation (det +1) whose rows are eigenvectors of the symmetric matrix,
// ascending eigenvalue order, with a deterministic sign convention so that
// near-identical inputs produce identical rotations. eigenvalues, when
// requested, come back ascending and unclamped.
Matrix3d rotation_from_gram(const Matrix3d& gram, Vector3d* eigenvalues = nullptr);

struct CanonicalizeResult {
    CanonicalHamiltonian canonical;
    Matrix3d sigma_rotation = Matrix3d::Identity(); // R, acts on the Sigma frame
    Matrix3d xi_rotation = Matrix3d::Identity();    // S, acts on the Xi frame
};

// Diagonalize the interaction: R G R^T diagonal, each row of R*gamma rotated
// onto its axis by S. Output convention: |gamma1| <= gamma2 <= gamma3 with
// gamma2, gamma3 >= 0; the sign of gamma1 is the sign of det(gamma), which
// the construction preserves (det R = det S = +1).
CanonicalizeResult canonicalize(const GeneralHamiltonian& h);

// The other member of the indistinguishable pair: gamma1 -> -gamma1,
// beta2 -> -beta2, beta3 -> -beta3. Involution.
CanonicalHamiltonian sign_partner(const CanonicalHamiltonian& h);

// Exact eigenvalues, sorted ascending.
Vector4d spectrum(const Matrix4& m);
Vector4d spectrum(const GeneralHamiltonian& h);
Vector4d spectrum(const CanonicalHamiltonian& h);

} // namespace dyad
