// pauli.hpp — exact arithmetic over the two-qubit Pauli product basis:
// 4x4 complex matrices, commutators, basis expansion, and the adjoint
// (Heisenberg) generator acting on coefficient vectors.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace dyad::pauli {

using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Coeffs16 = Eigen::Matrix<double, 16, 1>;
using Coeffs16c = Eigen::Matrix<std::complex<double>, 16, 1>;
using Adjoint16 = Eigen::Matrix<double, 16, 16>;

inline constexpr int kBasisSize = 16;

// One element of the product basis: sigma_{s} (x) xi_{x}, indices 0..3
// with index 0 the 2x2 identity. Element (0,0) is the 4x4 identity.
struct PauliElement {
    int sigma{0};
    int xi{0};

    constexpr int index() const noexcept { return 4 * sigma + xi; }
    constexpr bool is_identity() const noexcept { return sigma == 0 && xi == 0; }

    static constexpr PauliElement from_index(int i) noexcept {
        return PauliElement{i / 4, i % 4};
    }
    friend constexpr bool operator==(PauliElement a, PauliElement b) noexcept {
        return a.sigma == b.sigma && a.xi == b.xi;
    }
};

// Convention: sigma1 sigma2 = i sigma3 (standard Pauli matrices).
// Index 0 is the identity.
const Matrix2& single_qubit_pauli(int i);

// Kronecker product sigma_{e.sigma} (x) xi_{e.xi}; unitary and Hermitian.
const Matrix4& basis_matrix(PauliElement e);

Matrix4 commutator(const Matrix4& a, const Matrix4& b);

// Expansion coefficients c_e = tr(B_e m) / 4. Exact inverse of assemble.
Coeffs16c pauli_expand_complex(const Matrix4& m);

// Real expansion for Hermitian operators (real parts of the complex
// expansion; use imag_defect to validate the input when in doubt).
Coeffs16 pauli_expand(const Matrix4& m);

// Largest |imaginary part| over the 16 expansion coefficients; ~0 for a
// Hermitian input.
double expand_imag_defect(const Matrix4& m);

Matrix4 pauli_assemble(const Coeffs16& coeffs);
Matrix4 pauli_assemble(const Coeffs16c& coeffs);

// 16x16 real matrix of the map O -> -i[O, H] on expansion coefficients,
// for Hermitian h. Column e holds pauli_expand(-i [B_e, h]).
Adjoint16 adjoint_generator(const Matrix4& h);

} // namespace dyad::pauli
