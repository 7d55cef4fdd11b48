#include "dyad/pauli.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace dyad::pauli {

namespace {

using namespace std::complex_literals;

std::array<Matrix2, 4> make_single_qubit_paulis() {
    std::array<Matrix2, 4> p;
    p[0] << 1.0, 0.0,
            0.0, 1.0;
    p[1] << 0.0, 1.0,
            1.0, 0.0;
    p[2] << 0.0, -1.0i,
            1.0i, 0.0;
    p[3] << 1.0, 0.0,
            0.0, -1.0;
    return p;
}

std::array<Matrix4, kBasisSize> make_basis() {
    std::array<Matrix4, kBasisSize> basis;
    for (int i = 0; i < kBasisSize; ++i) {
        const auto e = PauliElement::from_index(i);
        basis[i] = Eigen::kroneckerProduct(single_qubit_pauli(e.sigma),
                                           single_qubit_pauli(e.xi));
    }
    return basis;
}

} // namespace

const Matrix2& single_qubit_pauli(int i) {
    static const std::array<Matrix2, 4> paulis = make_single_qubit_paulis();
    return paulis.at(static_cast<std::size_t>(i));
}

const Matrix4& basis_matrix(PauliElement e) {
    static const std::array<Matrix4, kBasisSize> basis = make_basis();
    return basis.at(static_cast<std::size_t>(e.index()));
}

Matrix4 commutator(const Matrix4& a, const Matrix4& b) {
    return a * b - b * a;
}

Coeffs16c pauli_expand_complex(const Matrix4& m) {
    Coeffs16c c;
    for (int i = 0; i < kBasisSize; ++i) {
        c(i) = 0.25 * (basis_matrix(PauliElement::from_index(i)) * m).trace();
    }
    return c;
}

Coeffs16 pauli_expand(const Matrix4& m) {
    return pauli_expand_complex(m).real();
}

double expand_imag_defect(const Matrix4& m) {
    return pauli_expand_complex(m).imag().cwiseAbs().maxCoeff();
}

Matrix4 pauli_assemble(const Coeffs16& coeffs) {
    Matrix4 m = Matrix4::Zero();
    for (int i = 0; i < kBasisSize; ++i) {
        m += coeffs(i) * basis_matrix(PauliElement::from_index(i));
    }
    return m;
}

Matrix4 pauli_assemble(const Coeffs16c& coeffs) {
    Matrix4 m = Matrix4::Zero();
    for (int i = 0; i < kBasisSize; ++i) {
        m += coeffs(i) * basis_matrix(PauliElement::from_index(i));
    }
    return m;
}

Adjoint16 adjoint_generator(const Matrix4& h) {
    Adjoint16 a;
    const std::complex<double> minus_i(0.0, -1.0);
    for (int col = 0; col < kBasisSize; ++col) {
        const Matrix4 image =
            minus_i * commutator(basis_matrix(PauliElement::from_index(col)), h);
        a.col(col) = pauli_expand(image);
    }
    return a;
}

} // namespace dyad::pauli
