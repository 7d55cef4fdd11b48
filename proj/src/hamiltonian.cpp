#include "dyad/hamiltonian.hpp"

#include <cmath>

namespace dyad {

namespace {

using pauli::basis_matrix;
using pauli::PauliElement;

} // namespace

GeneralHamiltonian to_general(const CanonicalHamiltonian& h) {
    GeneralHamiltonian g;
    g.alpha = h.alpha;
    g.beta = h.beta;
    g.gamma = h.gamma.asDiagonal();
    return g;
}

Matrix4 to_matrix(const GeneralHamiltonian& h) {
    Matrix4 m = Matrix4::Zero();
    for (int j = 1; j <= 3; ++j) {
        m += 0.5 * h.alpha(j - 1) * basis_matrix({j, 0});
        m += 0.5 * h.beta(j - 1) * basis_matrix({0, j});
        for (int k = 1; k <= 3; ++k) {
            m += 0.5 * h.gamma(j - 1, k - 1) * basis_matrix({j, k});
        }
    }
    return m;
}

Matrix4 to_matrix(const CanonicalHamiltonian& h) {
    return to_matrix(to_general(h));
}

Matrix3d gamma_gram(const GeneralHamiltonian& h) {
    return h.gamma * h.gamma.transpose();
}

double gamma_triple(const GeneralHamiltonian& h) {
    return h.gamma.determinant();
}

double parameter_norm(const GeneralHamiltonian& h) {
    return std::sqrt(h.alpha.squaredNorm() + h.beta.squaredNorm() +
                     h.gamma.squaredNorm());
}

double parameter_norm(const CanonicalHamiltonian& h) {
    return parameter_norm(to_general(h));
}

Matrix3d rotation_from_gram(const Matrix3d& gram, Vector3d* eigenvalues) {
    const Matrix3d sym = 0.5 * (gram + gram.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix3d> solver(sym);
    Matrix3d r = solver.eigenvectors().transpose(); // rows = eigenvectors, ascending

    // Deterministic sign per row: largest-magnitude entry positive.
    for (int j = 0; j < 3; ++j) {
        int k = 0;
        r.row(j).cwiseAbs().maxCoeff(&k);
        if (r(j, k) < 0.0) {
            r.row(j) = -r.row(j);
        }
    }
    if (r.determinant() < 0.0) {
        r.row(0) = -r.row(0);
    }
    if (eigenvalues != nullptr) {
        *eigenvalues = solver.eigenvalues();
    }
    return r;
}

CanonicalizeResult canonicalize(const GeneralHamiltonian& h) {
    Vector3d lambda;
    const Matrix3d r = rotation_from_gram(gamma_gram(h), &lambda);

    // Rows of w are the orthogonal combinations R_{jm} gamma_m, with norms
    // sqrt(lambda_j) ascending.
    const Matrix3d w = r * h.gamma;
    const double scale = std::sqrt(std::max(lambda(2), 0.0));
    const double row_tol = 1e-12 * std::max(1.0, scale);

    Matrix3d s = Matrix3d::Zero();
    int first_nonzero = 3;
    for (int j = 2; j >= 0; --j) {
        const double norm = w.row(j).norm();
        if (norm > row_tol) {
            s.row(j) = w.row(j) / norm;
            first_nonzero = j;
        }
    }

    // Complete zero rows (they are a prefix since lambda is ascending).
    switch (first_nonzero) {
    case 0: // full rank: enforce det +1 by flipping the gamma1 axis
        if (s.determinant() < 0.0) {
            s.row(0) = -s.row(0);
        }
        break;
    case 1: // one zero row
        s.row(0) = s.row(1).cross(s.row(2));
        break;
    case 2: { // two zero rows: residual gauge, pick a deterministic frame
        int a = 0;
        s.row(2).cwiseAbs().minCoeff(&a);
        Vector3d axis = Vector3d::Unit(a);
        Vector3d s0 = axis - axis.dot(s.row(2)) * s.row(2).transpose();
        s.row(0) = s0.normalized();
        s.row(1) = Vector3d(s.row(2)).cross(Vector3d(s.row(0)));
        break;
    }
    default: // gamma = 0
        s = Matrix3d::Identity();
        break;
    }

    CanonicalizeResult out;
    out.sigma_rotation = r;
    out.xi_rotation = s;
    out.canonical.alpha = r * h.alpha;
    out.canonical.beta = s * h.beta;
    for (int j = 0; j < 3; ++j) {
        out.canonical.gamma(j) = w.row(j).dot(s.row(j));
    }
    return out;
}

CanonicalHamiltonian sign_partner(const CanonicalHamiltonian& h) {
    CanonicalHamiltonian p = h;
    p.gamma(0) = -p.gamma(0);
    p.beta(1) = -p.beta(1);
    p.beta(2) = -p.beta(2);
    return p;
}

Vector4d spectrum(const Matrix4& m) {
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(m);
    return solver.eigenvalues();
}

Vector4d spectrum(const GeneralHamiltonian& h) {
    return spectrum(to_matrix(h));
}

Vector4d spectrum(const CanonicalHamiltonian& h) {
    return spectrum(to_matrix(h));
}

} // namespace dyad
