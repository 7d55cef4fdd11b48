#include "dyad/dynamics.hpp"

#include "dyad/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dyad {

namespace {

using pauli::Adjoint16;
using pauli::basis_matrix;
using pauli::Coeffs16;
using pauli::kBasisSize;
using pauli::PauliElement;

// Sort a 16-coefficient expansion of Sigma_{n+1}(t) into one row of u/v/w.
void scatter_row(const Coeffs16& c, int n, MapBlocks& out) {
    if (std::abs(c(0)) > 1e-9) {
        throw std::logic_error("map row has a nonzero identity component");
    }
    for (int j = 1; j <= 3; ++j) {
        out.u(n, j - 1) = c(PauliElement{j, 0}.index());
        out.v(n, j - 1) = c(PauliElement{0, j}.index());
        for (int k = 1; k <= 3; ++k) {
            out.w[n](j - 1, k - 1) = c(PauliElement{j, k}.index());
        }
    }
}

MapBlocks blocks_from_rows(const std::array<Coeffs16, 3>& rows) {
    MapBlocks out;
    for (int n = 0; n < 3; ++n) {
        scatter_row(rows[n], n, out);
    }
    return out;
}

} // namespace

Matrix4 density_matrix(const TwoQubitState& s) {
    Coeffs16 c = Coeffs16::Zero();
    c(0) = 0.25;
    for (int j = 1; j <= 3; ++j) {
        c(PauliElement{j, 0}.index()) = 0.25 * s.sigma(j - 1);
        c(PauliElement{0, j}.index()) = 0.25 * s.xi(j - 1);
        for (int k = 1; k <= 3; ++k) {
            c(PauliElement{j, k}.index()) = 0.25 * s.corr(j - 1, k - 1);
        }
    }
    return pauli::pauli_assemble(c);
}

TwoQubitState state_from_density(const Matrix4& rho) {
    const Coeffs16 c = pauli::pauli_expand(rho); // entries = <B_e>/4
    TwoQubitState s;
    for (int j = 1; j <= 3; ++j) {
        s.sigma(j - 1) = 4.0 * c(PauliElement{j, 0}.index());
        s.xi(j - 1) = 4.0 * c(PauliElement{0, j}.index());
        for (int k = 1; k <= 3; ++k) {
            s.corr(j - 1, k - 1) = 4.0 * c(PauliElement{j, k}.index());
        }
    }
    return s;
}

TwoQubitState state_from_pure(const Eigen::Vector4cd& psi) {
    const Eigen::Vector4cd normalized = psi / psi.norm();
    return state_from_density(normalized * normalized.adjoint());
}

double state_min_eigenvalue(const TwoQubitState& s) {
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(density_matrix(s));
    return solver.eigenvalues().minCoeff();
}

bool state_is_valid(const TwoQubitState& s, double tol) {
    return state_min_eigenvalue(s) >= -tol;
}

double max_abs_diff(const MapBlocks& a, const MapBlocks& b) {
    double d = (a.u - b.u).cwiseAbs().maxCoeff();
    d = std::max(d, (a.v - b.v).cwiseAbs().maxCoeff());
    for (int n = 0; n < 3; ++n) {
        d = std::max(d, (a.w[n] - b.w[n]).cwiseAbs().maxCoeff());
    }
    return d;
}

double max_abs_diff_u(const MapBlocks& a, const MapBlocks& b) {
    return (a.u - b.u).cwiseAbs().maxCoeff();
}

pauli::Coeffs16 evolve_heisenberg_exact(const Matrix4& h, PauliElement e,
                                        double t) {
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(h);
    const Matrix4& basis = solver.eigenvectors();
    Eigen::Vector4cd phases;
    for (int i = 0; i < 4; ++i) {
        phases(i) = std::polar(1.0, t * solver.eigenvalues()(i));
    }
    const Matrix4 evolution = basis * phases.asDiagonal() * basis.adjoint();
    const Matrix4 heisenberg =
        evolution * basis_matrix(e) * evolution.adjoint();
    return pauli::pauli_expand(heisenberg);
}

MapSnapshot map_snapshot(const GeneralHamiltonian& h, double t) {
    const Matrix4 m = to_matrix(h);
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(m);
    const Matrix4& basis = solver.eigenvectors();
    Eigen::Vector4cd phases;
    for (int i = 0; i < 4; ++i) {
        phases(i) = std::polar(1.0, t * solver.eigenvalues()(i));
    }
    const Matrix4 evolution = basis * phases.asDiagonal() * basis.adjoint();

    std::array<Coeffs16, 3> rows;
    for (int n = 1; n <= 3; ++n) {
        const Matrix4 heisenberg =
            evolution * basis_matrix({n, 0}) * evolution.adjoint();
        rows[n - 1] = pauli::pauli_expand(heisenberg);
    }
    return MapSnapshot{t, blocks_from_rows(rows)};
}

MapSnapshot map_snapshot(const CanonicalHamiltonian& h, double t) {
    return map_snapshot(to_general(h), t);
}

MapSnapshot map_snapshot_adjoint(const GeneralHamiltonian& h, double t) {
    const Adjoint16 gen = pauli::adjoint_generator(to_matrix(h));
    const Adjoint16 propagator = (t * gen).exp();
    std::array<Coeffs16, 3> rows;
    for (int n = 1; n <= 3; ++n) {
        rows[n - 1] = propagator.col(PauliElement{n, 0}.index());
    }
    return MapSnapshot{t, blocks_from_rows(rows)};
}

MapSnapshot map_snapshot_adjoint(const CanonicalHamiltonian& h, double t) {
    return map_snapshot_adjoint(to_general(h), t);
}

TaylorTable taylor_maps(const GeneralHamiltonian& h, int order) {
    if (order < 0) {
        throw std::invalid_argument("taylor_maps: order must be >= 0");
    }
    const Adjoint16 gen = pauli::adjoint_generator(to_matrix(h));

    std::array<Coeffs16, 3> terms;
    for (int n = 1; n <= 3; ++n) {
        terms[n - 1] = Coeffs16::Zero();
        terms[n - 1](PauliElement{n, 0}.index()) = 1.0;
    }

    TaylorTable table;
    table.coeff.reserve(static_cast<std::size_t>(order) + 1);
    table.coeff.push_back(blocks_from_rows(terms));
    for (int m = 1; m <= order; ++m) {
        for (auto& term : terms) {
            term = (gen * term) / static_cast<double>(m);
        }
        table.coeff.push_back(blocks_from_rows(terms));
    }
    return table;
}

TaylorTable taylor_maps(const CanonicalHamiltonian& h, int order) {
    return taylor_maps(to_general(h), order);
}

Eigen::Matrix<double, 45, 1> flatten_maps(const MapBlocks& blocks) {
    Eigen::Matrix<double, 45, 1> flat;
    int idx = 0;
    for (int n = 0; n < 3; ++n) {
        for (int j = 0; j < 3; ++j) {
            flat(idx++) = blocks.u(n, j);
        }
    }
    for (int n = 0; n < 3; ++n) {
        for (int k = 0; k < 3; ++k) {
            flat(idx++) = blocks.v(n, k);
        }
    }
    for (int n = 0; n < 3; ++n) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                flat(idx++) = blocks.w[n](j, k);
            }
        }
    }
    return flat;
}

MapBlocks unflatten_maps(const Eigen::Matrix<double, 45, 1>& flat) {
    MapBlocks blocks;
    int idx = 0;
    for (int n = 0; n < 3; ++n) {
        for (int j = 0; j < 3; ++j) {
            blocks.u(n, j) = flat(idx++);
        }
    }
    for (int n = 0; n < 3; ++n) {
        for (int k = 0; k < 3; ++k) {
            blocks.v(n, k) = flat(idx++);
        }
    }
    for (int n = 0; n < 3; ++n) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                blocks.w[n](j, k) = flat(idx++);
            }
        }
    }
    return blocks;
}

FitResult fit_taylor(const std::vector<MapSnapshot>& samples, int order,
                     double window) {
    if (order < 1) {
        throw std::invalid_argument("fit_taylor: order must be >= 1");
    }
    std::vector<const MapSnapshot*> in_window;
    for (const auto& s : samples) {
        if (s.t >= 0.0 && s.t <= window * (1.0 + 1e-12)) {
            in_window.push_back(&s);
        }
    }
    const int needed = 2 * (order + 1);
    if (static_cast<int>(in_window.size()) < needed) {
        std::ostringstream msg;
        msg << "fit_taylor: need at least " << needed << " samples in [0, "
            << window << "], got " << in_window.size();
        throw std::invalid_argument(msg.str());
    }
    std::vector<double> times;
    times.reserve(in_window.size());
    for (const auto* s : in_window) {
        times.push_back(s->t);
    }
    std::sort(times.begin(), times.end());
    if (std::adjacent_find(times.begin(), times.end()) != times.end()) {
        throw std::invalid_argument("fit_taylor: sample times must be distinct");
    }

    const int rows = static_cast<int>(in_window.size());
    const int degree = order + 1; // one guard term past the requested order
    Eigen::MatrixXd design(rows, degree + 1);
    Eigen::MatrixXd values(rows, 45);
    for (int i = 0; i < rows; ++i) {
        const double s = in_window[static_cast<std::size_t>(i)]->t / window;
        double power = 1.0;
        for (int p = 0; p <= degree; ++p) {
            design(i, p) = power;
            power *= s;
        }
        values.row(i) = flatten_maps(in_window[static_cast<std::size_t>(i)]->maps);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    const double condition =
        smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    if (condition > 1e12) {
        std::ostringstream msg;
        msg << "fit_taylor: design matrix condition " << condition
            << " exceeds 1e12; use a smaller window or fewer orders";
        throw FitConditioningError(msg.str());
    }

    const Eigen::MatrixXd normalized_coeffs = svd.solve(values);
    const Eigen::MatrixXd residual_matrix = design * normalized_coeffs - values;

    // Row norms of the pseudoinverse give the noise amplification per
    // coefficient in the normalized variable.
    const Eigen::MatrixXd pinv =
        svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    const double noise_level =
        std::max(residual_matrix.cwiseAbs().maxCoeff(),
                 1e-15 * std::max(1.0, values.cwiseAbs().maxCoeff()));

    FitResult result;
    result.condition = condition;
    result.table.coeff.reserve(static_cast<std::size_t>(order) + 1);
    result.coeff_uncertainty.reserve(static_cast<std::size_t>(order) + 1);
    double descale = 1.0; // window^-m undoes the time normalization
    for (int m = 0; m <= order; ++m) {
        result.table.coeff.push_back(
            unflatten_maps(normalized_coeffs.row(m).transpose() * descale));
        result.coeff_uncertainty.push_back(pinv.row(m).norm() * noise_level *
                                           descale);
        descale /= window;
    }
    Eigen::Matrix<double, 45, 1> per_entry =
        residual_matrix.cwiseAbs().colwise().maxCoeff().transpose();
    result.residual = unflatten_maps(per_entry);
    result.max_residual = per_entry.maxCoeff();
    return result;
}

Vector3d apply_maps(const MapBlocks& maps, const TwoQubitState& s) {
    Vector3d out = maps.u * s.sigma + maps.v * s.xi;
    for (int n = 0; n < 3; ++n) {
        out(n) += maps.w[n].cwiseProduct(s.corr).sum();
    }
    return out;
}

std::vector<Vector3d> mean_trajectory(const GeneralHamiltonian& h,
                                      const TwoQubitState& s,
                                      const std::vector<double>& times,
                                      bool allow_invalid) {
    if (!allow_invalid && !state_is_valid(s)) {
        std::ostringstream msg;
        msg << "mean_trajectory: state is not positive semidefinite (min "
               "eigenvalue "
            << state_min_eigenvalue(s) << ")";
        throw std::invalid_argument(msg.str());
    }
    std::vector<Vector3d> out;
    out.reserve(times.size());
    for (const double t : times) {
        out.push_back(apply_maps(map_snapshot(h, t).maps, s));
    }
    return out;
}

std::vector<Vector3d> mean_trajectory(const CanonicalHamiltonian& h,
                                      const TwoQubitState& s,
                                      const std::vector<double>& times,
                                      bool allow_invalid) {
    return mean_trajectory(to_general(h), s, times, allow_invalid);
}

MapBlocks rotate_sigma_frame(const MapBlocks& blocks, const Matrix3d& r) {
    MapBlocks out;
    out.u = r * blocks.u * r.transpose();
    out.v = r * blocks.v;
    // Both Sigma indices of w rotate; the Xi index is untouched.
    for (int k = 0; k < 3; ++k) {
        Matrix3d slice; // slice(n, j) = w_{njk}
        for (int n = 0; n < 3; ++n) {
            for (int j = 0; j < 3; ++j) {
                slice(n, j) = blocks.w[n](j, k);
            }
        }
        slice = r * slice * r.transpose();
        for (int n = 0; n < 3; ++n) {
            for (int j = 0; j < 3; ++j) {
                out.w[n](j, k) = slice(n, j);
            }
        }
    }
    return out;
}

TaylorTable rotate_sigma_frame(const TaylorTable& table, const Matrix3d& r) {
    TaylorTable out;
    out.coeff.reserve(table.coeff.size());
    for (const auto& blocks : table.coeff) {
        out.coeff.push_back(rotate_sigma_frame(blocks, r));
    }
    return out;
}

} // namespace dyad
