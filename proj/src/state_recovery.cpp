#include "dyad/state_recovery.hpp"

#include <cmath>
#include <sstream>

namespace dyad {

namespace {

// Unknown ordering: (xi1, xi2, xi3, corr11, corr12, ..., corr33).
constexpr int kUnknowns = 12;

} // namespace

MeanResidualSeries observed_residual_series(const GeneralHamiltonian& h,
                                            const TwoQubitState& s,
                                            int order) {
    const TaylorTable table = taylor_maps(h, order);
    MeanResidualSeries out;
    out.orders.reserve(static_cast<std::size_t>(order) + 1);
    for (int m = 0; m <= order; ++m) {
        const MapBlocks& blocks = table.coeff[static_cast<std::size_t>(m)];
        Vector3d row = blocks.v * s.xi;
        for (int n = 0; n < 3; ++n) {
            row(n) += blocks.w[n].cwiseProduct(s.corr).sum();
        }
        out.orders.push_back(row);
    }
    return out;
}

MeanResidualSeries observed_residual_series(const CanonicalHamiltonian& h,
                                            const TwoQubitState& s,
                                            int order) {
    return observed_residual_series(to_general(h), s, order);
}

EnvironmentEstimate recover_environment(const CanonicalHamiltonian& h,
                                        const MeanResidualSeries& observed) {
    const int order = observed.order();
    if (order < 1) {
        throw std::invalid_argument(
            "recover_environment: need aggregates through order >= 1");
    }
    const TaylorTable table = taylor_maps(h, order);

    const int rows = 3 * (order + 1);
    Eigen::MatrixXd design(rows, kUnknowns);
    Eigen::VectorXd rhs(rows);
    for (int m = 0; m <= order; ++m) {
        const MapBlocks& blocks = table.coeff[static_cast<std::size_t>(m)];
        for (int n = 0; n < 3; ++n) {
            const int row = 3 * m + n;
            design.block<1, 3>(row, 0) = blocks.v.row(n);
            int idx = 3;
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < 3; ++k) {
                    design(row, idx++) = blocks.w[n](j, k);
                }
            }
            rhs(row) = observed.orders[static_cast<std::size_t>(m)](n);
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        design, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double sv_tol = 1e-8 * std::max(sv(0), 1e-300);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > sv_tol) {
            ++rank;
        }
    }
    svd.setThreshold(1e-8);
    Eigen::VectorXd solution = svd.solve(rhs);

    // A coordinate is determined iff the corresponding unit vector has no
    // component in the null space of the design matrix.
    const Eigen::MatrixXd& v = svd.matrixV(); // 12 x 12
    std::array<bool, kUnknowns> determined{};
    for (int i = 0; i < kUnknowns; ++i) {
        double null_component = 0.0;
        for (int c = rank; c < v.cols(); ++c) {
            null_component += v(i, c) * v(i, c);
        }
        determined[static_cast<std::size_t>(i)] = std::sqrt(null_component) <= 1e-8;
        if (!determined[static_cast<std::size_t>(i)]) {
            solution(i) = 0.0; // never report a number for an unknowable entry
        }
    }

    const double residual = (design * solution - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (residual > 1e-6 * scale) {
        std::ostringstream msg;
        msg << "recover_environment: residual " << residual
            << ": data incompatible with the candidate Hamiltonian";
        throw InconsistentDataError(msg.str());
    }

    EnvironmentEstimate est;
    est.rank = rank;
    est.residual = residual;
    est.xi = solution.head<3>();
    int idx = 3;
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            est.corr(j, k) = solution(idx++);
        }
    }
    for (int k = 0; k < 3; ++k) {
        est.xi_status[static_cast<std::size_t>(k)] =
            determined[static_cast<std::size_t>(k)] ? EntryStatus::Determined
                                                    : EntryStatus::Undetermined;
    }
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            est.corr_status[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                determined[static_cast<std::size_t>(3 + 3 * j + k)]
                    ? EntryStatus::Determined
                    : EntryStatus::Undetermined;
        }
    }
    return est;
}

EnvironmentEstimate flip_environment(const EnvironmentEstimate& est) {
    EnvironmentEstimate out = est;
    out.xi(1) = -out.xi(1);
    out.xi(2) = -out.xi(2);
    out.corr.col(0) = -out.corr.col(0); // <Sigma_j Xi_1>
    return out;
}

TwoQubitState transform_state(const Matrix3d& sigma_rotation,
                              const Matrix3d& xi_rotation,
                              const TwoQubitState& state) {
    TwoQubitState out;
    out.sigma = sigma_rotation * state.sigma;
    out.xi = xi_rotation * state.xi;
    out.corr = sigma_rotation * state.corr * xi_rotation.transpose();
    return out;
}

MeanResidualSeries rotate_sigma_frame(const MeanResidualSeries& series,
                                      const Matrix3d& rotation) {
    MeanResidualSeries out;
    out.orders.reserve(series.orders.size());
    for (const auto& row : series.orders) {
        out.orders.push_back(rotation * row);
    }
    return out;
}

} // namespace dyad
