// dynamics.hpp — forward problem: the linear maps u(t), v(t), w(t) carrying
// initial mean values into <Sigma_n(t)>, exact trajectories, and Taylor
// tables of the maps at t = 0.
//
//   <Sigma_n(t)> = sum_j u_nj(t) <Sigma_j> + sum_k v_nk(t) <Xi_k>
//                + sum_jk w_njk(t) <Sigma_j Xi_k>
//
// Two independent forward routes are provided on purpose: the 4x4
// eigendecomposition route (map_snapshot) and the 16x16 adjoint-exponential
// route (map_snapshot_adjoint). Tests cross-check one against the other.

#pragma once

#include "dyad/hamiltonian.hpp"
#include "dyad/pauli.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace dyad {

// The 15 mean values of a two-qubit state. corr(j,k) = <Sigma_{j+1} Xi_{k+1}>.
struct TwoQubitState {
    Vector3d sigma = Vector3d::Zero();
    Vector3d xi = Vector3d::Zero();
    Matrix3d corr = Matrix3d::Zero();
};

// Density matrix 1/4 (I + sigma.S + xi.X + corr:SX) and its inverse.
Matrix4 density_matrix(const TwoQubitState& s);
TwoQubitState state_from_density(const Matrix4& rho);
TwoQubitState state_from_pure(const Eigen::Vector4cd& psi);

// Smallest eigenvalue of the reconstructed density matrix; >= -1e-12 for a
// physical state.
double state_min_eigenvalue(const TwoQubitState& s);
bool state_is_valid(const TwoQubitState& s, double tol = 1e-12);

// One order (or one time) of the map coefficients. w[n](j,k) = w_{n+1,j+1,k+1}.
struct MapBlocks {
    Matrix3d u = Matrix3d::Zero();
    Matrix3d v = Matrix3d::Zero();
    std::array<Matrix3d, 3> w{Matrix3d::Zero(), Matrix3d::Zero(), Matrix3d::Zero()};
};

double max_abs_diff(const MapBlocks& a, const MapBlocks& b);
double max_abs_diff_u(const MapBlocks& a, const MapBlocks& b);

struct MapSnapshot {
    double t = 0.0;
    MapBlocks maps;
};

// Taylor coefficients of the maps at t = 0. coeff[m] holds the m-th
// coefficient (m-th derivative divided by m!), so coeff[0].u = identity.
struct TaylorTable {
    std::vector<MapBlocks> coeff;

    int order() const { return static_cast<int>(coeff.size()) - 1; }
};

// Heisenberg evolution e^{itH} B_e e^{-itH} of one basis element, expanded in
// the Pauli basis. Built from the Hermitian eigendecomposition of H.
pauli::Coeffs16 evolve_heisenberg_exact(const Matrix4& h, pauli::PauliElement e,
                                        double t);

// Map coefficients at time t via the eigendecomposition route.
MapSnapshot map_snapshot(const GeneralHamiltonian& h, double t);
MapSnapshot map_snapshot(const CanonicalHamiltonian& h, double t);

// Same maps via exp(t * adjoint generator) on the 16-dim coefficient space.
MapSnapshot map_snapshot_adjoint(const GeneralHamiltonian& h, double t);
MapSnapshot map_snapshot_adjoint(const CanonicalHamiltonian& h, double t);

// Exact Taylor coefficients through the requested order by nested adjoint
// application; no finite differences.
TaylorTable taylor_maps(const GeneralHamiltonian& h, int order);
TaylorTable taylor_maps(const CanonicalHamiltonian& h, int order);

// Row-major flattening (u, v, w) used by the trajectory CSV layout.
Eigen::Matrix<double, 45, 1> flatten_maps(const MapBlocks& blocks);
MapBlocks unflatten_maps(const Eigen::Matrix<double, 45, 1>& flat);

struct FitResult {
    TaylorTable table;
    MapBlocks residual;    // per-entry max |fit - sample| over the window
    double max_residual = 0.0;
    double condition = 0.0; // condition number of the (normalized) design
    // Propagated error bar per coefficient order: pseudoinverse row norm
    // times the observed residual level. High orders of a narrow-window fit
    // are genuinely uncertain; downstream consumers should trust an order
    // only when its bar is small against the coefficient scale.
    std::vector<double> coeff_uncertainty;
};

// Least-squares polynomial fit of sampled map coefficients on [0, window].
// The fitted degree is order + 1 (one guard term); coefficients above the
// requested order are discarded. Times are normalized by the window before
// solving. Throws FitConditioningError when the design matrix condition
// exceeds 1e12 (degenerate sample placement).
FitResult fit_taylor(const std::vector<MapSnapshot>& samples, int order,
                     double window);

// <Sigma_n(t)> assembled from map_snapshot and the initial state. Rejects
// unphysical states unless allow_invalid is set.
std::vector<Vector3d> mean_trajectory(const GeneralHamiltonian& h,
                                      const TwoQubitState& s,
                                      const std::vector<double>& times,
                                      bool allow_invalid = false);
std::vector<Vector3d> mean_trajectory(const CanonicalHamiltonian& h,
                                      const TwoQubitState& s,
                                      const std::vector<double>& times,
                                      bool allow_invalid = false);

Vector3d apply_maps(const MapBlocks& maps, const TwoQubitState& s);

// Change of the Sigma frame by a rotation r: u -> r u r^T, v -> r v, and both
// Sigma indices of w rotate. Used when aligning data to the canonical frame.
MapBlocks rotate_sigma_frame(const MapBlocks& blocks, const Matrix3d& r);
TaylorTable rotate_sigma_frame(const TaylorTable& table, const Matrix3d& r);

} // namespace dyad
