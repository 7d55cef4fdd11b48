// state_recovery.hpp — recover the initial environment and correlation mean
// values from the part of the observed trajectory not attributable to the
// u-maps, with rank analysis marking the provably undetermined components.

#pragma once

#include "dyad/dynamics.hpp"
#include "dyad/errors.hpp"
#include "dyad/hamiltonian.hpp"

#include <array>

namespace dyad {

enum class EntryStatus { Determined, Undetermined };

struct EnvironmentEstimate {
    Vector3d xi = Vector3d::Zero();
    Matrix3d corr = Matrix3d::Zero();
    std::array<EntryStatus, 3> xi_status{};
    std::array<std::array<EntryStatus, 3>, 3> corr_status{};
    double residual = 0.0;
    int rank = 0;
};

// Taylor coefficients of <Sigma_n(t)> beyond the u-part: entry m holds, for
// each n, the order-m aggregate v^(m) . <Xi> + w^(m) : <Sigma Xi>.
struct MeanResidualSeries {
    std::vector<Vector3d> orders;

    int order() const { return static_cast<int>(orders.size()) - 1; }
};

// Generate the aggregates for a known Hamiltonian and state (the data a
// caller would obtain by differentiating measured trajectories and removing
// the identified u contribution).
MeanResidualSeries observed_residual_series(const GeneralHamiltonian& h,
                                            const TwoQubitState& s, int order);
MeanResidualSeries observed_residual_series(const CanonicalHamiltonian& h,
                                            const TwoQubitState& s, int order);

// Least-squares solve of the 12 environment/correlation unknowns from the
// aggregates, using the candidate's own v/w Taylor blocks as coefficient
// rows. Null-space directions of the design matrix are flagged Undetermined
// and reported as 0. Throws InconsistentDataError when the residual shows
// the data incompatible with the candidate.
EnvironmentEstimate recover_environment(const CanonicalHamiltonian& h,
                                        const MeanResidualSeries& observed);

// The estimate the partner Hamiltonian recovers from the same data: signs of
// <Sigma_j Xi_1>, <Xi_2>, <Xi_3> flip. Involution; statuses preserved.
EnvironmentEstimate flip_environment(const EnvironmentEstimate& est);

// Mean values after rotating the Sigma frame by r and the Xi frame by s.
TwoQubitState transform_state(const Matrix3d& sigma_rotation,
                              const Matrix3d& xi_rotation,
                              const TwoQubitState& state);

// The aggregates carry one Sigma index; align them with a frame rotation
// before recovering against a canonical-frame candidate.
MeanResidualSeries rotate_sigma_frame(const MeanResidualSeries& series,
                                      const Matrix3d& rotation);

} // namespace dyad
