// sampling.hpp — seeded generators for Hamiltonians and physical states so
// every randomized suite and CLI run is reproducible from a single seed.

#pragma once

#include "dyad/dynamics.hpp"
#include "dyad/hamiltonian.hpp"

#include <cstdint>
#include <random>

namespace dyad {

using Rng = std::mt19937_64;

// Entries of alpha, beta, gamma uniform in [-bound, bound].
GeneralHamiltonian random_general_hamiltonian(Rng& rng, double bound = 2.0);

// As above, but resampled until the interaction is robustly case (i): the
// Gram eigenvalues and their gaps stay away from zero so the canonical frame
// is well conditioned.
GeneralHamiltonian random_case1_hamiltonian(Rng& rng, double bound = 2.0);

// Canonical parameters with |gamma1| <= gamma2 <= gamma3 inside
// [gamma_min, gamma_max], random gamma1 sign, alpha/beta in [-bound, bound].
CanonicalHamiltonian random_canonical_hamiltonian(Rng& rng, double bound = 1.5,
                                                  double gamma_min = 0.3,
                                                  double gamma_max = 2.0);

// Mean values of a Haar-ish random pure two-qubit state (always physical).
TwoQubitState random_pure_state(Rng& rng);

// Random rotation matrix (det +1) from a uniformly random axis and angle.
Matrix3d random_rotation(Rng& rng);

} // namespace dyad
