// parity.hpp — mechanized checks of the parity argument behind the sign
// ambiguity: the blue/red operator classes, closure of their commutator
// algebra, the order-by-order negation pattern between a Hamiltonian and its
// sign partner, and the spectrum gap that rules out unitary equivalence.

#pragma once

#include "dyad/hamiltonian.hpp"
#include "dyad/pauli.hpp"

#include <string>
#include <vector>

namespace dyad {

// Blue operators: Sigma_j, Sigma_j Xi_2, Sigma_j Xi_3, Xi_1 (and the
// identity). Red operators: Sigma_j Xi_1, Xi_2, Xi_3. Coefficients of blue
// operators in the observed-qubit series carry even total degree in
// (gamma1, beta2, beta3); red operators carry odd degree.
enum class OperatorColor { Blue, Red };

OperatorColor color_of(pauli::PauliElement e);

struct ColorAlgebraReport {
    bool pass = false;
    int pairs_checked = 0;
    int zero_commutators = 0;
    std::vector<std::string> violations;
};

// Exhaustive sweep over the 15 x 15 non-identity pairs: every commutator is
// zero or 2i times a single basis element, and the color composition obeys
// blue*blue -> blue, red*red -> blue, blue*red -> red.
ColorAlgebraReport check_color_algebra();

struct ParityReport {
    bool pass = false;
    int order = 0;
    double max_u_deviation = 0.0;    // u-blocks must coincide
    double max_blue_deviation = 0.0; // blue coefficients must coincide
    double max_red_deviation = 0.0;  // red coefficients must negate
    double tolerance = 0.0;
};

// Compare the Taylor tables of h and sign_partner(h) through the given
// order against the blue/red pattern.
ParityReport verify_parity_series(const CanonicalHamiltonian& h, int order,
                                  double tolerance = 1e-12);

// Maximum entrywise difference of the sorted spectra of h and its sign
// partner; strictly positive when gamma1 gamma2 gamma3 != 0. Only asserted
// in the alpha = beta = 0 regime, where the non-equivalence is proved.
double verify_spectrum_gap(const CanonicalHamiltonian& h);

} // namespace dyad
