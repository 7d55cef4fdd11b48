// classical.hpp — closed forms of the alpha = beta = 0 example (the cyclic
// cos/sin trajectory expressions and the eigenvalue combinations) and the
// two-variable classical analog with its own hidden-variable identification.

#pragma once

#include "dyad/dynamics.hpp"

#include <string>
#include <vector>

namespace dyad {

// <Sigma_n(t)> for the diagonal-interaction, alpha = beta = 0 Hamiltonian:
// each component is a four-term cyclic combination of cos/sin products, e.g.
//   <Sigma_1(t)> = <Sigma_1> cos g2 t cos g3 t + <Xi_1> sin g2 t sin g3 t
//                - <Sigma_2 Xi_3> cos g2 t sin g3 t
//                + <Sigma_3 Xi_2> sin g2 t cos g3 t
// and cyclic images for n = 2, 3.
Vector3d closed_form_sigma(const Vector3d& gammas, const TwoQubitState& s,
                           double t);

// The four eigenvalues (-g1+g2+g3)/2, (g1+g2-g3)/2, (g1-g2+g3)/2,
// (-g1-g2-g3)/2, sorted ascending.
Vector4d example_eigenvalues(const Vector3d& gammas);

// dx/dt = alpha x + gamma' y',  dy'/dt = delta x + beta y'.
struct ClassicalSystem {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma_prime = 0.0;
    double delta = 0.0;
};

// Normalized form dx/dt = alpha x + gamma y, dy/dt = sign gamma x + beta y
// with gamma = sqrt(gamma' |delta|) > 0 and sign = sign(delta).
struct ClassicalCanonical {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int sign = +1;
};

// Change of variable y = sqrt(gamma'/|delta|) y'. When gamma' < 0 the signs
// of gamma', delta and y' are flipped first. Throws std::invalid_argument
// when gamma' or delta is zero (no normalized form exists).
ClassicalCanonical classical_normalize(const ClassicalSystem& sys);

// The canonical initial y matching a primed initial y' (pre-flip included),
// so both systems produce the same x(t).
double normalize_initial_y(const ClassicalSystem& sys, double y0_prime);

struct ClassicalDerivatives {
    double dx = 0.0;
    double d2x = 0.0;
    double d3x = 0.0;
};

// The first three time derivatives of x at t = 0 evaluated from the printed
// expressions:
//   dx   = alpha x + gamma y
//   d2x  = (alpha^2 +- gamma^2) x + gamma (alpha + beta) y
//   d3x  = (alpha^3 +- 2 alpha gamma^2 +- gamma^2 beta) x
//        + (alpha^2 gamma + alpha beta gamma + beta^2 gamma +- gamma^3) y
ClassicalDerivatives classical_derivatives(const ClassicalCanonical& c,
                                           double x0, double y0);

// x(t) of the canonical system (extended-precision matrix exponential).
double classical_x_at(const ClassicalCanonical& c, double x0, double y0,
                      double t);

// Central-difference front-end for the derivatives, default step 1e-4. The
// stencil is evaluated in extended precision so the third derivative keeps
// roughly seven digits at that step.
ClassicalDerivatives finite_difference_derivatives(const ClassicalCanonical& c,
                                                   double x0, double y0,
                                                   double step = 1e-4);

struct ClassicalDerivativeSample {
    double x0 = 0.0;
    ClassicalDerivatives d;
};

struct ClassicalReconstruction {
    double alpha = 0.0;
    bool hidden_observable = false; // gamma distinguishable from zero
    ClassicalCanonical system;      // valid when hidden_observable
    double y0 = 0.0;                // valid when hidden_observable
    std::vector<std::string> undetermined;
    double residual = 0.0; // consistency of the intercept equations
};

// alpha from the x-slope of dx, gamma^2 and the sign from the x-slope of
// d2x, beta from the x-slope of d3x, y0 from the dx intercept. Needs at
// least two samples with distinct x0 (same unknown y0).
ClassicalReconstruction classical_reconstruct(
    const std::vector<ClassicalDerivativeSample>& samples);

} // namespace dyad
