#include "dyad/sampling.hpp"

#include <cmath>

namespace dyad {

GeneralHamiltonian random_general_hamiltonian(Rng& rng, double bound) {
    std::uniform_real_distribution<double> uniform(-bound, bound);
    GeneralHamiltonian h;
    for (int i = 0; i < 3; ++i) {
        h.alpha(i) = uniform(rng);
        h.beta(i) = uniform(rng);
        for (int j = 0; j < 3; ++j) {
            h.gamma(i, j) = uniform(rng);
        }
    }
    return h;
}

GeneralHamiltonian random_case1_hamiltonian(Rng& rng, double bound) {
    for (;;) {
        GeneralHamiltonian h = random_general_hamiltonian(rng, bound);
        Eigen::SelfAdjointEigenSolver<Matrix3d> solver(gamma_gram(h));
        const Vector3d lambda = solver.eigenvalues();
        const double scale = std::max(1.0, lambda(2));
        if (lambda(0) > 0.01 * scale &&
            lambda(1) - lambda(0) > 0.02 * scale &&
            lambda(2) - lambda(1) > 0.02 * scale) {
            return h;
        }
    }
}

CanonicalHamiltonian random_canonical_hamiltonian(Rng& rng, double bound,
                                                  double gamma_min,
                                                  double gamma_max) {
    std::uniform_real_distribution<double> uniform(-bound, bound);
    std::uniform_real_distribution<double> gamma_dist(gamma_min, gamma_max);
    std::bernoulli_distribution coin;
    CanonicalHamiltonian h;
    for (int i = 0; i < 3; ++i) {
        h.alpha(i) = uniform(rng);
        h.beta(i) = uniform(rng);
    }
    Vector3d g{gamma_dist(rng), gamma_dist(rng), gamma_dist(rng)};
    std::sort(g.data(), g.data() + 3);
    h.gamma = g;
    if (coin(rng)) {
        h.gamma(0) = -h.gamma(0);
    }
    return h;
}

TwoQubitState random_pure_state(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector4cd psi;
    for (int i = 0; i < 4; ++i) {
        psi(i) = std::complex<double>(gauss(rng), gauss(rng));
    }
    return state_from_pure(psi);
}

Matrix3d random_rotation(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector3d axis{gauss(rng), gauss(rng), gauss(rng)};
    axis.normalize();
    std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * M_PI);
    const double angle = angle_dist(rng);
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

} // namespace dyad
