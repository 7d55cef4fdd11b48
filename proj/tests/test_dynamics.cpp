#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyad/dynamics.hpp"
#include "dyad/errors.hpp"
#include "dyad/sampling.hpp"

#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <thread>

using namespace dyad;

TEST_CASE("evolve_heisenberg_exact: free evolution is the identity map") {
    for (int i = 0; i < pauli::kBasisSize; ++i) {
        const auto e = pauli::PauliElement::from_index(i);
        const auto c = evolve_heisenberg_exact(pauli::Matrix4::Zero(), e, 1.7);
        pauli::Coeffs16 expected = pauli::Coeffs16::Zero();
        expected(e.index()) = 1.0;
        CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("evolve_heisenberg_exact reproduces the cos-cos coefficient") {
    CanonicalHamiltonian h;
    h.gamma = Vector3d{0.6, 1.1, 1.3};
    for (const double t : {0.0, 0.3, 0.9, 2.1}) {
        const auto c = evolve_heisenberg_exact(to_matrix(h), {1, 0}, t);
        CHECK(c(pauli::PauliElement{1, 0}.index()) ==
              doctest::Approx(std::cos(1.1 * t) * std::cos(1.3 * t))
                  .epsilon(1e-12));
    }
}

TEST_CASE("two forward routes agree on random Hamiltonians") {
    Rng rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const GeneralHamiltonian h = random_general_hamiltonian(rng);
        std::uniform_real_distribution<double> time_dist(0.0, 2.0);
        const double t = time_dist(rng);
        const MapSnapshot a = map_snapshot(h, t);
        const MapSnapshot b = map_snapshot_adjoint(h, t);
        worst = std::max(worst, max_abs_diff(a.maps, b.maps));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("adjoint propagator matches the eigendecomposition route at t=0.9") {
    Rng rng(103);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    for (int i = 0; i < pauli::kBasisSize; ++i) {
        const auto e = pauli::PauliElement::from_index(i);
        const auto exact = evolve_heisenberg_exact(to_matrix(h), e, 0.9);
        const pauli::Adjoint16 propagator =
            (0.9 * pauli::adjoint_generator(to_matrix(h))).exp();
        pauli::Coeffs16 start = pauli::Coeffs16::Zero();
        start(e.index()) = 1.0;
        CHECK(((propagator * start) - exact).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("map_snapshot: identity at t=0 and the worked sine products") {
    CanonicalHamiltonian h;
    h.gamma = Vector3d{0.7, 1.1, 1.3};

    const MapSnapshot at_zero = map_snapshot(h, 0.0);
    CHECK((at_zero.maps.u - Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK(at_zero.maps.v.cwiseAbs().maxCoeff() < 1e-14);
    for (int n = 0; n < 3; ++n) {
        CHECK(at_zero.maps.w[n].cwiseAbs().maxCoeff() < 1e-14);
    }

    for (const double t : {0.4, 1.0, 1.9}) {
        const MapSnapshot snap = map_snapshot(h, t);
        CHECK(snap.maps.v(0, 0) ==
              doctest::Approx(std::sin(1.1 * t) * std::sin(1.3 * t))
                  .epsilon(1e-12));
        CHECK(snap.maps.w[0](1, 2) ==
              doctest::Approx(-std::cos(1.1 * t) * std::sin(1.3 * t))
                  .epsilon(1e-12));
    }
}

TEST_CASE("map rows stay bounded by 1 and u is even in t for the example") {
    CanonicalHamiltonian h;
    h.gamma = Vector3d{0.7, 1.1, 1.3};
    Rng rng(107);
    std::uniform_real_distribution<double> time_dist(0.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double t = time_dist(rng);
        const MapSnapshot plus = map_snapshot(h, t);
        const MapSnapshot minus = map_snapshot(h, -t);
        CHECK(plus.maps.u.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK((plus.maps.u - minus.maps.u).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("constants of the motion: Sigma_k Xi_k is frozen in the example") {
    CanonicalHamiltonian h;
    h.gamma = Vector3d{0.7, 1.1, 1.3};
    for (int k = 1; k <= 3; ++k) {
        const auto c = evolve_heisenberg_exact(to_matrix(h), {k, k}, 1.37);
        pauli::Coeffs16 expected = pauli::Coeffs16::Zero();
        expected(pauli::PauliElement{k, k}.index()) = 1.0;
        CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("taylor_maps: first and second order match the printed terms") {
    Rng rng(109);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    const TaylorTable table = taylor_maps(h, 2);

    CHECK((table.coeff[0].u - Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK(table.coeff[0].v.cwiseAbs().maxCoeff() < 1e-15);

    // First order: du12/dt = -alpha3, du13/dt = +alpha2 (and cyclic).
    const Matrix3d& first = table.coeff[1].u;
    CHECK(first(0, 1) == doctest::Approx(-h.alpha(2)).epsilon(1e-12));
    CHECK(first(0, 2) == doctest::Approx(h.alpha(1)).epsilon(1e-12));
    CHECK(first(1, 2) == doctest::Approx(-h.alpha(0)).epsilon(1e-12));
    CHECK((first + first.transpose()).cwiseAbs().maxCoeff() < 1e-13);

    // Second order diagonal: the raw derivative is
    // -[(alpha2)^2 + (alpha3)^2 + gamma_2 . gamma_2 + gamma_3 . gamma_3].
    const double raw11 = 2.0 * table.coeff[2].u(0, 0);
    const double expected = -(h.alpha(1) * h.alpha(1) + h.alpha(2) * h.alpha(2) +
                              h.gamma.row(1).squaredNorm() +
                              h.gamma.row(2).squaredNorm());
    CHECK(raw11 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("truncated Taylor sum matches the exact map at small t") {
    Rng rng(113);
    for (int trial = 0; trial < 5; ++trial) {
        const GeneralHamiltonian h = random_general_hamiltonian(rng, 0.6);
        const TaylorTable table = taylor_maps(h, 6);
        const double t = 0.05;

        MapBlocks summed;
        summed.u.setZero();
        double power = 1.0;
        for (int m = 0; m <= 6; ++m) {
            summed.u += power * table.coeff[static_cast<std::size_t>(m)].u;
            summed.v += power * table.coeff[static_cast<std::size_t>(m)].v;
            for (int n = 0; n < 3; ++n) {
                summed.w[n] += power * table.coeff[static_cast<std::size_t>(m)].w[n];
            }
            power *= t;
        }
        const MapSnapshot exact = map_snapshot(h, t);
        CHECK(max_abs_diff(summed, exact.maps) < 1e-9);
    }
}

TEST_CASE("fit_taylor: zero Hamiltonian gives the constant map") {
    const GeneralHamiltonian h;
    std::vector<MapSnapshot> samples;
    for (int i = 0; i < 40; ++i) {
        samples.push_back(map_snapshot(h, 0.005 * i));
    }
    const FitResult fit = fit_taylor(samples, 4, 0.2);
    CHECK((fit.table.coeff[0].u - Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
    for (int m = 1; m <= 4; ++m) {
        CHECK(max_abs_diff(fit.table.coeff[static_cast<std::size_t>(m)],
                           MapBlocks{}) < 1e-10);
    }
}

namespace {

// Rescale so parameter_norm(h) hits the target; keeps the default-window
// rule window ~ 0.2 / ||h|| honest at window 0.2.
GeneralHamiltonian scaled_hamiltonian(Rng& rng, double norm) {
    GeneralHamiltonian h = random_general_hamiltonian(rng, 1.0);
    const double factor = norm / parameter_norm(h);
    h.alpha *= factor;
    h.beta *= factor;
    h.gamma *= factor;
    return h;
}

} // namespace

TEST_CASE("fit_taylor recovers the exact Taylor coefficients") {
    Rng rng(127);
    const GeneralHamiltonian h = scaled_hamiltonian(rng, 0.5);
    std::vector<MapSnapshot> samples;
    for (int i = 0; i < 60; ++i) {
        samples.push_back(map_snapshot(h, 0.2 * (i + 1) / 60.0));
    }
    samples.push_back(map_snapshot(h, 0.0));

    const FitResult fit = fit_taylor(samples, 6, 0.2);
    const TaylorTable exact = taylor_maps(h, 6);
    for (int m = 0; m <= 6; ++m) {
        const double scale = std::max(
            1.0, exact.coeff[static_cast<std::size_t>(m)].u.cwiseAbs().maxCoeff());
        CHECK(max_abs_diff(fit.table.coeff[static_cast<std::size_t>(m)],
                           exact.coeff[static_cast<std::size_t>(m)]) /
                  scale <
              1e-6);
    }
}

TEST_CASE("fit_taylor tolerates 1e-8 sample noise") {
    Rng rng(131);
    const GeneralHamiltonian h = scaled_hamiltonian(rng, 0.3);
    std::uniform_real_distribution<double> noise(-1e-8, 1e-8);
    std::vector<MapSnapshot> samples;
    for (int i = 0; i <= 240; ++i) {
        MapSnapshot snap = map_snapshot(h, 0.5 * i / 240.0);
        Eigen::Matrix<double, 45, 1> flat = flatten_maps(snap.maps);
        for (int p = 0; p < 45; ++p) {
            flat(p) += noise(rng);
        }
        snap.maps = unflatten_maps(flat);
        samples.push_back(snap);
    }
    const FitResult fit = fit_taylor(samples, 4, 0.5);
    const TaylorTable exact = taylor_maps(h, 4);
    for (int m = 0; m <= 4; ++m) {
        CHECK(max_abs_diff(fit.table.coeff[static_cast<std::size_t>(m)],
                           exact.coeff[static_cast<std::size_t>(m)]) < 1e-4);
    }
}

TEST_CASE("fit_taylor rejects ill-conditioned designs and bad sample sets") {
    Rng rng(137);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    std::vector<MapSnapshot> samples;
    // Many samples crammed into a vanishing window: Vandermonde blow-up.
    for (int i = 0; i < 40; ++i) {
        samples.push_back(map_snapshot(h, 1e-9 * i));
    }
    CHECK_THROWS_AS(static_cast<void>(fit_taylor(samples, 8, 1.0)),
                    FitConditioningError);

    samples.resize(3);
    CHECK_THROWS_AS(static_cast<void>(fit_taylor(samples, 4, 1.0)),
                    std::invalid_argument);

    samples = {map_snapshot(h, 0.1), map_snapshot(h, 0.1),
               map_snapshot(h, 0.2), map_snapshot(h, 0.3)};
    CHECK_THROWS_AS(static_cast<void>(fit_taylor(samples, 1, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("mean_trajectory: mixed state stays at the origin") {
    Rng rng(139);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    const TwoQubitState mixed; // all mean values zero
    const auto traj = mean_trajectory(h, mixed, {0.0, 0.5, 1.0});
    for (const auto& point : traj) {
        CHECK(point.cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("mean_trajectory matches the density-matrix oracle") {
    Rng rng(149);
    for (int trial = 0; trial < 10; ++trial) {
        const GeneralHamiltonian h = random_general_hamiltonian(rng);
        const TwoQubitState s = random_pure_state(rng);
        std::uniform_real_distribution<double> time_dist(0.0, 2.0);
        std::vector<double> times;
        for (int i = 0; i < 5; ++i) {
            times.push_back(time_dist(rng));
        }
        const auto traj = mean_trajectory(h, s, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const Vector3d oracle = oracles::density_matrix_means(h, s, times[i]);
            CHECK((traj[i] - oracle).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("mean_trajectory rejects unphysical states unless overridden") {
    Rng rng(151);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    TwoQubitState bad;
    bad.sigma = Vector3d{1.0, 1.0, 1.0};
    bad.xi = Vector3d{1.0, 1.0, 1.0};
    CHECK(!state_is_valid(bad));
    CHECK_THROWS_AS(static_cast<void>(mean_trajectory(h, bad, {0.1})),
                    std::invalid_argument);
    CHECK_NOTHROW(static_cast<void>(mean_trajectory(h, bad, {0.1}, true)));
}

TEST_CASE("pure states expand to valid mean values") {
    Rng rng(157);
    for (int trial = 0; trial < 20; ++trial) {
        const TwoQubitState s = random_pure_state(rng);
        CHECK(state_is_valid(s));
        CHECK(s.sigma.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK(s.xi.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK(s.corr.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        // Round trip through the density matrix.
        const TwoQubitState back = state_from_density(density_matrix(s));
        CHECK((back.sigma - s.sigma).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((back.xi - s.xi).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((back.corr - s.corr).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("concurrent snapshot evaluation matches the serial result") {
    Rng rng(167);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    std::vector<double> times;
    for (int i = 0; i < 64; ++i) {
        times.push_back(0.03 * i);
    }
    std::vector<MapSnapshot> serial;
    for (const double t : times) {
        serial.push_back(map_snapshot(h, t));
    }

    std::vector<MapSnapshot> parallel(times.size());
    std::vector<std::thread> workers;
    const int n_threads = 4;
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < times.size();
                 i += n_threads) {
                parallel[i] = map_snapshot(h, times[i]);
            }
        });
    }
    for (auto& worker : workers) {
        worker.join();
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(max_abs_diff(serial[i].maps, parallel[i].maps) == 0.0);
    }
}

TEST_CASE("rotate_sigma_frame composes with the evolution") {
    // Rotating the frame of a snapshot equals taking the snapshot of the
    // correspondingly rotated Hamiltonian parameters.
    Rng rng(163);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    const Matrix3d r = random_rotation(rng);

    GeneralHamiltonian rotated = h;
    rotated.alpha = r * h.alpha;
    rotated.gamma = r * h.gamma;

    const MapSnapshot original = map_snapshot(h, 0.8);
    const MapSnapshot expected = map_snapshot(rotated, 0.8);
    const MapBlocks transformed = rotate_sigma_frame(original.maps, r);
    CHECK(max_abs_diff(transformed, expected.maps) < 1e-12);
}
