#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyad/reconstruction.hpp"
#include "dyad/sampling.hpp"

#include <cmath>

using namespace dyad;

namespace {

double param_dist(const CanonicalHamiltonian& a, const CanonicalHamiltonian& b) {
    double d = (a.alpha - b.alpha).cwiseAbs().maxCoeff();
    d = std::max(d, (a.beta - b.beta).cwiseAbs().maxCoeff());
    d = std::max(d, (a.gamma - b.gamma).cwiseAbs().maxCoeff());
    return d;
}

CanonicalHamiltonian canonical(const Vector3d& alpha, const Vector3d& beta,
                               const Vector3d& gamma) {
    CanonicalHamiltonian h;
    h.alpha = alpha;
    h.beta = beta;
    h.gamma = gamma;
    return h;
}

} // namespace

TEST_CASE("extract_alpha reads the first-order block") {
    GeneralHamiltonian h;
    h.alpha = Vector3d{0.0, 0.0, 1.0};
    CHECK((extract_alpha(taylor_maps(h, 1)) - h.alpha).cwiseAbs().maxCoeff() <
          1e-14);

    // gamma and beta contribute nothing at first order in the u-block.
    GeneralHamiltonian no_alpha;
    no_alpha.beta = Vector3d{0.5, -0.4, 0.9};
    no_alpha.gamma << 0.3, -0.2, 0.8, 0.1, 0.7, -0.5, 0.2, 0.4, 0.6;
    CHECK(extract_alpha(taylor_maps(no_alpha, 1)).cwiseAbs().maxCoeff() <
          1e-14);

    Rng rng(211);
    for (int trial = 0; trial < 100; ++trial) {
        const GeneralHamiltonian r = random_general_hamiltonian(rng);
        CHECK((extract_alpha(taylor_maps(r, 1)) - r.alpha).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("extract_alpha rejects data with a symmetric first order") {
    Rng rng(223);
    TaylorTable table = taylor_maps(random_general_hamiltonian(rng), 2);
    table.coeff[1].u(0, 1) += 0.1; // symmetric corruption
    CHECK_THROWS_AS(static_cast<void>(extract_alpha(table)), MalformedDataError);
}

TEST_CASE("extract_gram: zero, diagonal, and random interactions") {
    GeneralHamiltonian no_gamma;
    no_gamma.alpha = Vector3d{0.4, -0.2, 0.9};
    no_gamma.beta = Vector3d{0.1, 0.6, -0.3};
    const TaylorTable t0 = taylor_maps(no_gamma, 2);
    CHECK(extract_gram(t0, no_gamma.alpha).cwiseAbs().maxCoeff() < 1e-13);

    // Diagonal gamma = diag(a, b, c): the Sigma1 diagonal term carries
    // b^2 + c^2 once the alpha part is removed.
    GeneralHamiltonian diag;
    diag.alpha = Vector3d{0.3, -0.7, 0.2};
    diag.gamma = Vector3d{0.5, 1.1, 1.7}.asDiagonal();
    const TaylorTable t1 = taylor_maps(diag, 2);
    const Matrix3d gram = extract_gram(t1, diag.alpha);
    CHECK(gram(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(gram(1, 1) == doctest::Approx(1.21).epsilon(1e-12));
    CHECK(gram(2, 2) == doctest::Approx(2.89).epsilon(1e-12));
    CHECK(std::abs(gram(0, 1)) + std::abs(gram(1, 2)) + std::abs(gram(0, 2)) <
          1e-12);

    Rng rng(227);
    for (int trial = 0; trial < 50; ++trial) {
        const GeneralHamiltonian r = random_general_hamiltonian(rng);
        const Matrix3d estimated =
            extract_gram(taylor_maps(r, 2), extract_alpha(taylor_maps(r, 1)));
        CHECK((estimated - gamma_gram(r)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("extract_gram rejects an impossible second order") {
    Rng rng(229);
    TaylorTable table = taylor_maps(random_general_hamiltonian(rng), 2);
    table.coeff[2].u(0, 0) += 10.0; // drives a Gram eigenvalue negative
    CHECK_THROWS_AS(static_cast<void>(extract_gram(table, extract_alpha(table))),
                    MalformedDataError);
}

TEST_CASE("frame_align: already-diagonal data is untouched") {
    CanonicalHamiltonian h = canonical({0.2, -0.4, 0.7}, {0.3, 0.1, -0.5},
                                       {0.7, 1.1, 1.3});
    const TaylorTable table = taylor_maps(h, 3);
    const Matrix3d gram = extract_gram(table, h.alpha);
    const FrameAlignResult aligned = frame_align(table, gram);
    CHECK((aligned.rotation - Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK(aligned.gamma_squares(0) == doctest::Approx(0.49).epsilon(1e-10));
    CHECK(aligned.gamma_squares(1) == doctest::Approx(1.21).epsilon(1e-10));
    CHECK(aligned.gamma_squares(2) == doctest::Approx(1.69).epsilon(1e-10));
    CHECK(max_abs_diff(aligned.table.coeff[3], table.coeff[3]) < 1e-12);
}

TEST_CASE("frame_align diagonalizes a rotated interaction") {
    Rng rng(233);
    for (int trial = 0; trial < 10; ++trial) {
        GeneralHamiltonian h;
        h.alpha = Vector3d{0.3, -0.1, 0.6};
        h.beta = Vector3d{-0.2, 0.5, 0.4};
        h.gamma = random_rotation(rng) *
                  Matrix3d(Vector3d{0.7, 1.1, 1.3}.asDiagonal()) *
                  random_rotation(rng).transpose();

        const TaylorTable table = taylor_maps(h, 2);
        const Matrix3d gram = extract_gram(table, extract_alpha(table));
        const FrameAlignResult aligned = frame_align(table, gram);

        CHECK(aligned.gamma_squares(0) == doctest::Approx(0.49).epsilon(1e-10));
        CHECK(aligned.gamma_squares(1) == doctest::Approx(1.21).epsilon(1e-10));
        CHECK(aligned.gamma_squares(2) == doctest::Approx(1.69).epsilon(1e-10));

        // Re-running the extraction in the aligned frame gives a diagonal
        // Gram matrix.
        const Matrix3d regram =
            extract_gram(aligned.table, extract_alpha(aligned.table));
        Matrix3d off = regram;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("classify thresholds the gamma squares") {
    const double eps = 1e-6;
    CHECK(classify({0.49, 1.21, 1.69}, std::nullopt, eps) == CaseClass::CaseI);
    CHECK(classify({0.0, 1.21, 1.69}, std::nullopt, eps) == CaseClass::CaseII);
    CHECK(classify({0.0, 0.0, 1.69}, std::nullopt, eps) == CaseClass::CaseIII);
    CHECK(classify({0.0, 0.0, 1.69}, 0.0, eps) == CaseClass::Exception);
    CHECK(classify({0.0, 0.0, 1.69}, 0.25, eps) == CaseClass::CaseIII);
    CHECK(classify({0.0, 0.0, 0.0}, std::nullopt, eps) ==
          CaseClass::NoInteraction);
    CHECK_THROWS_AS(static_cast<void>(classify({1.0, 0.5, 2.0}, std::nullopt, eps)),
                    std::invalid_argument);
}

TEST_CASE("extract_beta, case i: signs ride on the gamma1 branch") {
    const Vector3d alpha{0.2, -0.3, 0.5};
    const Vector3d beta{0.4, 0.1, -0.6};
    const Vector3d gamma{0.7, 1.1, 1.3};
    const TaylorTable table = taylor_maps(canonical(alpha, beta, gamma), 4);

    const BetaResult result =
        extract_beta(table, alpha, gamma, CaseClass::CaseI, 1e-6);
    CHECK(result.final_case == CaseClass::CaseI);
    CHECK(result.undetermined.empty());
    CHECK((result.beta - beta).cwiseAbs().maxCoeff() < 1e-9);

    // The same data with the opposite gamma1 sign flips beta2, beta3.
    const BetaResult flipped = extract_beta(
        table, alpha, Vector3d{-0.7, 1.1, 1.3}, CaseClass::CaseI, 1e-6);
    CHECK(flipped.beta(0) == doctest::Approx(beta(0)).epsilon(1e-9));
    CHECK(flipped.beta(1) == doctest::Approx(-beta(1)).epsilon(1e-9));
    CHECK(flipped.beta(2) == doctest::Approx(-beta(2)).epsilon(1e-9));
}

TEST_CASE("extract_beta, case i: zero beta stays zero with no flags") {
    const Vector3d alpha{0.1, 0.2, -0.3};
    const Vector3d gamma{0.7, 1.1, 1.3};
    const TaylorTable table =
        taylor_maps(canonical(alpha, Vector3d::Zero(), gamma), 4);
    const BetaResult result =
        extract_beta(table, alpha, gamma, CaseClass::CaseI, 1e-6);
    CHECK(result.beta.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(result.undetermined.empty());
}

TEST_CASE("extract_beta flags cross-order inconsistency") {
    const Vector3d alpha{0.2, -0.3, 0.5};
    const Vector3d gamma{0.7, 1.1, 1.3};
    const TaylorTable good =
        taylor_maps(canonical(alpha, {0.4, 0.1, -0.6}, gamma), 4);
    TaylorTable frankenstein = good;
    frankenstein.coeff[4] =
        taylor_maps(canonical(alpha, {-0.9, 0.8, 0.2}, gamma), 4).coeff[4];
    CHECK_THROWS_AS(static_cast<void>(extract_beta(frankenstein, alpha, gamma,
                                                   CaseClass::CaseI, 1e-6)),
                    MalformedDataError);
}

TEST_CASE("extract_beta, case iii: beta3 magnitude from sixth order") {
    const Vector3d alpha{0.3, -0.2, 0.4};
    const Vector3d beta{0.5, 0.0, 0.8};
    const Vector3d gamma{0.0, 0.0, 1.3};
    const TaylorTable table = taylor_maps(canonical(alpha, beta, gamma), 6);
    const BetaResult result =
        extract_beta(table, alpha, gamma, CaseClass::CaseIII, 1e-6);
    CHECK(result.final_case == CaseClass::CaseIII);
    CHECK(result.beta(0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(result.beta(1) == doctest::Approx(0.0));
    CHECK(std::abs(result.beta(2)) == doctest::Approx(0.8).epsilon(1e-7));
}

TEST_CASE("reconstruct: the worked example yields the two gamma1 branches") {
    CanonicalHamiltonian h =
        canonical(Vector3d::Zero(), Vector3d::Zero(), {0.7, 1.1, 1.3});
    const ReconstructionReport report = reconstruct(taylor_maps(h, 6));
    CHECK(report.case_class == CaseClass::CaseI);
    CHECK(report.undetermined.empty());
    CHECK(report.candidate_plus.alpha.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(report.candidate_plus.beta.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(report.candidate_plus.gamma(0) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(report.candidate_plus.gamma(1) == doctest::Approx(1.1).epsilon(1e-10));
    CHECK(report.candidate_plus.gamma(2) == doctest::Approx(1.3).epsilon(1e-10));
    CHECK(report.candidate_minus.gamma(0) ==
          doctest::Approx(-0.7).epsilon(1e-10));
    CHECK(param_dist(report.candidate_minus,
                     sign_partner(report.candidate_plus)) == 0.0);
}

TEST_CASE("reconstruct: no interaction reported when gamma vanishes") {
    GeneralHamiltonian h;
    h.alpha = Vector3d{0.4, -0.9, 0.3};
    h.beta = Vector3d{0.2, 0.5, -0.1}; // invisible to the observed qubit
    const ReconstructionReport report = reconstruct(taylor_maps(h, 4));
    CHECK(report.case_class == CaseClass::NoInteraction);
    CHECK(report.candidate_plus.gamma.cwiseAbs().maxCoeff() == 0.0);
    CHECK(report.candidate_plus.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(report.undetermined.size() == 3);
}

TEST_CASE("reconstruct round trip on random case-i Hamiltonians") {
    Rng rng(241);
    for (int trial = 0; trial < 25; ++trial) {
        const GeneralHamiltonian h = random_case1_hamiltonian(rng);
        const CanonicalizeResult truth = canonicalize(h);
        const ReconstructionReport report = reconstruct(taylor_maps(h, 4));

        CHECK(report.case_class == CaseClass::CaseI);
        const double plus_dist = param_dist(report.candidate_plus, truth.canonical);
        const double minus_dist =
            param_dist(report.candidate_minus, truth.canonical);
        CHECK(std::min(plus_dist, minus_dist) < 1e-8);
        CHECK(std::max(plus_dist, minus_dist) > 1e-4); // candidates differ

        // Both candidates regenerate the frame-aligned input through order 6.
        const TaylorTable reference = rotate_sigma_frame(
            taylor_maps(h, 6), report.frame_rotation);
        for (const auto& candidate :
             {report.candidate_plus, report.candidate_minus}) {
            const TaylorTable regen = taylor_maps(candidate, 6);
            for (int m = 0; m <= 6; ++m) {
                CHECK((regen.coeff[static_cast<std::size_t>(m)].u -
                       reference.coeff[static_cast<std::size_t>(m)].u)
                          .cwiseAbs()
                          .maxCoeff() < 1e-10);
            }
        }
    }
}

TEST_CASE("reconstruct round trip, case ii") {
    CanonicalHamiltonian h =
        canonical({0.2, -0.4, 0.6}, {0.4, 0.3, -0.7}, {0.0, 1.1, 1.3});
    const ReconstructionReport report = reconstruct(taylor_maps(h, 4));
    CHECK(report.case_class == CaseClass::CaseII);
    const double plus_dist = param_dist(report.candidate_plus, h);
    const double minus_dist = param_dist(report.candidate_minus, h);
    CHECK(std::min(plus_dist, minus_dist) < 1e-8);
    // plus branch convention: beta3 >= 0.
    CHECK(report.candidate_plus.beta(2) >= 0.0);
}

TEST_CASE("reconstruct order sufficiency") {
    // Case (i) succeeds already at order 3.
    Rng rng(251);
    const GeneralHamiltonian h1 = random_case1_hamiltonian(rng);
    const ReconstructionReport r1 = reconstruct(taylor_maps(h1, 3));
    const CanonicalizeResult truth = canonicalize(h1);
    CHECK(std::min(param_dist(r1.candidate_plus, truth.canonical),
                   param_dist(r1.candidate_minus, truth.canonical)) < 1e-8);

    // Case (iii) with beta1 > 0 needs six orders; four must fail loudly.
    CanonicalHamiltonian h3 =
        canonical({0.3, -0.2, 0.4}, {0.5, 0.0, 0.8}, {0.0, 0.0, 1.3});
    CHECK_THROWS_AS(static_cast<void>(reconstruct(taylor_maps(h3, 4))),
                    InsufficientOrderError);
    const ReconstructionReport r3 = reconstruct(taylor_maps(h3, 6));
    CHECK(r3.case_class == CaseClass::CaseIII);
    CHECK(std::min(param_dist(r3.candidate_plus, h3),
                   param_dist(r3.candidate_minus, h3)) < 1e-7);
}

TEST_CASE("reconstruct: the exception flags beta3 and ignores its value") {
    for (const double beta3 : {-5.0, 0.0, 5.0}) {
        CanonicalHamiltonian h =
            canonical({0.4, -0.1, 0.7}, {0.0, 0.0, beta3}, {0.0, 0.0, 1.3});
        const ReconstructionReport report = reconstruct(taylor_maps(h, 6));
        CHECK(report.case_class == CaseClass::Exception);
        REQUIRE(report.undetermined.size() == 1);
        CHECK(report.undetermined[0] == "beta3");
        CHECK(report.candidate_plus.beta.cwiseAbs().maxCoeff() < 1e-9);
        CHECK(report.candidate_plus.gamma(2) ==
              doctest::Approx(1.3).epsilon(1e-10));
    }
}

TEST_CASE("reconstruct refuses tables that are too short") {
    Rng rng(257);
    const GeneralHamiltonian h = random_general_hamiltonian(rng);
    CHECK_THROWS_AS(static_cast<void>(reconstruct(taylor_maps(h, 1))),
                    InsufficientOrderError);
}

TEST_CASE("reconstruct rejects non-finite coefficients") {
    Rng rng(259);
    TaylorTable table = taylor_maps(random_general_hamiltonian(rng), 4);
    table.coeff[3].v(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(static_cast<void>(reconstruct(table)), MalformedDataError);
}

TEST_CASE("reconstruct handles unordered diagonal interactions") {
    // The canonical ordering is produced by the frame alignment even when
    // the input interaction is diagonal but out of order.
    GeneralHamiltonian h;
    h.alpha = Vector3d{0.2, -0.1, 0.4};
    h.beta = Vector3d{0.5, -0.3, 0.6};
    h.gamma = Vector3d{1.3, 0.7, 1.1}.asDiagonal();
    const ReconstructionReport report = reconstruct(taylor_maps(h, 4));
    CHECK(report.case_class == CaseClass::CaseI);
    CHECK(std::abs(report.candidate_plus.gamma(0)) ==
          doctest::Approx(0.7).epsilon(1e-9));
    CHECK(report.candidate_plus.gamma(1) == doctest::Approx(1.1).epsilon(1e-9));
    CHECK(report.candidate_plus.gamma(2) == doctest::Approx(1.3).epsilon(1e-9));
    const CanonicalizeResult truth = canonicalize(h);
    CHECK(std::min(param_dist(report.candidate_plus, truth.canonical),
                   param_dist(report.candidate_minus, truth.canonical)) < 1e-8);
}

TEST_CASE("reconstruct round trip on rotated rank-2 interactions (case ii)") {
    Rng rng(263);
    for (int trial = 0; trial < 10; ++trial) {
        GeneralHamiltonian h;
        h.alpha = Vector3d{0.3, -0.2, 0.5};
        h.beta = Vector3d{0.6, 0.4, -0.5};
        h.gamma = random_rotation(rng) *
                  Matrix3d(Vector3d{0.0, 0.9, 1.4}.asDiagonal()) *
                  random_rotation(rng).transpose();

        const ReconstructionReport report = reconstruct(taylor_maps(h, 4));
        CHECK(report.case_class == CaseClass::CaseII);
        const CanonicalizeResult truth = canonicalize(h);
        CHECK(std::min(param_dist(report.candidate_plus, truth.canonical),
                       param_dist(report.candidate_minus, truth.canonical)) <
              1e-7);
    }
}

TEST_CASE("reconstruct on rotated rank-1 interactions recovers the gauge "
          "invariants (case iii)") {
    Rng rng(269);
    for (int trial = 0; trial < 10; ++trial) {
        GeneralHamiltonian h;
        h.alpha = Vector3d{0.3, -0.2, 0.5};
        h.beta = Vector3d{0.6, 0.4, -0.5};
        h.gamma = random_rotation(rng) *
                  Matrix3d(Vector3d{0.0, 0.0, 1.4}.asDiagonal()) *
                  random_rotation(rng).transpose();

        const ReconstructionReport report = reconstruct(taylor_maps(h, 6));
        CHECK(report.case_class == CaseClass::CaseIII);

        // Both the Sigma and Xi frames keep a residual rotation about the
        // surviving interaction axis, so the comparison runs on the gauge
        // invariants: gamma3, alpha3, |(alpha1, alpha2)|, sqrt(b1^2 + b2^2)
        // and |beta3|. The convention puts beta2 = 0, beta1 > 0.
        const CanonicalHamiltonian truth = canonicalize(h).canonical;
        const CanonicalHamiltonian& plus = report.candidate_plus;
        CHECK(plus.gamma(2) == doctest::Approx(truth.gamma(2)).epsilon(1e-8));
        CHECK(plus.alpha(2) == doctest::Approx(truth.alpha(2)).epsilon(1e-8));
        CHECK(std::hypot(plus.alpha(0), plus.alpha(1)) ==
              doctest::Approx(std::hypot(truth.alpha(0), truth.alpha(1)))
                  .epsilon(1e-8));
        CHECK(plus.beta(1) == 0.0);
        CHECK(plus.beta(0) ==
              doctest::Approx(std::hypot(truth.beta(0), truth.beta(1)))
                  .epsilon(1e-7));
        CHECK(std::abs(plus.beta(2)) ==
              doctest::Approx(std::abs(truth.beta(2))).epsilon(1e-6));
    }
}

TEST_CASE("reconstruct accepts tables deeper than the case requires") {
    Rng rng(271);
    const GeneralHamiltonian h = random_case1_hamiltonian(rng);
    const ReconstructionReport report = reconstruct(taylor_maps(h, 8));
    CHECK(report.case_class == CaseClass::CaseI);
    CHECK(report.diagnostics.order_residuals.size() == 9);
    CHECK(report.diagnostics.verify_max < 1e-9);
}
