#include "dyad/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dyad {

namespace {

// u Taylor coefficient of the given order for a canonical parameter set.
Matrix3d u_coeff(const CanonicalHamiltonian& h, int order) {
    return taylor_maps(h, order).coeff[static_cast<std::size_t>(order)].u;
}

Eigen::Matrix<double, 9, 1> vec9(const Matrix3d& m) {
    return Eigen::Map<const Eigen::Matrix<double, 9, 1>>(m.data());
}

CanonicalHamiltonian make_canonical(const Vector3d& alpha, const Vector3d& beta,
                                    const Vector3d& gamma) {
    CanonicalHamiltonian h;
    h.alpha = alpha;
    h.beta = beta;
    h.gamma = gamma;
    return h;
}

void require_order(const TaylorTable& table, int needed, const char* what) {
    if (table.order() < needed) {
        std::ostringstream msg;
        msg << what << ": table order " << table.order() << " < required order "
            << needed;
        throw InsufficientOrderError(msg.str());
    }
}

// The three third-order products gamma2 gamma3 beta1, gamma3 gamma1 beta2,
// gamma1 gamma2 beta3, read from the antisymmetric part of the third-order
// u-block after removing the beta-independent contribution.
Vector3d third_order_products(const TaylorTable& table, const Vector3d& alpha,
                              const Vector3d& gamma) {
    const Matrix3d base = u_coeff(make_canonical(alpha, Vector3d::Zero(), gamma), 3);
    const Matrix3d raw = 6.0 * (table.coeff[3].u - base);
    Vector3d products;
    products(0) = 0.5 * (raw(1, 2) - raw(2, 1)); // gamma2 gamma3 beta1
    products(1) = 0.5 * (raw(2, 0) - raw(0, 2)); // gamma3 gamma1 beta2
    products(2) = 0.5 * (raw(0, 1) - raw(1, 0)); // gamma1 gamma2 beta3
    return products;
}

struct QuadraticSolve {
    Eigen::VectorXd solution;
    double residual = 0.0;
};

// Least-squares solve of delta = sum_i x_i column_i over the 9 u-entries.
QuadraticSolve solve_columns(const std::vector<Matrix3d>& columns,
                             const Matrix3d& delta) {
    const int n = static_cast<int>(columns.size());
    Eigen::MatrixXd design(9, n);
    for (int i = 0; i < n; ++i) {
        design.col(i) = vec9(columns[static_cast<std::size_t>(i)]);
    }
    const Eigen::Matrix<double, 9, 1> rhs = vec9(delta);
    QuadraticSolve out;
    out.solution = design.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                       .solve(rhs);
    out.residual = (design * out.solution - rhs).cwiseAbs().maxCoeff();
    return out;
}

double block_scale(const Matrix3d& m) {
    return std::max(1.0, m.cwiseAbs().maxCoeff());
}

// Parameters kept free during the final polish, by case.
struct FreeParameters {
    bool beta1 = false, beta2 = false, beta3 = false;
    bool gamma1 = false, gamma2 = false, gamma3 = false;
};

FreeParameters free_parameters(CaseClass c) {
    FreeParameters f;
    switch (c) {
    case CaseClass::CaseI:
        f = {true, true, true, true, true, true};
        break;
    case CaseClass::CaseII:
        f = {true, true, true, false, true, true};
        break;
    case CaseClass::CaseIII:
        f = {true, false, true, false, false, true};
        break;
    case CaseClass::Exception:
        f = {false, false, false, false, false, true};
        break;
    case CaseClass::NoInteraction:
        break;
    }
    return f;
}

std::vector<double*> collect_free(CanonicalHamiltonian& h, const FreeParameters& f) {
    std::vector<double*> params{&h.alpha(0), &h.alpha(1), &h.alpha(2)};
    if (f.beta1) params.push_back(&h.beta(0));
    if (f.beta2) params.push_back(&h.beta(1));
    if (f.beta3) params.push_back(&h.beta(2));
    if (f.gamma1) params.push_back(&h.gamma(0));
    if (f.gamma2) params.push_back(&h.gamma(1));
    if (f.gamma3) params.push_back(&h.gamma(2));
    return params;
}

Eigen::VectorXd u_residual_stack(const CanonicalHamiltonian& h,
                                 const TaylorTable& target) {
    const int order = target.order();
    const TaylorTable regen = taylor_maps(h, order);
    Eigen::VectorXd r(9 * order);
    for (int m = 1; m <= order; ++m) {
        r.segment(9 * (m - 1), 9) =
            vec9(regen.coeff[static_cast<std::size_t>(m)].u -
                 target.coeff[static_cast<std::size_t>(m)].u);
    }
    return r;
}

// Two Gauss-Newton steps against the aligned table; removes the last few
// digits of extraction noise so candidates regenerate the data at close to
// machine precision. Structural zeros stay fixed.
void polish_candidate(CanonicalHamiltonian& h, const TaylorTable& target,
                      CaseClass case_class) {
    const FreeParameters free = free_parameters(case_class);
    auto params = collect_free(h, free);
    const int n = static_cast<int>(params.size());

    for (int iteration = 0; iteration < 2; ++iteration) {
        const Eigen::VectorXd r0 = u_residual_stack(h, target);
        Eigen::MatrixXd jacobian(r0.size(), n);
        for (int i = 0; i < n; ++i) {
            const double saved = *params[static_cast<std::size_t>(i)];
            const double step = 1e-6 * std::max(1.0, std::abs(saved));
            *params[static_cast<std::size_t>(i)] = saved + step;
            const Eigen::VectorXd rp = u_residual_stack(h, target);
            *params[static_cast<std::size_t>(i)] = saved - step;
            const Eigen::VectorXd rm = u_residual_stack(h, target);
            *params[static_cast<std::size_t>(i)] = saved;
            jacobian.col(i) = (rp - rm) / (2.0 * step);
        }
        const Eigen::VectorXd delta =
            jacobian.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                .solve(-r0);
        if (!delta.allFinite() || delta.norm() > 0.1) {
            return; // extraction already failed badly; leave it to verify
        }
        for (int i = 0; i < n; ++i) {
            *params[static_cast<std::size_t>(i)] += delta(i);
        }
    }
}

} // namespace

std::string to_string(CaseClass c) {
    switch (c) {
    case CaseClass::CaseI:
        return "case_i";
    case CaseClass::CaseII:
        return "case_ii";
    case CaseClass::CaseIII:
        return "case_iii";
    case CaseClass::Exception:
        return "exception";
    case CaseClass::NoInteraction:
        return "no_interaction";
    }
    return "unknown";
}

Vector3d extract_alpha(const TaylorTable& table) {
    require_order(table, 1, "extract_alpha");
    const Matrix3d& m = table.coeff[1].u;
    const double symmetric_part =
        (0.5 * (m + m.transpose())).cwiseAbs().maxCoeff();
    if (symmetric_part > 1e-8 * block_scale(m)) {
        std::ostringstream msg;
        msg << "extract_alpha: first-order u-block has symmetric part "
            << symmetric_part
            << "; data not generated by a two-qubit Hamiltonian of the "
               "supported form";
        throw MalformedDataError(msg.str());
    }
    Vector3d alpha;
    alpha(0) = 0.5 * (m(2, 1) - m(1, 2));
    alpha(1) = 0.5 * (m(0, 2) - m(2, 0));
    alpha(2) = 0.5 * (m(1, 0) - m(0, 1));
    return alpha;
}

Matrix3d extract_gram(const TaylorTable& table, const Vector3d& alpha) {
    require_order(table, 2, "extract_gram");
    const Matrix3d raw = 2.0 * table.coeff[2].u;

    // Diagonal: -raw(n,n) = sum_{m != n} (alpha_m^2 + gamma_m . gamma_m).
    Vector3d d;
    for (int n = 0; n < 3; ++n) {
        d(n) = -raw(n, n);
        for (int m = 0; m < 3; ++m) {
            if (m != n) {
                d(n) -= alpha(m) * alpha(m);
            }
        }
    }
    Matrix3d gram;
    gram(0, 0) = 0.5 * (d(1) + d(2) - d(0));
    gram(1, 1) = 0.5 * (d(2) + d(0) - d(1));
    gram(2, 2) = 0.5 * (d(0) + d(1) - d(2));
    for (int m = 0; m < 3; ++m) {
        for (int n = m + 1; n < 3; ++n) {
            const double value =
                0.5 * (raw(m, n) + raw(n, m)) - alpha(m) * alpha(n);
            gram(m, n) = value;
            gram(n, m) = value;
        }
    }

    Eigen::SelfAdjointEigenSolver<Matrix3d> solver(gram);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -1e-8 * std::max(1.0, gram.cwiseAbs().maxCoeff())) {
        std::ostringstream msg;
        msg << "extract_gram: Gram matrix has negative eigenvalue " << min_eig
            << "; data not generated by a two-qubit Hamiltonian of the "
               "supported form";
        throw MalformedDataError(msg.str());
    }
    return gram;
}

FrameAlignResult frame_align(const TaylorTable& table, const Matrix3d& gram) {
    FrameAlignResult out;
    Vector3d lambda;
    out.rotation = rotation_from_gram(gram, &lambda);
    out.gamma_squares = lambda.cwiseMax(0.0);
    out.table = rotate_sigma_frame(table, out.rotation);
    return out;
}

CaseClass classify(const Vector3d& gamma_squares,
                   std::optional<double> beta12_squared, double eps) {
    if (gamma_squares(0) > gamma_squares(1) ||
        gamma_squares(1) > gamma_squares(2)) {
        throw std::invalid_argument("classify: gamma squares must be ascending");
    }
    const double eps2 = eps * eps;
    if (gamma_squares(2) <= eps2) {
        return CaseClass::NoInteraction;
    }
    if (gamma_squares(1) <= eps2) {
        if (beta12_squared.has_value() && *beta12_squared <= eps2) {
            return CaseClass::Exception;
        }
        return CaseClass::CaseIII;
    }
    if (gamma_squares(0) <= eps2) {
        return CaseClass::CaseII;
    }
    return CaseClass::CaseI;
}

double default_epsilon(const Vector3d& alpha, const Vector3d& gamma_squares) {
    const double scale =
        std::sqrt(alpha.squaredNorm() + gamma_squares.cwiseMax(0.0).sum());
    return 1e-6 * std::max(1.0, scale);
}

BetaResult extract_beta(const TaylorTable& table, const Vector3d& alpha,
                        const Vector3d& gamma_abs, CaseClass case_class,
                        double eps, double data_tolerance) {
    BetaResult out;
    out.final_case = case_class;

    switch (case_class) {
    case CaseClass::CaseI: {
        require_order(table, 3, "extract_beta (case i)");
        const Vector3d products = third_order_products(table, alpha, gamma_abs);
        out.beta(0) = products(0) / (gamma_abs(1) * gamma_abs(2));
        out.beta(1) = products(1) / (gamma_abs(2) * gamma_abs(0));
        out.beta(2) = products(2) / (gamma_abs(0) * gamma_abs(1));

        // Cross-order integrity: the fourth order must agree with the betas
        // the third order produced.
        if (table.order() >= 4) {
            const Matrix3d predicted =
                u_coeff(make_canonical(alpha, out.beta, gamma_abs), 4);
            const double dev =
                (predicted - table.coeff[4].u).cwiseAbs().maxCoeff();
            out.solve_residual = dev;
            if (dev > data_tolerance * block_scale(table.coeff[4].u)) {
                std::ostringstream msg;
                msg << "extract_beta: third- and fourth-order beta estimates "
                       "disagree (deviation "
                    << dev << ")";
                throw MalformedDataError(msg.str());
            }
        }
        break;
    }
    case CaseClass::CaseII: {
        require_order(table, 4, "extract_beta (case ii)");
        const Vector3d products = third_order_products(table, alpha, gamma_abs);
        const double beta1 = products(0) / (gamma_abs(1) * gamma_abs(2));

        // Fourth order is quadratic in (beta2, beta3) once beta1 is fixed:
        // probe the exact series for the three sensitivity columns.
        const Matrix3d base =
            u_coeff(make_canonical(alpha, {beta1, 0.0, 0.0}, gamma_abs), 4);
        const Matrix3d col22 =
            u_coeff(make_canonical(alpha, {beta1, 1.0, 0.0}, gamma_abs), 4) - base;
        const Matrix3d col33 =
            u_coeff(make_canonical(alpha, {beta1, 0.0, 1.0}, gamma_abs), 4) - base;
        const Matrix3d col23 =
            u_coeff(make_canonical(alpha, {beta1, 1.0, 1.0}, gamma_abs), 4) -
            base - col22 - col33;
        const Matrix3d delta = table.coeff[4].u - base;
        const QuadraticSolve solve = solve_columns({col22, col33, col23}, delta);
        out.solve_residual = solve.residual;
        const double scale = block_scale(table.coeff[4].u);
        if (solve.residual > data_tolerance * scale) {
            std::ostringstream msg;
            msg << "extract_beta: fourth-order system residual "
                << solve.residual << " inconsistent with the model";
            throw MalformedDataError(msg.str());
        }
        const double beta2_sq = solve.solution(0);
        const double beta3_sq = solve.solution(1);
        const double cross = solve.solution(2);
        if (beta2_sq < -data_tolerance * scale ||
            beta3_sq < -data_tolerance * scale) {
            throw MalformedDataError(
                "extract_beta: fourth order yields a negative squared beta");
        }
        const double abs2 = std::sqrt(std::max(beta2_sq, 0.0));
        const double abs3 = std::sqrt(std::max(beta3_sq, 0.0));
        if (std::abs(std::abs(cross) - abs2 * abs3) >
            data_tolerance * std::max(1.0, abs2 * abs3)) {
            throw MalformedDataError(
                "extract_beta: beta2*beta3 product inconsistent with the "
                "recovered magnitudes");
        }
        out.beta(0) = beta1;
        if (abs3 > eps) {
            out.beta(2) = abs3; // plus branch: beta3 >= 0
            out.beta(1) = cross >= 0.0 ? abs2 : -abs2;
        } else {
            out.beta(2) = 0.0;
            out.beta(1) = abs2; // tie: beta2 >= 0
        }
        break;
    }
    case CaseClass::CaseIII:
    case CaseClass::Exception: {
        require_order(table, 4, "extract_beta (case iii)");
        const Matrix3d base =
            u_coeff(make_canonical(alpha, Vector3d::Zero(), gamma_abs), 4);
        const Matrix3d col11 =
            u_coeff(make_canonical(alpha, {1.0, 0.0, 0.0}, gamma_abs), 4) - base;
        const Matrix3d delta = table.coeff[4].u - base;
        const QuadraticSolve solve = solve_columns({col11}, delta);
        out.solve_residual = solve.residual;
        if (solve.residual > data_tolerance * block_scale(table.coeff[4].u)) {
            std::ostringstream msg;
            msg << "extract_beta: fourth-order system residual "
                << solve.residual << " inconsistent with the model";
            throw MalformedDataError(msg.str());
        }
        const double beta12_sq = solve.solution(0); // beta1^2 + beta2^2

        if (beta12_sq <= eps * eps) {
            // The exception: the beta3 term commutes with the rest of the
            // Hamiltonian and with every Sigma operator.
            out.final_case = CaseClass::Exception;
            out.beta.setZero();
            out.undetermined.push_back("beta3");
            break;
        }
        out.final_case = CaseClass::CaseIII;
        const double beta1 = std::sqrt(beta12_sq); // convention: beta1 > 0, beta2 = 0
        require_order(table, 6, "extract_beta (case iii, beta3)");

        const Matrix3d base6 =
            u_coeff(make_canonical(alpha, {beta1, 0.0, 0.0}, gamma_abs), 6);
        const Matrix3d col33 =
            u_coeff(make_canonical(alpha, {beta1, 0.0, 1.0}, gamma_abs), 6) -
            base6;
        const Matrix3d delta6 = table.coeff[6].u - base6;
        const QuadraticSolve solve6 = solve_columns({col33}, delta6);
        if (solve6.residual > data_tolerance * block_scale(table.coeff[6].u)) {
            std::ostringstream msg;
            msg << "extract_beta: sixth-order system residual "
                << solve6.residual << " inconsistent with the model";
            throw MalformedDataError(msg.str());
        }
        out.beta(0) = beta1;
        out.beta(2) = std::sqrt(std::max(solve6.solution(0), 0.0)); // plus branch
        break;
    }
    case CaseClass::NoInteraction:
        out.undetermined = {"beta1", "beta2", "beta3"};
        break;
    }
    return out;
}

ReconstructionReport reconstruct(const TaylorTable& table,
                                 const ReconstructOptions& options) {
    require_order(table, 2, "reconstruct");
    for (const auto& blocks : table.coeff) {
        if (!flatten_maps(blocks).allFinite()) {
            throw MalformedDataError(
                "reconstruct: input table contains non-finite coefficients");
        }
    }

    const Vector3d alpha_raw = extract_alpha(table);
    const Matrix3d gram = extract_gram(table, alpha_raw);
    FrameAlignResult aligned = frame_align(table, gram);
    const double eps =
        options.eps.value_or(default_epsilon(alpha_raw, aligned.gamma_squares));

    CaseClass case_class = classify(aligned.gamma_squares, std::nullopt, eps);
    if (case_class == CaseClass::NoInteraction) {
        // No interaction, no canonical frame: the data fixes no rotation, so
        // keep the input frame instead of one assembled from rounding noise.
        aligned.rotation = Matrix3d::Identity();
        aligned.table = table;
        aligned.gamma_squares.setZero();
    }

    // One code path, one convention: re-extract alpha in the final frame.
    const Vector3d alpha = extract_alpha(aligned.table);

    Vector3d gamma_abs = aligned.gamma_squares.cwiseSqrt();
    switch (case_class) {
    case CaseClass::NoInteraction:
        gamma_abs.setZero();
        break;
    case CaseClass::CaseIII:
        gamma_abs(0) = 0.0;
        gamma_abs(1) = 0.0;
        break;
    case CaseClass::CaseII:
        gamma_abs(0) = 0.0;
        break;
    default:
        break;
    }

    BetaResult betas = extract_beta(aligned.table, alpha, gamma_abs,
                                    case_class, eps, options.data_tolerance);
    case_class = betas.final_case;

    ReconstructionReport report;
    report.case_class = case_class;
    report.frame_rotation = aligned.rotation;
    report.undetermined = betas.undetermined;
    report.diagnostics.epsilon = eps;
    report.diagnostics.beta_solve_residual = betas.solve_residual;
    report.diagnostics.alpha_antisymmetry_defect =
        (0.5 *
         (aligned.table.coeff[1].u + aligned.table.coeff[1].u.transpose()))
            .cwiseAbs()
            .maxCoeff();

    CanonicalHamiltonian plus = make_canonical(alpha, betas.beta, gamma_abs);
    polish_candidate(plus, aligned.table, case_class);
    report.candidate_plus = plus;
    report.candidate_minus = sign_partner(plus);

    // Verify: both candidates must regenerate the aligned u coefficients.
    const int order = table.order();
    report.diagnostics.order_residuals.assign(
        static_cast<std::size_t>(order) + 1, 0.0);
    double verify_max = 0.0;
    double scale = 1.0;
    for (const auto& candidate :
         {report.candidate_plus, report.candidate_minus}) {
        const TaylorTable regen = taylor_maps(candidate, order);
        for (int m = 0; m <= order; ++m) {
            const auto idx = static_cast<std::size_t>(m);
            const double dev =
                (regen.coeff[idx].u - aligned.table.coeff[idx].u)
                    .cwiseAbs()
                    .maxCoeff();
            auto& slot = report.diagnostics.order_residuals[idx];
            slot = std::max(slot, dev);
            verify_max = std::max(verify_max, dev);
            scale = std::max(scale, block_scale(aligned.table.coeff[idx].u));
        }
    }
    report.diagnostics.verify_max = verify_max;
    if (verify_max > options.data_tolerance * scale) {
        std::ostringstream msg;
        msg << "reconstruct: candidate verification residual " << verify_max
            << " exceeds tolerance; per-order residuals:";
        for (int m = 0; m <= order; ++m) {
            msg << " o" << m << "="
                << report.diagnostics
                       .order_residuals[static_cast<std::size_t>(m)];
        }
        throw ReconstructionError(msg.str());
    }
    return report;
}

} // namespace dyad
