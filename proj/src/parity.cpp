#include "dyad/parity.hpp"

#include "dyad/dynamics.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace dyad {

namespace {

using pauli::basis_matrix;
using pauli::kBasisSize;
using pauli::Matrix4;
using pauli::PauliElement;

const char* color_name(OperatorColor c) {
    return c == OperatorColor::Blue ? "blue" : "red";
}

std::string element_name(PauliElement e) {
    std::ostringstream out;
    out << "(sigma" << e.sigma << ", xi" << e.xi << ")";
    return out.str();
}

} // namespace

OperatorColor color_of(PauliElement e) {
    if (e.sigma == 0) {
        // Xi_1 is blue; Xi_2, Xi_3 are red; the identity counts as blue.
        return (e.xi == 2 || e.xi == 3) ? OperatorColor::Red
                                        : OperatorColor::Blue;
    }
    return e.xi == 1 ? OperatorColor::Red : OperatorColor::Blue;
}

ColorAlgebraReport check_color_algebra() {
    ColorAlgebraReport report;
    report.pass = true;

    for (int a = 1; a < kBasisSize; ++a) {
        for (int b = 1; b < kBasisSize; ++b) {
            const auto ea = PauliElement::from_index(a);
            const auto eb = PauliElement::from_index(b);
            ++report.pairs_checked;

            const Matrix4 comm =
                pauli::commutator(basis_matrix(ea), basis_matrix(eb));
            const auto coeffs = pauli::pauli_expand_complex(comm);

            // The commutator must be 0 or 2i times a single basis element.
            int result_index = -1;
            bool clean = true;
            for (int i = 0; i < kBasisSize; ++i) {
                const std::complex<double> c = coeffs(i);
                if (std::abs(c) < 1e-12) {
                    continue;
                }
                if (result_index >= 0 || std::abs(std::abs(c) - 2.0) > 1e-12 ||
                    std::abs(c.real()) > 1e-12) {
                    clean = false;
                    break;
                }
                result_index = i;
            }
            if (!clean) {
                report.pass = false;
                report.violations.push_back(
                    "commutator of " + element_name(ea) + " and " +
                    element_name(eb) + " is not 0 or 2i times a basis element");
                continue;
            }
            if (result_index < 0) {
                ++report.zero_commutators;
                continue;
            }

            const OperatorColor got =
                color_of(PauliElement::from_index(result_index));
            const OperatorColor expected =
                color_of(ea) == color_of(eb) ? OperatorColor::Blue
                                             : OperatorColor::Red;
            if (got != expected) {
                report.pass = false;
                std::ostringstream msg;
                msg << "[" << element_name(ea) << ", " << element_name(eb)
                    << "] = " << color_name(got) << " "
                    << element_name(PauliElement::from_index(result_index))
                    << ", expected " << color_name(expected);
                report.violations.push_back(msg.str());
            }
        }
    }
    return report;
}

ParityReport verify_parity_series(const CanonicalHamiltonian& h, int order,
                                  double tolerance) {
    ParityReport report;
    report.order = order;
    report.tolerance = tolerance;

    const TaylorTable plus = taylor_maps(h, order);
    const TaylorTable minus = taylor_maps(sign_partner(h), order);

    for (int m = 0; m <= order; ++m) {
        const MapBlocks& a = plus.coeff[static_cast<std::size_t>(m)];
        const MapBlocks& b = minus.coeff[static_cast<std::size_t>(m)];

        report.max_u_deviation = std::max(
            report.max_u_deviation, (a.u - b.u).cwiseAbs().maxCoeff());

        // Blue: v column 1 and the w slices with Xi index 2, 3 coincide.
        report.max_blue_deviation =
            std::max(report.max_blue_deviation,
                     (a.v.col(0) - b.v.col(0)).cwiseAbs().maxCoeff());
        // Red: v columns 2, 3 and the w slice with Xi index 1 negate.
        for (int col = 1; col < 3; ++col) {
            report.max_red_deviation =
                std::max(report.max_red_deviation,
                         (a.v.col(col) + b.v.col(col)).cwiseAbs().maxCoeff());
        }
        for (int n = 0; n < 3; ++n) {
            report.max_red_deviation = std::max(
                report.max_red_deviation,
                (a.w[n].col(0) + b.w[n].col(0)).cwiseAbs().maxCoeff());
            for (int col = 1; col < 3; ++col) {
                report.max_blue_deviation = std::max(
                    report.max_blue_deviation,
                    (a.w[n].col(col) - b.w[n].col(col)).cwiseAbs().maxCoeff());
            }
        }
    }
    report.pass = report.max_u_deviation <= tolerance &&
                  report.max_blue_deviation <= tolerance &&
                  report.max_red_deviation <= tolerance;
    return report;
}

double verify_spectrum_gap(const CanonicalHamiltonian& h) {
    if (h.alpha.cwiseAbs().maxCoeff() > 1e-12 ||
        h.beta.cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument(
            "verify_spectrum_gap: only asserted for alpha = beta = 0");
    }
    const Vector4d a = spectrum(h);
    const Vector4d b = spectrum(sign_partner(h));
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace dyad
