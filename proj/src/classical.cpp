#include "dyad/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace dyad {

namespace {

// e^M for a 2x2 long double matrix by scaling-and-squaring with a Taylor
// series; plenty for the tiny stencil times and exact for the tests' range.
std::array<long double, 4> expm2(std::array<long double, 4> m) {
    long double norm = std::max(std::abs(m[0]) + std::abs(m[1]),
                                std::abs(m[2]) + std::abs(m[3]));
    int squarings = 0;
    while (norm > 0.25L) {
        norm *= 0.5L;
        ++squarings;
    }
    const long double scale = std::pow(0.5L, squarings);
    for (auto& entry : m) {
        entry *= scale;
    }

    auto multiply = [](const std::array<long double, 4>& a,
                       const std::array<long double, 4>& b) {
        return std::array<long double, 4>{
            a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
    };

    std::array<long double, 4> result{1.0L, 0.0L, 0.0L, 1.0L};
    std::array<long double, 4> term{1.0L, 0.0L, 0.0L, 1.0L};
    for (int k = 1; k <= 24; ++k) {
        term = multiply(term, m);
        const long double inv = 1.0L / static_cast<long double>(k);
        for (auto& entry : term) {
            entry *= inv;
        }
        for (int i = 0; i < 4; ++i) {
            result[static_cast<std::size_t>(i)] += term[static_cast<std::size_t>(i)];
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = multiply(result, result);
    }
    return result;
}

long double x_at_long(const ClassicalCanonical& c, long double x0,
                      long double y0, long double t) {
    const std::array<long double, 4> m{
        static_cast<long double>(c.alpha) * t,
        static_cast<long double>(c.gamma) * t,
        static_cast<long double>(c.sign) * static_cast<long double>(c.gamma) * t,
        static_cast<long double>(c.beta) * t};
    const auto propagator = expm2(m);
    return propagator[0] * x0 + propagator[1] * y0;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.residual = std::max(
            fit.residual, std::abs(fit.slope * x[i] + fit.intercept - y[i]));
    }
    return fit;
}

} // namespace

Vector3d closed_form_sigma(const Vector3d& gammas, const TwoQubitState& s,
                           double t) {
    const double c1 = std::cos(gammas(0) * t), s1 = std::sin(gammas(0) * t);
    const double c2 = std::cos(gammas(1) * t), s2 = std::sin(gammas(1) * t);
    const double c3 = std::cos(gammas(2) * t), s3 = std::sin(gammas(2) * t);

    Vector3d out;
    out(0) = s.sigma(0) * c2 * c3 + s.xi(0) * s2 * s3 -
             s.corr(1, 2) * c2 * s3 + s.corr(2, 1) * s2 * c3;
    out(1) = s.sigma(1) * c3 * c1 + s.xi(1) * s3 * s1 -
             s.corr(2, 0) * c3 * s1 + s.corr(0, 2) * s3 * c1;
    out(2) = s.sigma(2) * c1 * c2 + s.xi(2) * s1 * s2 -
             s.corr(0, 1) * c1 * s2 + s.corr(1, 0) * s1 * c2;
    return out;
}

Vector4d example_eigenvalues(const Vector3d& g) {
    Vector4d values;
    values << 0.5 * (-g(0) + g(1) + g(2)), 0.5 * (g(0) + g(1) - g(2)),
        0.5 * (g(0) - g(1) + g(2)), 0.5 * (-g(0) - g(1) - g(2));
    std::sort(values.data(), values.data() + 4);
    return values;
}

ClassicalCanonical classical_normalize(const ClassicalSystem& sys) {
    if (sys.gamma_prime == 0.0 || sys.delta == 0.0) {
        throw std::invalid_argument(
            "classical_normalize: gamma' and delta must both be nonzero");
    }
    double gamma_prime = sys.gamma_prime;
    double delta = sys.delta;
    if (gamma_prime < 0.0) {
        gamma_prime = -gamma_prime;
        delta = -delta;
    }
    ClassicalCanonical c;
    c.alpha = sys.alpha;
    c.beta = sys.beta;
    c.gamma = std::sqrt(gamma_prime * std::abs(delta));
    c.sign = delta > 0.0 ? +1 : -1;
    return c;
}

double normalize_initial_y(const ClassicalSystem& sys, double y0_prime) {
    if (sys.gamma_prime == 0.0 || sys.delta == 0.0) {
        throw std::invalid_argument(
            "normalize_initial_y: gamma' and delta must both be nonzero");
    }
    double gamma_prime = sys.gamma_prime;
    double y0 = y0_prime;
    if (gamma_prime < 0.0) {
        gamma_prime = -gamma_prime;
        y0 = -y0;
    }
    return std::sqrt(gamma_prime / std::abs(sys.delta)) * y0;
}

ClassicalDerivatives classical_derivatives(const ClassicalCanonical& c,
                                           double x0, double y0) {
    const double s = static_cast<double>(c.sign);
    const double g2 = c.gamma * c.gamma;
    ClassicalDerivatives d;
    d.dx = c.alpha * x0 + c.gamma * y0;
    d.d2x = (c.alpha * c.alpha + s * g2) * x0 + c.gamma * (c.alpha + c.beta) * y0;
    d.d3x = (c.alpha * c.alpha * c.alpha + s * 2.0 * c.alpha * g2 +
             s * g2 * c.beta) *
                x0 +
            (c.alpha * c.alpha * c.gamma + c.alpha * c.beta * c.gamma +
             c.beta * c.beta * c.gamma + s * g2 * c.gamma) *
                y0;
    return d;
}

double classical_x_at(const ClassicalCanonical& c, double x0, double y0,
                      double t) {
    return static_cast<double>(x_at_long(c, x0, y0, t));
}

ClassicalDerivatives finite_difference_derivatives(const ClassicalCanonical& c,
                                                   double x0, double y0,
                                                   double step) {
    const long double h = step;
    const long double xm2 = x_at_long(c, x0, y0, -2.0L * h);
    const long double xm1 = x_at_long(c, x0, y0, -h);
    const long double xc = x0;
    const long double xp1 = x_at_long(c, x0, y0, h);
    const long double xp2 = x_at_long(c, x0, y0, 2.0L * h);

    ClassicalDerivatives d;
    d.dx = static_cast<double>((xp1 - xm1) / (2.0L * h));
    d.d2x = static_cast<double>((xp1 - 2.0L * xc + xm1) / (h * h));
    d.d3x = static_cast<double>((xp2 - 2.0L * xp1 + 2.0L * xm1 - xm2) /
                                (2.0L * h * h * h));
    return d;
}

ClassicalReconstruction classical_reconstruct(
    const std::vector<ClassicalDerivativeSample>& samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument(
            "classical_reconstruct: need at least two samples");
    }
    std::vector<double> x0s, dxs, d2xs, d3xs;
    for (const auto& sample : samples) {
        x0s.push_back(sample.x0);
        dxs.push_back(sample.d.dx);
        d2xs.push_back(sample.d.d2x);
        d3xs.push_back(sample.d.d3x);
    }
    {
        auto sorted = x0s;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument(
                "classical_reconstruct: x0 values must be distinct");
        }
    }

    const LinearFit first = fit_line(x0s, dxs);
    const LinearFit second = fit_line(x0s, d2xs);
    const LinearFit third = fit_line(x0s, d3xs);

    ClassicalReconstruction out;
    out.alpha = first.slope;

    const double signed_gamma_sq = second.slope - out.alpha * out.alpha;
    const double zero_tol =
        1e-9 * std::max({1.0, std::abs(second.slope), out.alpha * out.alpha});
    if (std::abs(signed_gamma_sq) <= zero_tol) {
        // No feedback from the hidden variable: x evolves on its own.
        out.hidden_observable = false;
        out.undetermined = {"gamma", "sign", "beta", "y0"};
        out.residual = std::max({first.residual, second.residual, third.residual});
        return out;
    }

    out.hidden_observable = true;
    out.system.alpha = out.alpha;
    out.system.sign = signed_gamma_sq > 0.0 ? +1 : -1;
    const double gamma_sq = std::abs(signed_gamma_sq);
    out.system.gamma = std::sqrt(gamma_sq);
    const double s = static_cast<double>(out.system.sign);
    out.system.beta =
        (third.slope - out.alpha * out.alpha * out.alpha -
         s * 2.0 * out.alpha * gamma_sq) /
        (s * gamma_sq);
    out.y0 = first.intercept / out.system.gamma;

    // Intercepts of the higher derivatives are determined by the recovered
    // parameters; their mismatch is the consistency residual.
    const double predicted2 =
        out.system.gamma * (out.system.alpha + out.system.beta) * out.y0;
    const double predicted3 =
        (out.system.alpha * out.system.alpha * out.system.gamma +
         out.system.alpha * out.system.beta * out.system.gamma +
         out.system.beta * out.system.beta * out.system.gamma +
         s * gamma_sq * out.system.gamma) *
        out.y0;
    out.residual = std::max(
        {first.residual, second.residual, third.residual,
         std::abs(second.intercept - predicted2),
         std::abs(third.intercept - predicted3)});
    return out;
}

} // namespace dyad
