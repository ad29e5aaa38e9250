#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "grushin/errors.hpp"
#include "grushin/format.hpp"

namespace grushin {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on the Legendre recurrence.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("quadrature order must be positive");
    QuadratureRule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

template <class F>
double integrate_gl(F&& f, double a, double b, const QuadratureRule& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

struct IntegralEstimate {
    double value;
    double error;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr double kGK15Nodes[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double kGK15Weights[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double kG7Weights[4] = {
    0.12948496616886969327, 0.27970539148927666790,
    0.38183005050511894495, 0.41795918367346938776};

template <class F>
IntegralEstimate gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(mid);
    double resk = kGK15Weights[7] * fc;
    double resg = kG7Weights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGK15Nodes[j];
        const double f1 = f(mid - dx), f2 = f(mid + dx);
        resk += kGK15Weights[j] * (f1 + f2);
        if (j % 2 == 1) resg += kG7Weights[(j - 1) / 2] * (f1 + f2);
    }
    return {resk * half, std::abs((resk - resg) * half)};
}

template <class F>
IntegralEstimate adaptive_rec(F&& f, double a, double b, double tol, int depth) {
    const IntegralEstimate est = gk15(f, a, b);
    if (est.error <= tol || est.error <= 1e-16 * std::abs(est.value)) return est;
    if (depth == 0) return est;  // caller checks the accumulated bound
    const double mid = 0.5 * (a + b);
    const IntegralEstimate lo = adaptive_rec(f, a, mid, 0.5 * tol, depth - 1);
    const IntegralEstimate hi = adaptive_rec(f, mid, b, 0.5 * tol, depth - 1);
    return {lo.value + hi.value, lo.error + hi.error};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration to an absolute tolerance.
/// Throws NumericalError with the achieved bound when refinement stalls.
template <class F>
IntegralEstimate integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    int max_depth = 48) {
    if (a == b) return {0.0, 0.0};
    const IntegralEstimate est = detail::adaptive_rec(f, a, b, abs_tol, max_depth);
    if (est.error > abs_tol && est.error > 1e-14 * std::abs(est.value))
        throw NumericalError("quadrature did not converge: achieved error bound " +
                             format_double(est.error) + " > " + format_double(abs_tol));
    return est;
}

}  // namespace grushin
