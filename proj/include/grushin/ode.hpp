#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "grushin/errors.hpp"

namespace grushin {

template <std::size_t N>
using ComplexState = std::array<std::complex<double>, N>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double blowup_norm = 1e150;  // stop and report when |state| passes this
    int max_steps = 2000000;
};

template <std::size_t N>
struct OdeOutcome {
    ComplexState<N> state;
    double reached;   // final abscissa (== target unless blew_up)
    bool blew_up;
};

/// Dormand-Prince 5(4) with PI-free step control, integrating in either
/// direction. Linear singular ODEs here grow fast near limit-point
/// endpoints, hence the blow-up outcome instead of an exception.
template <std::size_t N, class F>
OdeOutcome<N> integrate_ode(F&& f, ComplexState<N> y, double t0, double t1,
                            const OdeOptions& opt = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    if (t0 == t1) return {y, t1, false};
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(1e-3, std::abs(t1 - t0) / 16.0);

    auto norm = [](const ComplexState<N>& v) {
        double m = 0.0;
        for (const auto& c : v) m = std::max(m, std::abs(c));
        return m;
    };

    for (int step = 0; step < opt.max_steps; ++step) {
        if (dir * (t - t1) >= 0.0) return {y, t1, false};
        if (norm(y) > opt.blowup_norm) return {y, t, true};
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        const auto k1 = f(t, y);
        ComplexState<N> w;
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * a21 * k1[i];
        const auto k2 = f(t + c2 * h, w);
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const auto k3 = f(t + c3 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const auto k4 = f(t + c4 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const auto k5 = f(t + c5 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const auto k6 = f(t + h, w);
        ComplexState<N> y5;
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const auto k7 = f(t + h, y5);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const std::complex<double> de =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = opt.abs_tol +
                                 opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(de) / scale);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
        }
        const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
            throw NumericalError("ODE step size underflow");
    }
    throw NumericalError("ODE integration exceeded the step budget");
}

}  // namespace grushin
