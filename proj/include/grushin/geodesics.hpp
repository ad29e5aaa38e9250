#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"

namespace grushin {

/// State of the Pontryagin Hamiltonian system: position (x, y) on the
/// cylinder and covector (p_x, p_y). Along the flow p_y is constant (y is
/// cyclic) and H = (p_x^2 + |x|^{2 alpha} p_y^2)/2 is conserved.
struct PhasePoint {
    double x, y, px, py;
};

inline double hamiltonian(const GrushinModel& m, const PhasePoint& p) {
    const double a = m.metric_exponent();
    double w;
    if (a == 0.0)
        w = 1.0;
    else if (a == 1.0)
        w = p.x * p.x;
    else
        w = std::pow(std::abs(p.x), 2.0 * a);
    return 0.5 * (p.px * p.px + w * p.py * p.py);
}

struct TrajectorySample {
    double t;
    PhasePoint state;
};

namespace detail {

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// The flow crosses x = 0 only where |x|^{2 alpha} is smooth there: the
// standard Grushin case alpha = 1 (winded bells share it) and the flat
// cylinder alpha = 0.
inline bool crossing_allowed(const GrushinModel& m) {
    const double a = m.metric_exponent();
    return a == 0.0 || a == 1.0;
}

inline std::array<double, 4> geodesic_rhs(double a, const std::array<double, 4>& z) {
    const double x = z[0], px = z[2], py = z[3];
    double w, force;
    if (a == 0.0) {
        w = 1.0;
        force = 0.0;
    } else if (a == 1.0) {
        w = x * x;
        force = -py * py * x;
    } else {
        const double ax = std::abs(x);
        w = std::pow(ax, 2.0 * a);
        force = -a * std::pow(ax, 2.0 * a - 1.0) * sgn(x) * py * py;
    }
    return {px, w * py, force, 0.0};
}

// Geodesic equations plus their linearization acting on one variation.
inline std::array<double, 8> variational_rhs(double a, const std::array<double, 8>& z) {
    const std::array<double, 4> base{z[0], z[1], z[2], z[3]};
    const auto f = geodesic_rhs(a, base);
    const double x = z[0], py = z[3];
    const double dx = z[4], dpx = z[6], dpy = z[7];
    double w, wx, fx, fpy;
    if (a == 0.0) {
        w = 1.0;
        wx = 0.0;
        fx = 0.0;
        fpy = 0.0;
    } else if (a == 1.0) {
        w = x * x;
        wx = 2.0 * x;
        fx = -py * py;
        fpy = -2.0 * x * py;
    } else {
        const double ax = std::abs(x);
        w = std::pow(ax, 2.0 * a);
        wx = 2.0 * a * std::pow(ax, 2.0 * a - 1.0) * sgn(x);
        fx = -a * (2.0 * a - 1.0) * std::pow(ax, 2.0 * a - 2.0) * py * py;
        fpy = -2.0 * a * std::pow(ax, 2.0 * a - 1.0) * sgn(x) * py;
    }
    return {f[0], f[1], f[2], f[3],
            dpx,
            wx * py * dx + w * dpy,
            fx * dx + fpy * dpy,
            0.0};
}

template <std::size_t N, class Rhs, class Guard>
std::array<double, N> implicit_midpoint_step(const Rhs& rhs, const Guard& guard,
                                             const std::array<double, N>& z, double h) {
    auto f = rhs(z);
    std::array<double, N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = z[i] + h * f[i];  // Euler predictor
    for (int it = 0; it < 100; ++it) {
        std::array<double, N> mid;
        for (std::size_t i = 0; i < N; ++i) mid[i] = 0.5 * (z[i] + y[i]);
        guard(mid);
        f = rhs(mid);
        double diff = 0.0, scale = 1.0;
        std::array<double, N> next;
        for (std::size_t i = 0; i < N; ++i) {
            next[i] = z[i] + h * f[i];
            diff = std::max(diff, std::abs(next[i] - y[i]));
            scale = std::max(scale, std::abs(next[i]));
        }
        y = next;
        if (diff <= 1e-15 * scale) return y;
    }
    throw NumericalError("implicit midpoint iteration stalled");
}

}  // namespace detail

/// Fixed-step implicit-midpoint (symplectic, order 2) integration of the
/// geodesic flow. The trajectory includes both endpoints. For exponents
/// where |x|^{2 alpha} is not smooth at x = 0 the flow refuses to touch the
/// singular set.
inline std::vector<TrajectorySample> geodesic_flow(const GrushinModel& m,
                                                   const PhasePoint& start, double T,
                                                   int steps) {
    if (steps < 1) throw DomainError("steps must be >= 1");
    const double a = m.metric_exponent();
    const bool crossing = detail::crossing_allowed(m);
    const auto guard = [&](const std::array<double, 4>& z) {
        if (!crossing && z[0] <= 0.0)
            throw DomainError("singular-set crossing undefined for this alpha");
    };
    const auto rhs = [a](const std::array<double, 4>& z) { return detail::geodesic_rhs(a, z); };

    std::array<double, 4> z{start.x, start.y, start.px, start.py};
    guard(z);
    const double h = T / steps;
    std::vector<TrajectorySample> out;
    out.reserve(steps + 1);
    out.push_back({0.0, start});
    for (int i = 1; i <= steps; ++i) {
        z = detail::implicit_midpoint_step(rhs, guard, z, h);
        guard(z);
        out.push_back({i * h, PhasePoint{z[0], z[1], z[2], z[3]}});
    }
    return out;
}

/// Exact alpha = 1 geodesic: x'' = -p_y^2 x gives
///   x(t) = x0 cos(p_y t) + (p_x0/p_y) sin(p_y t),
/// with y(t) = y0 + p_y int_0^t x(s)^2 ds in closed form. Requires p_y != 0
/// (the p_y = 0 geodesic is the straight line x = x0 + p_x t).
inline PhasePoint closed_form_alpha1(const PhasePoint& s, double t) {
    if (s.py == 0.0) throw DomainError("use linear case: p_y = 0");
    const double w = s.py;
    const double A = s.x, B = s.px / w;
    const double cwt = std::cos(w * t), swt = std::sin(w * t);
    const double x = A * cwt + B * swt;
    const double px = w * (-A * swt + B * cwt);
    const double s2 = std::sin(2.0 * w * t), c2 = std::cos(2.0 * w * t);
    const double integral_x2 = 0.5 * (A * A + B * B) * t +
                               (A * A - B * B) * s2 / (4.0 * w) +
                               A * B * (1.0 - c2) / (2.0 * w);
    return {x, s.y + w * integral_x2, px, s.py};
}

struct WavefrontPoint {
    double theta;
    double x, y;
};

/// Endpoints at time T of the unit-energy (H = 1/2) geodesic family from
/// (x0, y0): covectors (p_x, p_y) = (cos theta, x0^{-alpha} sin theta).
inline std::vector<WavefrontPoint> wavefront(const GrushinModel& m, double x0, double y0,
                                             double T, int n_angles, int steps = 10000) {
    if (!(x0 > 0.0)) throw DomainError("wavefront base must have x > 0");
    if (n_angles < 1) throw DomainError("need at least one angle");
    const double a = m.metric_exponent();
    const double py_scale = std::pow(x0, -a);
    std::vector<WavefrontPoint> out;
    out.reserve(n_angles);
    for (int i = 0; i < n_angles; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n_angles;
        const PhasePoint start{x0, y0, std::cos(theta), py_scale * std::sin(theta)};
        if (T == 0.0) {
            out.push_back({theta, x0, y0});
            continue;
        }
        const auto traj = geodesic_flow(m, start, T, steps);
        const PhasePoint& end = traj.back().state;
        out.push_back({theta, end.x, end.y});
    }
    return out;
}

/// First conjugate time along the geodesic through `start`, i.e. the first
/// t in (0, T_max] where the geodesic family from (x0, y0) launched on the
/// energy level of `start` focuses: det [dz_theta, dz_t] = 0 in position
/// space, with dz_theta the angle variation of the covector (H-preserving)
/// and dz_t the velocity. Detected by a sign change of the determinant along
/// the flow and refined by bisection.
inline std::optional<double> conjugate_time(const GrushinModel& m, const PhasePoint& start,
                                            double T_max, int steps = 8192) {
    if (!(start.x > 0.0)) throw DomainError("conjugate_time requires a base with x > 0");
    if (!(T_max > 0.0)) throw DomainError("T_max must be positive");
    if (steps < 16) throw DomainError("steps must be >= 16");
    const double a = m.metric_exponent();
    const bool crossing = detail::crossing_allowed(m);
    const auto guard = [&](const std::array<double, 8>& z) {
        if (!crossing && z[0] <= 0.0)
            throw DomainError("singular-set crossing undefined for this alpha");
    };
    const auto rhs = [a](const std::array<double, 8>& z) { return detail::variational_rhs(a, z); };

    const auto det = [a](const std::array<double, 8>& z) {
        const auto f = detail::geodesic_rhs(a, {z[0], z[1], z[2], z[3]});
        return z[4] * f[1] - z[5] * f[0];
    };

    const double xa = std::pow(start.x, a);
    std::array<double, 8> z{start.x, start.y, start.px, start.py,
                            0.0, 0.0, -start.py * xa, start.px / xa};
    const double h = T_max / steps;
    double t_prev = 0.0, d_prev = det(z);
    std::array<double, 8> z_prev = z;
    for (int i = 1; i <= steps; ++i) {
        z = detail::implicit_midpoint_step(rhs, guard, z, h);
        const double t = i * h;
        const double d = det(z);
        if (i > 1 && (d == 0.0 || d_prev * d < 0.0)) {
            // bisection: every probe re-integrates from the bracketing node
            double lo = t_prev, hi = t;
            double dlo = d_prev;
            for (int it = 0; it < 60 && hi - lo > 1e-12 * T_max; ++it) {
                const double mid = 0.5 * (lo + hi);
                std::array<double, 8> zm = z_prev;
                const int sub = 32;
                const double hs = (mid - t_prev) / sub;
                for (int s = 0; s < sub; ++s)
                    zm = detail::implicit_midpoint_step(rhs, guard, zm, hs);
                const double dm = det(zm);
                if (dm == 0.0) return mid;
                if (dlo * dm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    dlo = dm;
                }
            }
            return 0.5 * (lo + hi);
        }
        t_prev = t;
        d_prev = d;
        z_prev = z;
    }
    return std::nullopt;
}

}  // namespace grushin
