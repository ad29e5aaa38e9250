#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "grushin/embedding.hpp"
#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

/// Radial bump (1-u^2)^3 scaled to [center - halfwidth, center + halfwidth];
/// it and its first two derivatives vanish at the support boundary.
struct TestFunction {
    double center;
    double halfwidth;
    double amplitude = 1.0;

    static TestFunction spanning(double a, double b) {
        return {0.5 * (a + b), 0.5 * (b - a)};
    }

    double value(double x) const {
        const double u = (x - center) / halfwidth;
        if (std::abs(u) >= 1.0) return 0.0;
        const double w = 1.0 - u * u;
        return amplitude * w * w * w;
    }
    double slope(double x) const {
        const double u = (x - center) / halfwidth;
        if (std::abs(u) >= 1.0) return 0.0;
        const double w = 1.0 - u * u;
        return -6.0 * amplitude * u * w * w / halfwidth;
    }
};

/// Epsilon-tubular neighborhood of a compact band of the embedded surface:
/// points p + tau n(p), |tau| <= epsilon, with n the unit normal of
/// profile-plane components (-h', g'). Construction rejects thicknesses at
/// which the tube self-intersects (a factor 1 - tau kappa turning
/// non-positive on the band).
class TubeBand {
public:
    TubeBand(GrushinModel model, double x_lo, double x_hi, double epsilon, int mode)
        : profile_(model), x_lo_(x_lo), x_hi_(x_hi), epsilon_(epsilon), mode_(mode) {
        if (!(x_lo < x_hi)) throw DomainError("empty tube band");
        if (!(epsilon > 0.0)) throw DomainError("tube half-thickness must be positive");
        if (!profile_.validity().strictly_inside(x_lo) ||
            !profile_.validity().strictly_inside(x_hi))
            throw DomainError("tube band must lie strictly inside the validity interval");
        for (int i = 0; i <= 64; ++i) {
            const double x = x_lo + (x_hi - x_lo) * i / 64.0;
            const ProfileDerivatives p = profile_derivatives(model, x);
            for (double tau : {-epsilon, epsilon}) {
                if (1.0 - tau * p.kappa_meridian <= 0.0 || 1.0 - tau * p.kappa_parallel <= 0.0)
                    throw DomainError("tube self-intersects at this thickness");
            }
        }
    }

    const GrushinModel& model() const noexcept { return profile_.model(); }
    const RevolutionProfile& profile() const noexcept { return profile_; }
    double x_lo() const noexcept { return x_lo_; }
    double x_hi() const noexcept { return x_hi_; }
    double epsilon() const noexcept { return epsilon_; }
    int mode() const noexcept { return mode_; }

private:
    RevolutionProfile profile_;
    double x_lo_, x_hi_, epsilon_;
    int mode_;
};

struct TubeDensity {
    double exact;      // 1 - 2 H tau + K tau^2
    double numerical;  // sqrt(det g_tau / det g_0) of the offset surface
};

/// Volume density of the tube at (x, tau), both in closed form and from
/// finite differences of the offset profile (g - tau h', h + tau g').
inline TubeDensity tube_density(const TubeBand& band, double x, double tau) {
    if (!(x >= band.x_lo() && x <= band.x_hi() && std::abs(tau) <= band.epsilon()))
        throw DomainError("point outside the tube band");
    const GrushinModel& m = band.model();
    const ProfileDerivatives p = profile_derivatives(m, x);
    const double exact = (1.0 - tau * p.kappa_meridian) * (1.0 - tau * p.kappa_parallel);
    if (exact <= 0.0) throw DomainError("tube self-intersects at this thickness");

    const RevolutionProfile& prof = band.profile();
    const double dx = 1e-6 * std::max(std::abs(x), 1.0);
    auto offset_radius = [&](double s, double t) {
        return prof.radius(s) - t * prof.height_slope(s);
    };
    auto dslope = [&](double s) {  // g'(s)
        const ProfileDerivatives q = profile_derivatives(m, s);
        return q.dradius;
    };
    // d/dx of the offset profile components by central differences; the
    // height difference is taken as one short integral of h' to keep the
    // quotient at quadrature accuracy.
    auto e_component = [&](double t) {
        const double dr = (offset_radius(x + dx, t) - offset_radius(x - dx, t)) / (2.0 * dx);
        const double dz = (prof.height_increment(x - dx, x + dx) +
                           t * (dslope(x + dx) - dslope(x - dx))) /
                          (2.0 * dx);
        return dr * dr + dz * dz;
    };
    const double e_tau = e_component(tau);
    const double e_zero = e_component(0.0);
    const double numerical = std::sqrt(e_tau / e_zero) * offset_radius(x, tau) / prof.radius(x);
    return {exact, numerical};
}

namespace detail {

struct TubePointData {
    double km, kp, dkm, dkp;
    double weight_metric;  // x^{-alpha}
    double mode_factor;    // x^{2 alpha}
};

inline TubePointData tube_point(const GrushinModel& m, double x) {
    const ProfileDerivatives p = profile_derivatives(m, x);
    const double a = m.metric_exponent();
    return {p.kappa_meridian, p.kappa_parallel, p.dkappa_meridian, p.dkappa_parallel,
            std::pow(x, -a), std::pow(x, 2.0 * a)};
}

}  // namespace detail

/// Rayleigh quotient of the Dirichlet Laplacian of the tube on the trial
/// state phi = cos(pi tau / 2 eps) psi(x) e^{iky} h^{-1/2}:
///   Q_eps = - int (|d_tau phi|^2 + |grad_{S(tau)} phi|^2) dmu / int |phi|^2 dmu
/// with dmu = h(x,tau) dtau dA. All tau-dependence of the offset metric is
/// closed-form ((1 - tau k_m)^2, g^2 (1 - tau k_p)^2), so the integrand is
/// smooth and a tensor Gauss-Legendre rule converges fast.
inline double tube_rayleigh_quotient(const TubeBand& band, const TestFunction& psi,
                                     int n_quad = 64) {
    const GrushinModel& m = band.model();
    const double eps = band.epsilon();
    const double k = band.mode();
    const QuadratureRule rule = gauss_legendre(n_quad);
    const double half_pi_eps = 0.5 * std::numbers::pi / eps;

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double x = 0.5 * (band.x_lo() + band.x_hi()) +
                         0.5 * (band.x_hi() - band.x_lo()) * rule.nodes[i];
        const double wx = 0.5 * (band.x_hi() - band.x_lo()) * rule.weights[i];
        const auto pd = detail::tube_point(m, x);
        const double psival = psi.value(x), psislope = psi.slope(x);
        if (psival == 0.0 && psislope == 0.0) continue;
        for (int j = 0; j < n_quad; ++j) {
            const double tau = eps * rule.nodes[j];
            const double wt = eps * rule.weights[j];
            const double fm = 1.0 - tau * pd.km;
            const double fp = 1.0 - tau * pd.kp;
            const double h = fm * fp;
            const double h_tau = -pd.km * fp - pd.kp * fm;
            const double h_x = -tau * (pd.dkm * fp + pd.dkp * fm);
            const double c = std::cos(half_pi_eps * tau);
            const double cp = -half_pi_eps * std::sin(half_pi_eps * tau);
            const double inv_sqrt_h = 1.0 / std::sqrt(h);

            const double dtau_phi = psival * inv_sqrt_h * (cp - 0.5 * c * h_tau / h);
            const double dx_phi = c * inv_sqrt_h * (psislope - 0.5 * psival * h_x / h);
            const double phi2 = c * c * psival * psival / h;
            const double grad2 = dtau_phi * dtau_phi + dx_phi * dx_phi / (fm * fm) +
                                 k * k * pd.mode_factor * phi2 / (fp * fp);
            num += wx * wt * grad2 * h * pd.weight_metric;
            den += wx * wt * phi2 * h * pd.weight_metric;
        }
    }
    return -num / den;
}

/// Surface Rayleigh quotient of the extrinsic Laplacian Delta - K + H^2 on
/// the mode-k state psi(x) e^{iky}:
///   ( -int (psi'^2 + k^2 x^{2a} psi^2) dA + int (-K + H^2) psi^2 dA ) / int psi^2 dA.
inline double extrinsic_quotient(const TubeBand& band, const TestFunction& psi,
                                 int n_quad = 64) {
    const GrushinModel& m = band.model();
    const double k = band.mode();
    const QuadratureRule rule = gauss_legendre(n_quad);
    double dirichlet = 0.0, potential = 0.0, norm2 = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double x = 0.5 * (band.x_lo() + band.x_hi()) +
                         0.5 * (band.x_hi() - band.x_lo()) * rule.nodes[i];
        const double w = 0.5 * (band.x_hi() - band.x_lo()) * rule.weights[i];
        const double dens = area_density(m, x);
        const double psival = psi.value(x), psislope = psi.slope(x);
        const double mode_factor = std::pow(x, 2.0 * m.metric_exponent());
        dirichlet += w * (psislope * psislope + k * k * mode_factor * psival * psival) * dens;
        potential += w * effective_potential(m, x) * psival * psival * dens;
        norm2 += w * psival * psival * dens;
    }
    return (-dirichlet + potential) / norm2;
}

struct ConvergenceRow {
    double epsilon;
    double q_shifted;  // Q_eps + (pi/2eps)^2
    double target;     // extrinsic quotient
    double error;
    double ratio;      // error / previous error (NaN on the first row)
};

/// Shifted tube quotients against the extrinsic quotient over a decreasing
/// epsilon list; the error column must decay roughly linearly in epsilon.
inline std::vector<ConvergenceRow> convergence_study(const GrushinModel& model, double x_lo,
                                                     double x_hi, int mode,
                                                     const TestFunction& psi,
                                                     const std::vector<double>& eps_list,
                                                     int n_quad = 64) {
    if (eps_list.empty()) throw DomainError("empty epsilon list");
    std::vector<ConvergenceRow> rows;
    rows.reserve(eps_list.size());
    double prev_err = std::numeric_limits<double>::quiet_NaN();
    for (double eps : eps_list) {
        TubeBand band(model, x_lo, x_hi, eps, mode);
        const double q = tube_rayleigh_quotient(band, psi, n_quad);
        const double shift = std::pow(0.5 * std::numbers::pi / eps, 2);
        const double target = extrinsic_quotient(band, psi, n_quad);
        const double err = std::abs(q + shift - target);
        rows.push_back({eps, q + shift, target, err, err / prev_err});
        prev_err = err;
    }
    return rows;
}

}  // namespace grushin
