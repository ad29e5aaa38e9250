#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "grushin/errors.hpp"

namespace grushin {

/// Metric family on the half-cylinder x > 0.
///
/// Alpha(alpha) is the generalized Riemannian metric diag(1, x^{-2 alpha}).
/// Winded(n) carries the alpha = 1 metric but pairs it with the immersion
/// that wraps n^2 times around the axis of revolution, so intrinsic data
/// (Gaussian curvature, area density) coincide with Alpha(1) while the
/// embedded data (mean curvature, effective potential) differ.
class GrushinModel {
public:
    static GrushinModel alpha(double exponent) {
        if (!std::isfinite(exponent)) throw DomainError("alpha must be finite");
        return GrushinModel(exponent, 0);
    }
    static GrushinModel winded(int n) {
        if (n < 1) throw DomainError("winding parameter must be a positive integer");
        return GrushinModel(1.0, n);
    }

    bool is_winded() const noexcept { return winding_ > 0; }
    int winding() const noexcept { return winding_; }

    /// Exponent entering the metric; equal to 1 for winded bells.
    double metric_exponent() const noexcept { return alpha_; }

    /// Exponent of the Alpha family; invalid for winded models.
    double alpha_value() const {
        if (is_winded()) throw DomainError("winded model has no free alpha exponent");
        return alpha_;
    }

    std::string describe() const {
        if (is_winded()) return "winded(" + std::to_string(winding_) + ")";
        return "alpha(" + std::to_string(alpha_) + ")";
    }

private:
    GrushinModel(double a, int n) : alpha_(a), winding_(n) {}

    double alpha_;
    int winding_;  // 0 marks the Alpha variant
};

/// Radius at which the surface-of-revolution immersion degenerates:
/// |alpha|^{1/(1+alpha)} for the Alpha family, 1/n for winded bells.
/// Alpha(0) returns 0 (the cylinder embeds globally); alpha = -1 has no
/// failure radius at all and is rejected.
inline double singular_radius(const GrushinModel& m) {
    if (m.is_winded()) return 1.0 / m.winding();
    const double a = m.alpha_value();
    if (a == -1.0)
        throw DomainError("flat-plane case: embedding global on x > 0, no failure radius");
    if (a == 0.0) return 0.0;
    return std::pow(std::abs(a), 1.0 / (1.0 + a));
}

/// Interval of x on which the isometric immersion exists.
struct ValidityInterval {
    double lo, hi;
    bool lo_closed, hi_closed;

    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }
    bool strictly_inside(double x) const { return x > lo && x < hi; }
};

inline ValidityInterval embedding_validity(const GrushinModel& m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (m.is_winded()) return {1.0 / m.winding(), inf, true, false};
    const double a = m.alpha_value();
    if (a == 0.0) return {-inf, inf, false, false};
    if (a == -1.0) return {0.0, inf, false, false};
    const double s0 = singular_radius(m);
    if (a > -1.0) return {s0, inf, true, false};
    return {0.0, s0, false, true};
}

namespace detail {

// Mean curvature and the effective potential only exist strictly inside the
// validity interval; the flat cases alpha in {0, -1} just need x > 0.
inline void require_embedding_interior(const GrushinModel& m, double x) {
    if (!(x > 0.0)) throw DomainError("embedding undefined here: x must be positive");
    if (m.is_winded()) {
        if (!(x > 1.0 / m.winding())) throw DomainError("embedding undefined here");
        return;
    }
    const double a = m.alpha_value();
    if (a == 0.0 || a == -1.0) return;
    const double s0 = singular_radius(m);
    const bool inside = (a > -1.0) ? (x > s0) : (x < s0);
    if (!inside) throw DomainError("embedding undefined here");
}

}  // namespace detail

/// K = -alpha(1+alpha)/x^2 (winded bells share the alpha = 1 value -2/x^2).
/// Embedding-independent, so defined for every x > 0.
inline double gaussian_curvature(const GrushinModel& m, double x) {
    if (!(x > 0.0)) throw DomainError("gaussian curvature requires x > 0");
    if (m.is_winded()) return -2.0 / (x * x);
    const double a = m.alpha_value();
    return -a * (1.0 + a) / (x * x);
}

/// Mean curvature of the revolution immersion. The sign is tied to the
/// normal with profile-plane components (-h'(x), g'(x)); only H^2 enters
/// downstream quantities.
inline double mean_curvature(const GrushinModel& m, double x) {
    detail::require_embedding_interior(m, x);
    if (m.is_winded()) {
        const double q = std::pow(m.winding() * x, 4);
        return (q - 3.0) / (2.0 * x * std::sqrt(q - 1.0));
    }
    const double a = m.alpha_value();
    if (a == -1.0) return 0.0;  // limit of the generic formula
    const double X = std::pow(x, 2.0 * (1.0 + a));
    return (X - a * (1.0 + 2.0 * a)) / (2.0 * x * std::sqrt(X - a * a));
}

/// Effective potential -K + H^2 of the thin-tube limit.
inline double effective_potential(const GrushinModel& m, double x) {
    const double h = mean_curvature(m, x);
    return -gaussian_curvature(m, x) + h * h;
}

struct PotentialAsymptote {
    double pole_location;     // s0
    double pole_coefficient;  // c with V_eff = c/(x - s0) + O(1) near s0
};

/// Leading pole of the effective potential at the embedding-failure radius:
/// c = (1+alpha)/(8 s0) for the Alpha family, c = n/4 for winded bells.
/// For alpha < -1 the coefficient is negative and the pole is approached
/// from the left, so V_eff still blows up to +infinity inside the validity
/// interval.
inline PotentialAsymptote potential_asymptote(const GrushinModel& m) {
    if (m.is_winded()) {
        const double n = m.winding();
        return {1.0 / n, n / 4.0};
    }
    const double a = m.alpha_value();
    if (a == 0.0 || a == -1.0)
        throw DomainError("no pole: the effective potential is constant for this exponent");
    const double s0 = singular_radius(m);
    return {s0, (1.0 + a) / (8.0 * s0)};
}

/// Riemannian area density x^{-alpha} (the dA = x^{-alpha} dx dy weight).
inline double area_density(const GrushinModel& m, double x) {
    if (!(x > 0.0)) throw DomainError("area density requires x > 0");
    if (m.is_winded()) return 1.0 / x;
    return std::pow(x, -m.alpha_value());
}

struct CurvatureSample {
    double x;
    double gauss;      // K
    double mean;       // H
    double v_eff;      // -K + H^2, by construction
};

inline CurvatureSample curvature_sample(const GrushinModel& m, double x) {
    const double k = gaussian_curvature(m, x);
    const double h = mean_curvature(m, x);
    return {x, k, h, -k + h * h};
}

/// Pointwise data of the unit-speed generating curve (g(x), h(x)) of the
/// revolution immersion: radius g and derivatives, slope h' = sqrt(1-g'^2),
/// and the meridian/parallel principal curvatures with their x-derivatives.
/// Valid strictly inside the validity interval (h' vanishes at s0).
struct ProfileDerivatives {
    double radius;           // g
    double dradius;          // g'
    double d2radius;         // g''
    double d3radius;         // g'''
    double dheight;          // h'
    double kappa_meridian;   // g'h'' - h'g''  (= -g''/h')
    double kappa_parallel;   // h'/g
    double dkappa_meridian;
    double dkappa_parallel;
};

inline ProfileDerivatives profile_derivatives(const GrushinModel& m, double x) {
    detail::require_embedding_interior(m, x);
    ProfileDerivatives p{};
    if (!m.is_winded() && m.alpha_value() == -1.0) {
        // flat punctured plane: profile (x, 0)
        p.radius = x;
        p.dradius = 1.0;
        p.dheight = 0.0;
        return p;
    }
    if (m.is_winded()) {
        const double n2 = static_cast<double>(m.winding()) * m.winding();
        p.radius = 1.0 / (n2 * x);
        p.dradius = -1.0 / (n2 * x * x);
        p.d2radius = 2.0 / (n2 * x * x * x);
        p.d3radius = -6.0 / (n2 * x * x * x * x);
    } else {
        const double a = m.alpha_value();
        p.radius = std::pow(x, -a);
        p.dradius = -a * std::pow(x, -a - 1.0);
        p.d2radius = a * (a + 1.0) * std::pow(x, -a - 2.0);
        p.d3radius = -a * (a + 1.0) * (a + 2.0) * std::pow(x, -a - 3.0);
    }
    const double hp2 = 1.0 - p.dradius * p.dradius;
    p.dheight = std::sqrt(std::max(0.0, hp2));
    const double hp = p.dheight;
    p.kappa_meridian = -p.d2radius / hp;
    p.kappa_parallel = hp / p.radius;
    p.dkappa_meridian = -(p.d3radius * hp * hp + p.dradius * p.d2radius * p.d2radius) / (hp * hp * hp);
    p.dkappa_parallel = -p.dradius * (p.d2radius * p.radius + hp * hp) / (hp * p.radius * p.radius);
    return p;
}

}  // namespace grushin
