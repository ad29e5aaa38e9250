#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"
#include "grushin/ode.hpp"

namespace grushin {

enum class QuantKind { Intrinsic, Extrinsic, WindedExtrinsic };

/// Choice of Laplacian: the intrinsic family Delta - c K (c >= 0) or the
/// extrinsic operator Delta - K + H^2 of a revolution immersion.
struct Quantization {
    QuantKind kind;
    double c = 0.0;  // curvature coupling of the intrinsic family

    static Quantization intrinsic(double c) {
        if (c < 0.0) throw DomainError("intrinsic coupling c must be >= 0");
        return {QuantKind::Intrinsic, c};
    }
    static Quantization extrinsic() { return {QuantKind::Extrinsic, 0.0}; }

    std::string describe() const {
        switch (kind) {
            case QuantKind::Intrinsic: return "intrinsic(c=" + std::to_string(c) + ")";
            case QuantKind::Extrinsic: return "extrinsic";
            case QuantKind::WindedExtrinsic: return "winded-extrinsic";
        }
        return "?";
    }
};

enum class EndpointSide { Lower, Upper };
enum class EndpointNature { RegularFinite, SingularFinite, Infinite };

/// Fourier-mode fiber of the chosen Laplacian in Schrodinger form
/// -d^2/dx^2 + V_k on an open interval, after the unitary transform
/// f -> x^{-alpha/2} f that removes the first-order term:
///   intrinsic:  V_k = k^2 x^{2a} + [(a/2)(1+a/2) - c a(1+a)] / x^2
///   extrinsic:  V_k = k^2 x^{2a} + (a/2)(1+a/2) / x^2 - V_eff(x)
/// with a the metric exponent (1 for winded bells) and V_eff = -K + H^2.
struct FiberOperator {
    GrushinModel model;
    Quantization quant;
    int k;
    double lower, upper;  // open interval; upper may be +infinity
    EndpointNature lower_nature, upper_nature;

    double potential(double x) const {
        if (!(x > lower && x < upper)) throw DomainError("x outside the fiber interval");
        const double a = model.metric_exponent();
        const double mode = static_cast<double>(k) * k * std::pow(x, 2.0 * a);
        const double transform_term = 0.5 * a * (1.0 + 0.5 * a) / (x * x);
        if (quant.kind == QuantKind::Intrinsic)
            return mode + transform_term - quant.c * a * (1.0 + a) / (x * x);
        return mode + transform_term - effective_potential(model, x);
    }

    double endpoint_position(EndpointSide side) const {
        return side == EndpointSide::Lower ? lower : upper;
    }
    EndpointNature endpoint_nature(EndpointSide side) const {
        return side == EndpointSide::Lower ? lower_nature : upper_nature;
    }
};

inline FiberOperator make_fiber(const GrushinModel& model, Quantization quant, int k) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    FiberOperator f{model, quant, k, 0.0, inf, EndpointNature::SingularFinite,
                    EndpointNature::Infinite};
    if (model.is_winded()) {
        if (quant.kind == QuantKind::Extrinsic || quant.kind == QuantKind::WindedExtrinsic) {
            f.quant.kind = QuantKind::WindedExtrinsic;
            f.lower = 1.0 / model.winding();
        }
        // intrinsic quantization of a winded model sees only the alpha = 1 metric
        return f;
    }
    if (quant.kind == QuantKind::WindedExtrinsic)
        throw DomainError("winded-extrinsic quantization needs a winded model");
    const double a = model.alpha_value();
    if (quant.kind == QuantKind::Intrinsic) {
        if (a == 0.0) f.lower_nature = EndpointNature::RegularFinite;
        return f;
    }
    // extrinsic
    if (a == 0.0) {
        f.lower_nature = EndpointNature::RegularFinite;  // V bounded at 0
        return f;
    }
    if (a == -1.0) return f;  // (0, inf), inverse-square endpoint at 0
    const double s0 = singular_radius(model);
    if (a > -1.0) {
        f.lower = s0;
        return f;
    }
    // alpha < -1: the immersion lives on (0, s0); both ends are singular
    f.upper = s0;
    f.upper_nature = EndpointNature::SingularFinite;
    return f;
}

enum class WeylClass { LimitPoint, LimitCircle };

enum class ClassificationCriterion {
    InverseSquareThreshold,    // gamma/(x-a)^2 against the 3/4 threshold
    SimplePole,                // c/(x-a) only: dominated by (3/4-eps)/(x-a)^2
    BoundedPotential,          // bounded near a finite endpoint
    SteepRepulsion,            // +c (x-a)^{-p}, p > 2
    SteepAttraction,           // -c (x-a)^{-p}, p > 2
    ConfiningGrowth,           // V -> +inf, eventually nondecreasing
    BoundedBelowAtInfinity,    // V >= -M near infinity
    QuadraticFallAtInfinity,   // V ~ -c x^p, p <= 2 (still limit point)
    SuperQuadraticFall         // V ~ -c x^p, p > 2 (limit circle)
};

inline std::string criterion_name(ClassificationCriterion c) {
    switch (c) {
        case ClassificationCriterion::InverseSquareThreshold:
            return "inverse-square coefficient vs 3/4 threshold";
        case ClassificationCriterion::SimplePole: return "simple pole at the endpoint";
        case ClassificationCriterion::BoundedPotential:
            return "bounded potential at a finite endpoint";
        case ClassificationCriterion::SteepRepulsion:
            return "repulsive divergence steeper than inverse-square";
        case ClassificationCriterion::SteepAttraction:
            return "attractive divergence steeper than inverse-square";
        case ClassificationCriterion::ConfiningGrowth: return "confining growth at infinity";
        case ClassificationCriterion::BoundedBelowAtInfinity:
            return "potential bounded below at infinity";
        case ClassificationCriterion::QuadraticFallAtInfinity:
            return "fall no faster than -c x^2 at infinity";
        case ClassificationCriterion::SuperQuadraticFall:
            return "super-quadratic fall at infinity";
    }
    return "?";
}

struct EndpointClass {
    WeylClass cls;
    bool borderline;  // the inverse-square coefficient sits exactly at 3/4
    ClassificationCriterion criterion;
    std::optional<double> gamma;             // inverse-square coefficient, when that fired
    std::optional<double> pole_coefficient;  // simple-pole coefficient in V_k
};

namespace detail {

// Structured leading behavior of V_k at one endpoint.
struct EndpointAsymptotics {
    enum class Kind { Bounded, InverseSquare, SimplePole, SteepPower, ConfiningGrowth,
                      BoundedBelow, NegativePowerFall };
    Kind kind;
    double coefficient = 0.0;  // gamma, pole coefficient, or power-term coefficient
    double power = 0.0;        // |x-a|^{-power} (finite) or x^{power} (infinity)
};

inline EndpointAsymptotics fiber_asymptotics(const FiberOperator& f, EndpointSide side) {
    using K = EndpointAsymptotics::Kind;
    const double a = f.model.metric_exponent();
    const int k = f.k;

    if (f.endpoint_nature(side) == EndpointNature::Infinite) {
        if (f.quant.kind == QuantKind::Intrinsic)
            return (k != 0 && a > 0.0) ? EndpointAsymptotics{K::ConfiningGrowth}
                                       : EndpointAsymptotics{K::BoundedBelow};
        if (f.quant.kind == QuantKind::WindedExtrinsic) {
            const double n = f.model.winding();
            const double coeff = static_cast<double>(k) * k - std::pow(n, 4) / 4.0;
            if (coeff > 0.0) return {K::ConfiningGrowth};
            if (coeff < 0.0) return {K::NegativePowerFall, coeff, 2.0};
            return {K::BoundedBelow};
        }
        // extrinsic Alpha family on (s0, inf): leading term (k^2 - 1/4) x^{2 alpha}
        const double alpha = f.model.alpha_value();
        if (alpha <= 0.0) return {K::BoundedBelow};
        const double coeff = static_cast<double>(k) * k - 0.25;
        if (coeff > 0.0) return {K::ConfiningGrowth};
        return {K::NegativePowerFall, coeff, 2.0 * alpha};
    }

    if (f.endpoint_nature(side) == EndpointNature::RegularFinite) return {K::Bounded};

    if (f.quant.kind == QuantKind::WindedExtrinsic) {
        // endpoint 1/n: V_k = -(n/4)/(x - 1/n) + O(1)
        const double n = f.model.winding();
        return {K::SimplePole, -n / 4.0, 1.0};
    }

    if (f.quant.kind == QuantKind::Intrinsic) {
        // endpoint 0 of (0, inf)
        const double alpha = f.model.metric_exponent();
        const double gamma0 = 0.5 * alpha * (1.0 + 0.5 * alpha) -
                              f.quant.c * alpha * (1.0 + alpha);
        if (alpha > -1.0) return {K::InverseSquare, gamma0, 2.0};
        if (alpha == -1.0)
            return {K::InverseSquare, gamma0 + static_cast<double>(k) * k, 2.0};
        // alpha < -1: the mode term k^2 x^{2 alpha} dominates 1/x^2
        if (k != 0) return {K::SteepPower, static_cast<double>(k) * k, -2.0 * alpha};
        return {K::InverseSquare, gamma0, 2.0};
    }

    // extrinsic Alpha family
    const double alpha = f.model.alpha_value();
    const double pos = f.endpoint_position(side);
    if (alpha == -1.0) {
        // V = (k^2 - 1/4)/x^2 at the origin
        return {K::InverseSquare, static_cast<double>(k) * k - 0.25, 2.0};
    }
    const double s0 = singular_radius(f.model);
    if (pos == s0) {
        // failure radius: V_k = -c_pole/(x - s0) + O(1), c_pole = (1+alpha)/(8 s0)
        return {K::SimplePole, -(1.0 + alpha) / (8.0 * s0), 1.0};
    }
    // alpha < -1 at the origin: V_k = (k^2 - 1/4) x^{2 alpha} + O(1/x^2)
    const double coeff = static_cast<double>(k) * k - 0.25;
    return {K::SteepPower, coeff, -2.0 * alpha};
}

}  // namespace detail

/// Analytic Weyl classification of one endpoint of a fiber operator.
///
/// Finite endpoint a with V = gamma/(x-a)^2 + o((x-a)^{-2}): limit point iff
/// gamma >= 3/4 (flagged borderline at exactly 3/4), limit circle otherwise.
/// A mere simple pole or a bounded potential is limit circle. Divergence
/// steeper than inverse-square is limit point when repulsive and limit
/// circle when attractive. At infinity: confining growth or any -c x^2
/// lower bound gives limit point; fall faster than -c x^2 gives limit circle.
inline EndpointClass classify_endpoint(const FiberOperator& f, EndpointSide side) {
    using K = detail::EndpointAsymptotics::Kind;
    const auto asym = detail::fiber_asymptotics(f, side);
    switch (asym.kind) {
        case K::Bounded:
            return {WeylClass::LimitCircle, false, ClassificationCriterion::BoundedPotential,
                    std::nullopt, std::nullopt};
        case K::SimplePole:
            return {WeylClass::LimitCircle, false, ClassificationCriterion::SimplePole,
                    std::nullopt, asym.coefficient};
        case K::InverseSquare: {
            const double g = asym.coefficient;
            const bool borderline = (g == 0.75);
            return {g >= 0.75 ? WeylClass::LimitPoint : WeylClass::LimitCircle, borderline,
                    ClassificationCriterion::InverseSquareThreshold, g, std::nullopt};
        }
        case K::SteepPower:
            if (asym.coefficient > 0.0)
                return {WeylClass::LimitPoint, false, ClassificationCriterion::SteepRepulsion,
                        std::nullopt, std::nullopt};
            return {WeylClass::LimitCircle, false, ClassificationCriterion::SteepAttraction,
                    std::nullopt, std::nullopt};
        case K::ConfiningGrowth:
            return {WeylClass::LimitPoint, false, ClassificationCriterion::ConfiningGrowth,
                    std::nullopt, std::nullopt};
        case K::BoundedBelow:
            return {WeylClass::LimitPoint, false,
                    ClassificationCriterion::BoundedBelowAtInfinity, std::nullopt, std::nullopt};
        case K::NegativePowerFall:
            if (asym.power <= 2.0)
                return {WeylClass::LimitPoint, false,
                        ClassificationCriterion::QuadraticFallAtInfinity, std::nullopt,
                        std::nullopt};
            return {WeylClass::LimitCircle, false, ClassificationCriterion::SuperQuadraticFall,
                    std::nullopt, std::nullopt};
    }
    throw NumericalError("unclassified endpoint asymptotics");
}

// ---------------------------------------------------------------------------
// Numerical Weyl alternative
// ---------------------------------------------------------------------------

struct WeylEvidenceRow {
    double cutoff;          // distance to a finite endpoint, or position toward infinity
    double mass_first;      // int |u_1|^2 between the cutoff and the anchor
    double mass_second;
};

enum class WeylVerdict { LimitCircleEvidence, LimitPointEvidence, Inconclusive };

struct WeylEvidence {
    double anchor;
    std::vector<WeylEvidenceRow> rows;  // may be shorter than requested on blow-up
    bool blew_up;                        // a solution overran the norm cap
    WeylVerdict verdict;
};

namespace detail {

inline double default_weyl_anchor(const FiberOperator& f) {
    if (f.upper_nature == EndpointNature::Infinite) return f.lower + 1.0;
    return 0.5 * (f.lower + f.upper);
}

inline WeylVerdict weyl_verdict(const std::vector<WeylEvidenceRow>& rows, bool blew_up) {
    if (blew_up) return WeylVerdict::LimitPointEvidence;
    if (rows.size() < 3) return WeylVerdict::Inconclusive;
    const std::size_t n = rows.size();
    bool all_converged = true, any_diverging = false;
    for (int j = 0; j < 2; ++j) {
        auto mass = [&](std::size_t i) {
            return j == 0 ? rows[i].mass_first : rows[i].mass_second;
        };
        const double d_last = mass(n - 1) - mass(n - 2);
        const double d_prev = mass(n - 2) - mass(n - 3);
        // geometric decay of the increments is Cauchy evidence on a geometric
        // cutoff progression; the absolute cap only guards against a tail
        // that still dominates the recorded mass
        const bool converged = d_last <= 0.6 * d_prev + 1e-12 &&
                               d_last <= 0.25 * mass(n - 1) + 1e-12;
        if (!converged) all_converged = false;
        if (d_last >= 0.8 * d_prev && d_last > 1e-9 * std::max(1.0, mass(n - 1)))
            any_diverging = true;
    }
    if (all_converged) return WeylVerdict::LimitCircleEvidence;
    if (any_diverging) return WeylVerdict::LimitPointEvidence;
    return WeylVerdict::Inconclusive;
}

}  // namespace detail

/// Weyl's alternative, numerically: solve (-d^2/dx^2 + V_k - i) u = 0 from a
/// regular interior anchor with initial data (1,0) and (0,1), integrating
/// toward the chosen endpoint, and record M_j = int |u_j|^2 between each
/// cutoff and the anchor. Both masses settling down is limit-circle
/// evidence; either mass escaping (or outright numeric blow-up) is
/// limit-point evidence.
///
/// `cutoffs` are distances to a finite endpoint (decreasing) or positions
/// marching toward an infinite one (increasing).
inline WeylEvidence weyl_numerical_check(const FiberOperator& f, EndpointSide side,
                                         std::vector<double> cutoffs,
                                         std::optional<double> anchor_opt = std::nullopt) {
    const double anchor = anchor_opt.value_or(detail::default_weyl_anchor(f));
    if (!(anchor > f.lower && anchor < f.upper))
        throw DomainError("Weyl anchor outside the fiber interval");
    if (cutoffs.empty()) throw DomainError("need at least one cutoff");

    const bool to_infinity = f.endpoint_nature(side) == EndpointNature::Infinite;
    const double endpoint = f.endpoint_position(side);

    std::vector<double> positions;
    positions.reserve(cutoffs.size());
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        double pos;
        if (to_infinity) {
            pos = cutoffs[i];
            if (i > 0 && pos <= positions.back())
                throw DomainError("cutoff positions toward infinity must increase");
            if (pos <= anchor) throw DomainError("cutoff not beyond the anchor");
        } else {
            if (!(cutoffs[i] > 0.0)) throw DomainError("cutoff distances must be positive");
            if (i > 0 && cutoffs[i] >= cutoffs[i - 1])
                throw DomainError("cutoff distances must decrease");
            pos = (side == EndpointSide::Lower) ? endpoint + cutoffs[i]
                                                : endpoint - cutoffs[i];
            const bool between = (side == EndpointSide::Lower) ? (pos < anchor && pos > endpoint)
                                                               : (pos > anchor && pos < endpoint);
            if (!between) throw DomainError("cutoff not between the anchor and the endpoint");
        }
        positions.push_back(pos);
    }

    WeylEvidence ev{anchor, {}, false, WeylVerdict::Inconclusive};
    ev.rows.resize(positions.size());
    for (auto& row : ev.rows) row = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < positions.size(); ++i)
        ev.rows[i].cutoff = cutoffs[i];

    const std::complex<double> lambda(0.0, 1.0);
    auto rhs = [&](double x, const ComplexState<3>& s) -> ComplexState<3> {
        const std::complex<double> u = s[0], v = s[1];
        return {v, (f.potential(x) - lambda) * u, std::norm(u)};
    };

    std::size_t reached_rows = ev.rows.size();
    for (int j = 0; j < 2; ++j) {
        ComplexState<3> state{};
        state[j] = 1.0;
        double from = anchor;
        bool blew = false;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const auto out = integrate_ode(rhs, state, from, positions[i]);
            state = out.state;
            from = out.reached;
            if (out.blew_up) {
                blew = true;
                reached_rows = std::min(reached_rows, i);
                break;
            }
            const double mass = std::abs(state[2].real());
            if (j == 0)
                ev.rows[i].mass_first = mass;
            else
                ev.rows[i].mass_second = mass;
        }
        if (blew) ev.blew_up = true;
    }
    if (ev.blew_up) ev.rows.resize(reached_rows);  // partial table with diagnostic
    ev.verdict = detail::weyl_verdict(ev.rows, ev.blew_up);
    return ev;
}

// ---------------------------------------------------------------------------
// Deficiency report
// ---------------------------------------------------------------------------

struct FiberVerdict {
    int k;
    EndpointClass lower;
    EndpointClass upper;
    int deficiency;  // per-fiber contribution: 0, 1, or 2 (indices are (n, n))
};

struct DeficiencyReport {
    std::vector<FiberVerdict> fibers;
    bool essentially_self_adjoint;  // all fibers contribute (0,0)
    int total_deficiency;           // over the requested mode range
};

/// Endpoint classes and deficiency contributions for every Fourier mode in
/// [k_min, k_max]: (0,0) when both ends are limit point, (1,1) when exactly
/// one end is limit circle, (2,2) when both are.
inline DeficiencyReport deficiency_report(const GrushinModel& model, Quantization quant,
                                          int k_min, int k_max) {
    if (k_min > k_max) throw DomainError("empty mode range");
    DeficiencyReport rep{{}, true, 0};
    for (int k = k_min; k <= k_max; ++k) {
        const FiberOperator f = make_fiber(model, quant, k);
        FiberVerdict v{k, classify_endpoint(f, EndpointSide::Lower),
                       classify_endpoint(f, EndpointSide::Upper), 0};
        v.deficiency = (v.lower.cls == WeylClass::LimitCircle ? 1 : 0) +
                       (v.upper.cls == WeylClass::LimitCircle ? 1 : 0);
        rep.total_deficiency += v.deficiency;
        if (v.deficiency != 0) rep.essentially_self_adjoint = false;
        rep.fibers.push_back(v);
    }
    return rep;
}

}  // namespace grushin
