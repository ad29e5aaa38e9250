#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "grushin/errors.hpp"
#include "grushin/format.hpp"
#include "grushin/geometry.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

/// Generating curve (g(x), h(x)) of the isometric revolution immersion.
///
/// g is the radius in closed form; h(x) = h(x_ref) + int sqrt(1 - g'(s)^2) ds
/// is quadrature-backed (absolute error <= 1e-10). The square-root vanishing
/// of the integrand at the failure radius s0 is removed by the substitution
/// s = s0 +/- u^2, after which everything is smooth; heights are memoized on
/// a knot table in the u coordinate and queries re-integrate from the
/// nearest knot. The memo is mutex-guarded so concurrent readers see
/// consistent values.
class RevolutionProfile {
public:
    explicit RevolutionProfile(GrushinModel model)
        : model_(model), validity_(embedding_validity(model)) {
        if (!model_.is_winded()) {
            const double a = model_.alpha_value();
            if (a == 0.0 || a == -1.0) {
                closed_form_ = true;
                anchor_x_ = (a == 0.0) ? 0.0 : 1.0;
                anchor_h_ = 0.0;
                return;
            }
        }
        s0_ = singular_radius(model_);
        const bool lower_anchored = model_.is_winded() || model_.alpha_value() > -1.0;
        if (lower_anchored) {
            anchor_at_s0_ = true;
            anchor_x_ = s0_;
            anchor_h_ = s0_;
        } else {
            anchor_at_s0_ = false;
            anchor_x_ = 0.0;
            anchor_h_ = 0.0;
            u_total_ = std::sqrt(s0_);
        }
    }

    RevolutionProfile(const RevolutionProfile&) = delete;
    RevolutionProfile& operator=(const RevolutionProfile&) = delete;

    const GrushinModel& model() const noexcept { return model_; }
    const ValidityInterval& validity() const noexcept { return validity_; }
    double anchor_x() const noexcept { return anchor_x_; }
    double anchor_height() const noexcept { return anchor_h_; }

    /// Radius g(x) of the circle swept at coordinate x.
    double radius(double x) const {
        require_valid(x);
        if (model_.is_winded()) {
            const double n2 = static_cast<double>(model_.winding()) * model_.winding();
            return 1.0 / (n2 * x);
        }
        return std::pow(x, -model_.alpha_value());
    }

    /// Slope h'(x) = sqrt(1 - g'(x)^2) of the height component.
    double height_slope(double x) const {
        require_valid(x);
        return slope_unchecked(x);
    }

    /// Height h(x) by adaptive quadrature, absolute error <= 1e-10.
    double height(double x) const {
        require_valid(x);
        if (closed_form_) return (model_.alpha_value() == 0.0) ? x : 0.0;
        if (anchor_at_s0_) {
            const double u = std::sqrt(std::max(0.0, x - s0_));
            return anchor_h_ + cumulative(u);
        }
        const double u = std::sqrt(std::max(0.0, s0_ - x));
        return cumulative(u_total_) - cumulative(u);
    }

    /// h(x1) - h(x0) as a single short integral of h'. Both points must lie
    /// strictly inside the validity interval (the integrand is smooth there);
    /// accuracy is limited only by the 1e-13 tolerance, which matters for
    /// finite-difference consumers.
    double height_increment(double x0, double x1) const {
        if (!validity_.strictly_inside(x0) || !validity_.strictly_inside(x1))
            throw DomainError("embedding undefined here");
        if (closed_form_) return (model_.alpha_value() == 0.0) ? (x1 - x0) : 0.0;
        return integrate_adaptive([this](double s) { return slope_unchecked(s); },
                                  x0, x1, 1e-13).value;
    }

    /// Immersion point. Alpha: (g cos y, g sin y, h); winded bells sweep the
    /// image angle n^2 times faster: (g cos(n^2 y), g sin(n^2 y), h).
    std::array<double, 3> embed(double x, double y) const {
        const double r = radius(x);
        const double h = height(x);
        double angle = y;
        if (model_.is_winded()) {
            const double n2 = static_cast<double>(model_.winding()) * model_.winding();
            angle = n2 * y;
        }
        return {r * std::cos(angle), r * std::sin(angle), h};
    }

private:
    struct Knot {
        double value;
        double error;
    };

    void require_valid(double x) const {
        if (!validity_.contains(x)) throw DomainError("embedding undefined here");
    }

    double slope_unchecked(double s) const {
        double dg;
        if (model_.is_winded()) {
            const double n2 = static_cast<double>(model_.winding()) * model_.winding();
            dg = -1.0 / (n2 * s * s);
        } else {
            const double a = model_.alpha_value();
            dg = -a * std::pow(s, -a - 1.0);
        }
        return std::sqrt(std::max(0.0, 1.0 - dg * dg));
    }

    // integrand of the substituted height integral, smooth through u = 0
    double substituted_integrand(double u) const {
        const double s = anchor_at_s0_ ? s0_ + u * u : s0_ - u * u;
        return 2.0 * u * slope_unchecked(s);
    }

    // cumulative integral of the substituted integrand from 0 to u, memoized
    double cumulative(double u) const {
        if (u <= 0.0) return 0.0;
        std::lock_guard<std::mutex> lock(mutex_);
        auto hit = knots_.find(u);
        if (hit != knots_.end()) return hit->second.value;

        double base_u = 0.0;
        Knot base{0.0, 0.0};
        if (!knots_.empty()) {
            auto up = knots_.lower_bound(u);
            if (up == knots_.end()) {
                --up;
            } else if (up != knots_.begin()) {
                auto lo = std::prev(up);
                if (u - lo->first < up->first - u) up = lo;
            }
            if (std::abs(up->first - u) < u) {
                base_u = up->first;
                base = up->second;
            }
        }
        auto f = [this](double v) { return substituted_integrand(v); };
        IntegralEstimate seg = integrate_adaptive(f, base_u, u, 1e-12);
        Knot knot{base.value + seg.value, base.error + seg.error};
        if (knot.error > 5e-11) {
            // re-anchor on the origin before accumulated bounds hit the contract
            seg = integrate_adaptive(f, 0.0, u, 1e-12);
            knot = {seg.value, seg.error};
        }
        knots_.emplace(u, knot);
        return knot.value;
    }

    GrushinModel model_;
    ValidityInterval validity_;
    bool closed_form_ = false;   // alpha in {0, -1}
    bool anchor_at_s0_ = false;
    double s0_ = 0.0;
    double u_total_ = 0.0;       // sqrt(s0) for alpha < -1
    double anchor_x_ = 0.0;
    double anchor_h_ = 0.0;

    mutable std::mutex mutex_;
    mutable std::map<double, Knot> knots_;
};

/// Tensor-grid tessellation of a revolution band.
struct Mesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;           // 0-based vertex indices
    std::vector<std::array<double, 2>> param_grid;   // (x, y) per vertex
};

/// nx rings of ny vertices each, rings joined by two triangles per quad and
/// wrapped in y (the swept image closes). Winded models sweep a single
/// fundamental period y in [0, 2pi/n^2) unless full_winding requests the
/// whole circle (the image then wraps n^2 times).
inline Mesh generate_mesh(const RevolutionProfile& profile, double x_min, double x_max,
                          int nx, int ny, bool full_winding = false) {
    if (nx < 2 || ny < 2) throw DomainError("mesh needs at least 2 samples per direction");
    if (!(x_min < x_max)) throw DomainError("empty x range");
    if (!profile.validity().contains(x_min) || !profile.validity().contains(x_max))
        throw DomainError("mesh range outside the embedding validity interval");

    double period = 2.0 * std::numbers::pi;
    if (profile.model().is_winded() && !full_winding) {
        const double n2 = static_cast<double>(profile.model().winding()) * profile.model().winding();
        period /= n2;
    }

    Mesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nx) * ny);
    mesh.param_grid.reserve(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i) {
        const double x = x_min + (x_max - x_min) * i / (nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = period * j / ny;
            mesh.vertices.push_back(profile.embed(x, y));
            mesh.param_grid.push_back({x, y});
        }
    }
    for (int i = 0; i + 1 < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const int j2 = (j + 1) % ny;
            const int v00 = i * ny + j, v01 = i * ny + j2;
            const int v10 = (i + 1) * ny + j, v11 = (i + 1) * ny + j2;
            mesh.faces.push_back({v00, v10, v11});
            mesh.faces.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

/// One row of the induced-metric check at a grid point. Targets are
/// E = 1, F = 0, G = x^{-2 alpha} (the metric the immersion must induce).
struct IsometryRow {
    double x;
    double e_err, f_err, g_err;
    bool computed;  // false when the point sits within 10 steps of s0
};

/// First fundamental form of embed() by central finite differences.
inline std::vector<IsometryRow> verify_isometry(const RevolutionProfile& profile,
                                                std::span<const double> xs,
                                                double rel_step = 1e-5) {
    std::vector<IsometryRow> rows;
    rows.reserve(xs.size());
    const GrushinModel& m = profile.model();
    const double y0 = 0.4;  // arbitrary; the metric is y-independent
    double s0 = std::numeric_limits<double>::quiet_NaN();
    if (m.is_winded() || (m.alpha_value() != 0.0 && m.alpha_value() != -1.0))
        s0 = singular_radius(m);

    for (double x : xs) {
        IsometryRow row{x, 0.0, 0.0, 0.0, true};
        const double dx = rel_step * std::max(std::abs(x), 1.0);
        const double dy = rel_step;
        if (!profile.validity().strictly_inside(x) ||
            (std::isfinite(s0) && std::abs(x - s0) < 10.0 * dx)) {
            row.computed = false;
            rows.push_back(row);
            continue;
        }
        const auto px = [&](double u) { return profile.embed(u, y0); };
        const auto a0 = px(x - dx), a1 = px(x + dx);
        const auto b0 = profile.embed(x, y0 - dy), b1 = profile.embed(x, y0 + dy);
        std::array<double, 3> du{}, dv{};
        for (int c = 0; c < 3; ++c) {
            du[c] = (a1[c] - a0[c]) / (2.0 * dx);
            dv[c] = (b1[c] - b0[c]) / (2.0 * dy);
        }
        const double e = du[0] * du[0] + du[1] * du[1] + du[2] * du[2];
        const double f = du[0] * dv[0] + du[1] * dv[1] + du[2] * dv[2];
        const double g = dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2];
        const double g_target = std::pow(x, -2.0 * m.metric_exponent());
        row.e_err = std::abs(e - 1.0);
        row.f_err = std::abs(f);
        row.g_err = std::abs(g - g_target);
        rows.push_back(row);
    }
    return rows;
}

/// ASCII OBJ: `v x y z` lines then `f i j k` lines with 1-based indices.
inline std::string export_mesh_obj(const Mesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
    for (const auto& v : mesh.vertices) {
        out += "v ";
        out += format_double(v[0]);
        out += ' ';
        out += format_double(v[1]);
        out += ' ';
        out += format_double(v[2]);
        out += '\n';
    }
    for (const auto& f : mesh.faces) {
        out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
               std::to_string(f[2] + 1) + '\n';
    }
    return out;
}

/// CSV with header `x,y,z1,z2,z3` and one row per vertex.
inline std::string export_mesh_csv(const Mesh& mesh) {
    std::string out = "x,y,z1,z2,z3\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& p = mesh.param_grid[i];
        const auto& v = mesh.vertices[i];
        out += format_double(p[0]) + ',' + format_double(p[1]) + ',' +
               format_double(v[0]) + ',' + format_double(v[1]) + ',' +
               format_double(v[2]) + '\n';
    }
    return out;
}

}  // namespace grushin
