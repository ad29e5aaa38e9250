#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "grushin/errors.hpp"
#include "grushin/spectral.hpp"

namespace grushin {

enum class BoundaryCondition { Dirichlet, Neumann };
enum class Equation { Heat, Schrodinger };

/// Lumped finite-element discretization of -d^2/dx^2 + V on [a, b]:
/// symmetric tridiagonal stiffness-plus-potential matrix A and a diagonal
/// mass M, so the operator is M^{-1} A and all inner products are
/// M-weighted. Dirichlet ends drop their boundary node; Neumann ends keep
/// it with the half mass and the one-sided second-order closure.
struct DiscreteOperator {
    std::vector<double> diag;  // A, main diagonal
    std::vector<double> off;   // A, sub/super diagonal (size n-1)
    std::vector<double> mass;  // M, diagonal
    std::vector<double> grid;  // node positions
    double dx;
    BoundaryCondition bc_lo, bc_hi;
};

template <class Potential>
DiscreteOperator discretize_potential(Potential&& V, double a, double b, int n,
                                      BoundaryCondition lo, BoundaryCondition hi) {
    if (n < 16) throw DomainError("need at least 16 grid points");
    if (!(a < b)) throw DomainError("empty interval");
    const int segments = n - 1 + (lo == BoundaryCondition::Dirichlet ? 1 : 0) +
                         (hi == BoundaryCondition::Dirichlet ? 1 : 0);
    const double dx = (b - a) / segments;
    const double x0 = a + (lo == BoundaryCondition::Dirichlet ? dx : 0.0);

    DiscreteOperator op;
    op.dx = dx;
    op.bc_lo = lo;
    op.bc_hi = hi;
    op.diag.assign(n, 0.0);
    op.off.assign(n - 1, -1.0 / dx);
    op.mass.assign(n, dx);
    op.grid.resize(n);
    for (int i = 0; i < n; ++i) op.grid[i] = x0 + i * dx;
    if (lo == BoundaryCondition::Neumann) op.mass.front() = 0.5 * dx;
    if (hi == BoundaryCondition::Neumann) op.mass.back() = 0.5 * dx;
    for (int i = 0; i < n; ++i) {
        const bool boundary = (i == 0 && lo == BoundaryCondition::Neumann) ||
                              (i == n - 1 && hi == BoundaryCondition::Neumann);
        op.diag[i] = (boundary ? 1.0 : 2.0) / dx + op.mass[i] * V(op.grid[i]);
    }
    return op;
}

/// Fiber-operator discretization on a truncated interval; the truncation
/// must stay strictly away from the singular endpoints.
inline DiscreteOperator discretize(const FiberOperator& f, double a, double b, int n,
                                   BoundaryCondition lo, BoundaryCondition hi) {
    if (!(a > f.lower && b < f.upper))
        throw DomainError("truncated interval must lie strictly inside the fiber interval");
    return discretize_potential([&f](double x) { return f.potential(x); }, a, b, n, lo, hi);
}

inline double weighted_norm(const std::vector<double>& mass,
                            const std::vector<std::complex<double>>& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += mass[i] * std::norm(u[i]);
    return std::sqrt(acc);
}

namespace detail {

// Tridiagonal solve (Thomas); the Crank-Nicolson matrices here are strongly
// diagonally dominant in the mass term.
template <class T>
void solve_tridiagonal(const std::vector<T>& diag, const std::vector<T>& off,
                       std::vector<T>& rhs) {
    const std::size_t n = diag.size();
    std::vector<T> c(n - 1);
    std::vector<T> d(n);
    d[0] = diag[0];
    if (std::abs(d[0]) == 0.0) throw NumericalError("tridiagonal solve breakdown");
    c[0] = off[0] / d[0];
    rhs[0] = rhs[0] / d[0];
    for (std::size_t i = 1; i < n; ++i) {
        d[i] = diag[i] - off[i - 1] * c[i - 1];
        if (std::abs(d[i]) == 0.0) throw NumericalError("tridiagonal solve breakdown");
        if (i < n - 1) c[i] = off[i] / d[i];
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / d[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = rhs[i] - c[i] * rhs[i + 1];
}

}  // namespace detail

struct ModeSolution {
    Equation equation;
    double dt;
    std::vector<double> grid;
    std::vector<double> mass;
    std::vector<std::pair<double, std::vector<std::complex<double>>>> snapshots;
};

/// Crank-Nicolson evolution of u' = -M^{-1}A u (heat) or
/// i u' = M^{-1}A u (Schrodinger). One code path: solve
/// (M + theta A) u+ = (M - theta A) u with theta = dt/2 or i dt/2.
/// Unconditionally stable. Schrodinger runs are exactly M-norm-unitary and
/// the run itself asserts drift <= 1e-10 per unit time; heat norms may grow
/// when A has negative eigenvalues, at most like exp(-lambda_min t) with
/// lambda_min available from lowest_eigenpair.
inline ModeSolution evolve(const DiscreteOperator& op, Equation eq,
                           std::vector<std::complex<double>> u, double T, double dt,
                           int save_every = 1) {
    if (u.size() != op.grid.size()) throw DomainError("initial datum does not match the grid");
    if (save_every < 1) throw DomainError("save_every must be >= 1");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");

    ModeSolution sol{eq, dt, op.grid, op.mass, {}};
    sol.snapshots.emplace_back(0.0, u);
    if (T == 0.0) return sol;
    if (T < 0.0) throw DomainError("T must be >= 0");

    const int nsteps = std::max(1, static_cast<int>(std::llround(T / dt)));
    const double dte = T / nsteps;
    const std::complex<double> theta =
        (eq == Equation::Heat) ? std::complex<double>(0.5 * dte, 0.0)
                               : std::complex<double>(0.0, 0.5 * dte);
    const std::size_t n = u.size();
    std::vector<std::complex<double>> ldiag(n), loff(n - 1);
    for (std::size_t i = 0; i < n; ++i) ldiag[i] = op.mass[i] + theta * op.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) loff[i] = theta * op.off[i];

    const double norm0 = weighted_norm(op.mass, u);
    std::vector<std::complex<double>> rhs(n);
    for (int step = 1; step <= nsteps; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> acc = (op.mass[i] - theta * op.diag[i]) * u[i];
            if (i > 0) acc -= theta * op.off[i - 1] * u[i - 1];
            if (i + 1 < n) acc -= theta * op.off[i] * u[i + 1];
            rhs[i] = acc;
        }
        detail::solve_tridiagonal(ldiag, loff, rhs);
        u = rhs;
        if (step % save_every == 0 || step == nsteps)
            sol.snapshots.emplace_back(step * dte, u);
    }
    if (eq == Equation::Schrodinger && norm0 > 0.0) {
        const double drift = std::abs(weighted_norm(op.mass, u) - norm0) / norm0;
        if (drift > 1e-10 * std::max(T, 1.0))
            throw NumericalError("Crank-Nicolson unitarity lost: norm drift " +
                                 std::to_string(drift));
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Smallest eigenpair of A v = lambda M v (Sturm bisection + inverse iteration)
// ---------------------------------------------------------------------------

struct EigenPair {
    double value;
    std::vector<double> vector;  // M-normalized
};

namespace detail {

inline int sturm_count(const std::vector<double>& diag, const std::vector<double>& off,
                       double lambda) {
    int count = 0;
    double prev = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double d = diag[i] - lambda;
        if (i > 0) d -= off[i - 1] * off[i - 1] / prev;
        if (d == 0.0) d = -1e-300;  // zero pivot counts as crossed
        if (d < 0.0) ++count;
        prev = d;
    }
    return count;
}

}  // namespace detail

inline EigenPair lowest_eigenpair(const DiscreteOperator& op) {
    const std::size_t n = op.diag.size();
    // similarity transform to the standard problem C w = lambda w
    std::vector<double> cdiag(n), coff(n - 1);
    for (std::size_t i = 0; i < n; ++i) cdiag[i] = op.diag[i] / op.mass[i];
    for (std::size_t i = 0; i + 1 < n; ++i)
        coff[i] = op.off[i] / std::sqrt(op.mass[i] * op.mass[i + 1]);

    double lo = cdiag[0], hi = cdiag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(coff[i - 1]);
        if (i + 1 < n) r += std::abs(coff[i]);
        lo = std::min(lo, cdiag[i] - r);
        hi = std::max(hi, cdiag[i] + r);
    }
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < 200 && hi - lo > 1e-13 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::sturm_count(cdiag, coff, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    // inverse iteration with a slightly detuned shift keeps the pivots alive
    const double sigma = lambda - 1e-8 * scale;
    std::vector<double> sdiag(n);
    for (std::size_t i = 0; i < n; ++i) sdiag[i] = cdiag[i] - sigma;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::sqrt(static_cast<double>(n) + i);
    for (int it = 0; it < 4; ++it) {
        detail::solve_tridiagonal(sdiag, coff, w);
        double norm = 0.0;
        for (double v : w) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : w) v /= norm;
    }
    // Rayleigh quotient refinement and transform back: v = M^{-1/2} w
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double av = cdiag[i] * w[i];
        if (i > 0) av += coff[i - 1] * w[i - 1];
        if (i + 1 < n) av += coff[i] * w[i + 1];
        rq += w[i] * av;
    }
    EigenPair pair{rq, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) pair.vector[i] = w[i] / std::sqrt(op.mass[i]);
    return pair;
}

// ---------------------------------------------------------------------------
// Boundary-condition sensitivity at a singular endpoint
// ---------------------------------------------------------------------------

struct SensitivityProtocol {
    double far_position = 5.0;
    BoundaryCondition far_bc = BoundaryCondition::Dirichlet;
    Equation equation = Equation::Heat;
    double T = 0.1;
    double dx = 0.0025;  // dt = dx
    double probe_center = std::numeric_limits<double>::quiet_NaN();  // endpoint + 1 by default
    double probe_width = 0.1;
    int refinement = 1;  // 2 halves dx and dt
};

struct SensitivityRow {
    double delta;
    double sensitivity;  // M-norm of (Dirichlet - Neumann) over the probe region
};

/// Dynamical surrogate for essential self-adjointness: truncate the fiber a
/// distance delta from the singular endpoint, evolve the same probe under a
/// Dirichlet and a Neumann condition at the cutoff, and measure how far the
/// two solutions drift apart over the probe's own support. Limit-point
/// endpoints forget the choice as delta -> 0; limit-circle endpoints do not.
inline std::vector<SensitivityRow> bc_sensitivity(const FiberOperator& f,
                                                  EndpointSide singular_end,
                                                  const std::vector<double>& deltas,
                                                  SensitivityProtocol proto = {}) {
    if (deltas.empty()) throw DomainError("need at least one cutoff");
    const double e = f.endpoint_position(singular_end);
    if (!std::isfinite(e)) throw DomainError("bc sensitivity needs a finite singular endpoint");
    const bool lower_end = singular_end == EndpointSide::Lower;
    if (lower_end ? !(proto.far_position > e && proto.far_position < f.upper)
                  : !(proto.far_position < e && proto.far_position > f.lower))
        throw DomainError("far truncation outside the fiber interval");

    const double dx = proto.dx / proto.refinement;
    const double dt = dx;
    double center = proto.probe_center;
    if (!std::isfinite(center)) center = lower_end ? e + 1.0 : e - 1.0;
    const double w = proto.probe_width;

    std::vector<SensitivityRow> rows;
    rows.reserve(deltas.size());
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw DomainError("cutoff distances must be positive");
        const double a = lower_end ? e + delta : proto.far_position;
        const double b = lower_end ? proto.far_position : e - delta;
        const int segments = std::max(16, static_cast<int>(std::llround((b - a) / dx)));

        auto run = [&](BoundaryCondition cutoff_bc) {
            const BoundaryCondition lo = lower_end ? cutoff_bc : proto.far_bc;
            const BoundaryCondition hi = lower_end ? proto.far_bc : cutoff_bc;
            const int dofs = segments + 1 - (lo == BoundaryCondition::Dirichlet ? 1 : 0) -
                             (hi == BoundaryCondition::Dirichlet ? 1 : 0);
            const DiscreteOperator op = discretize(f, a, b, dofs, lo, hi);
            std::vector<std::complex<double>> u(op.grid.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double x = op.grid[i];
                u[i] = std::exp(-0.5 * (x - center) * (x - center) / (w * w));
            }
            const double norm = weighted_norm(op.mass, u);
            for (auto& v : u) v /= norm;
            const ModeSolution sol = evolve(op, proto.equation, std::move(u), proto.T, dt);
            return std::make_pair(op, sol.snapshots.back().second);
        };

        const auto [op_d, u_d] = run(BoundaryCondition::Dirichlet);
        const auto [op_n, u_n] = run(BoundaryCondition::Neumann);

        // the grids share every node; the Neumann run has one extra node at
        // the cutoff itself
        const std::size_t offset_d = 0, offset_n = lower_end ? 1 : 0;
        const std::size_t common = std::min(u_d.size(), u_n.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < common; ++i) {
            const double x = op_d.grid[i + offset_d];
            if (std::abs(x - center) > 4.0 * w) continue;
            const std::complex<double> diff = u_d[i + offset_d] - u_n[i + offset_n];
            acc += op_d.mass[i + offset_d] * std::norm(diff);
        }
        rows.push_back({delta, std::sqrt(acc)});
    }
    return rows;
}

}  // namespace grushin
