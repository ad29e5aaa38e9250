#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "grushin/geodesics.hpp"

using namespace grushin;

namespace {

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.px - b.px),
                     std::abs(a.py - b.py)});
}

PhasePoint unit_energy_start(double theta) {
    // base (1/4, 0): covector ellipse (cos t, 4 sin t) has H = 1/2
    return {0.25, 0.0, std::cos(theta), 4.0 * std::sin(theta)};
}

}  // namespace

TEST_CASE("hamiltonian") {
    const GrushinModel m = GrushinModel::alpha(1.0);
    CHECK(hamiltonian(m, {0.25, 0.0, 0.0, 4.0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(hamiltonian(m, {0.7, 0.3, 0.0, 0.0}) == 0.0);
    for (double x : {0.1, 1.0, 7.0})
        CHECK(hamiltonian(m, {x, 0.0, 1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("p_y = 0 geodesics are straight lines") {
    for (const auto& m : {GrushinModel::alpha(1.0), GrushinModel::alpha(0.5),
                          GrushinModel::alpha(-2.0), GrushinModel::winded(2)}) {
        const auto traj = geodesic_flow(m, {2.0, 0.7, 0.5, 0.0}, 1.0, 200);
        const PhasePoint& end = traj.back().state;
        CHECK(end.x == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(end.y == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(end.px == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(end.py == 0.0);
    }
}

TEST_CASE("closed form for alpha = 1") {
    const PhasePoint start{0.25, 0.0, 0.0, 4.0};
    SUBCASE("identity at t = 0") {
        const PhasePoint p = closed_form_alpha1(start, 0.0);
        CHECK(phase_distance(p, start) == 0.0);
    }
    SUBCASE("first crossing of the singular set") {
        const PhasePoint p = closed_form_alpha1(start, std::numbers::pi / 8.0);
        CHECK(std::abs(p.x) < 1e-15);
        CHECK(p.y == doctest::Approx(std::numbers::pi / 64.0).epsilon(1e-14));
        CHECK(p.px == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(p.py == 4.0);
    }
    SUBCASE("energy conserved exactly") {
        const GrushinModel m = GrushinModel::alpha(1.0);
        const double h0 = hamiltonian(m, start);
        for (double t : {0.1, 0.77, 1.3, 3.0})
            CHECK(hamiltonian(m, closed_form_alpha1(start, t)) ==
                  doctest::Approx(h0).epsilon(1e-14));
    }
    SUBCASE("p_y = 0 is rejected") {
        CHECK_THROWS_AS(closed_form_alpha1({1.0, 0.0, 1.0, 0.0}, 0.5), DomainError);
    }
}

TEST_CASE("integrator against the closed-form oracle") {
    const GrushinModel m = GrushinModel::alpha(1.0);
    std::mt19937 rng(20240530);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 8; ++trial) {
        const PhasePoint start = unit_energy_start(uni(rng));
        if (std::abs(start.py) < 1e-3) continue;
        const auto traj = geodesic_flow(m, start, 1.3, 100000);
        const PhasePoint ref = closed_form_alpha1(start, 1.3);
        CHECK(phase_distance(traj.back().state, ref) <= 1e-8);
    }
}

TEST_CASE("conservation over the standard horizon") {
    const GrushinModel m = GrushinModel::alpha(1.0);
    const PhasePoint start{0.25, 0.0, 0.0, 4.0};
    const auto traj = geodesic_flow(m, start, 1.3, 10000);
    const double h0 = hamiltonian(m, start);
    for (const auto& s : traj) {
        CHECK(std::abs(hamiltonian(m, s.state) - h0) <= 1e-10);
        CHECK(s.state.py == start.py);  // exactly constant
    }
}

TEST_CASE("reversibility") {
    const GrushinModel m = GrushinModel::alpha(1.0);
    const PhasePoint start{0.25, 0.0, 0.3, 3.0};
    const PhasePoint end = geodesic_flow(m, start, 1.3, 10000).back().state;
    const PhasePoint back = geodesic_flow(m, end, -1.3, 10000).back().state;
    CHECK(phase_distance(back, start) <= 1e-9);
}

TEST_CASE("second-order convergence of the integrator") {
    const GrushinModel m = GrushinModel::alpha(1.0);
    const PhasePoint start{0.25, 0.0, 0.6, 2.5};
    const PhasePoint ref = closed_form_alpha1(start, 1.3);
    const double e1 = phase_distance(geodesic_flow(m, start, 1.3, 2000).back().state, ref);
    const double e2 = phase_distance(geodesic_flow(m, start, 1.3, 4000).back().state, ref);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("singular-set crossing") {
    SUBCASE("alpha = 1 passes x = 0 smoothly") {
        const auto traj =
            geodesic_flow(GrushinModel::alpha(1.0), {0.25, 0.0, 0.0, 4.0}, 0.5, 2000);
        bool crossed = false;
        for (const auto& s : traj) {
            CHECK(std::isfinite(s.state.x));
            CHECK(std::isfinite(s.state.y));
            if (s.state.x < 0.0) crossed = true;
        }
        CHECK(crossed);
    }
    SUBCASE("non-smooth exponents refuse to cross") {
        CHECK_THROWS_AS(
            geodesic_flow(GrushinModel::alpha(0.5), {0.1, 0.0, -1.0, 0.1}, 1.0, 2000),
            DomainError);
    }
}

TEST_CASE("wavefront") {
    const GrushinModel m = GrushinModel::alpha(1.0);
    SUBCASE("T = 0 collapses to the base") {
        for (const auto& p : wavefront(m, 0.25, 0.0, 0.0, 16)) {
            CHECK(p.x == 0.25);
            CHECK(p.y == 0.0);
        }
    }
    SUBCASE("matches the closed form per angle") {
        const auto pts = wavefront(m, 0.25, 0.0, 1.3, 8, 100000);
        for (const auto& p : pts) {
            const PhasePoint start = unit_energy_start(p.theta);
            if (std::abs(start.py) < 1e-12) {
                CHECK(p.x == doctest::Approx(start.x + start.px * 1.3).epsilon(1e-10));
                continue;
            }
            const PhasePoint ref = closed_form_alpha1(start, 1.3);
            CHECK(std::abs(p.x - ref.x) <= 1e-8);
            CHECK(std::abs(p.y - ref.y) <= 1e-8);
        }
    }
    SUBCASE("mirror symmetry in the launch angle") {
        const auto pts = wavefront(m, 0.25, 0.0, 0.9, 16, 4000);
        const int n = static_cast<int>(pts.size());
        for (int i = 1; i < n / 2; ++i) {
            const auto& up = pts[i];
            const auto& down = pts[n - i];
            CHECK(up.x == doctest::Approx(down.x).epsilon(1e-9));
            CHECK(up.y == doctest::Approx(-down.y).scale(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("conjugate time against a finite-difference Jacobi oracle") {
    // perturb the launch angle of the closed-form geodesic family and look
    // for the first zero of det [dz_dtheta, dz_dt]; fully independent of the
    // library's variational integration
    const double theta0 = 1.1;
    const auto at = [&](double theta) {
        return PhasePoint{0.25, 0.0, std::cos(theta), 4.0 * std::sin(theta)};
    };
    const double h = 1e-6;
    const auto det_fd = [&](double t) {
        const PhasePoint plus = closed_form_alpha1(at(theta0 + h), t);
        const PhasePoint minus = closed_form_alpha1(at(theta0 - h), t);
        const PhasePoint mid = closed_form_alpha1(at(theta0), t);
        const double dx = (plus.x - minus.x) / (2.0 * h);
        const double dy = (plus.y - minus.y) / (2.0 * h);
        const double vx = mid.px;                      // xdot = p_x
        const double vy = mid.x * mid.x * mid.py;      // ydot = x^2 p_y
        return dx * vy - dy * vx;
    };
    double t_ref = -1.0;
    const int n = 20000;
    double prev = det_fd(2.0 / n);
    for (int i = 2; i <= n; ++i) {
        const double t = 2.0 * i / n;
        const double cur = det_fd(t);
        if (prev * cur < 0.0) {
            t_ref = t;
            break;
        }
        prev = cur;
    }
    REQUIRE(t_ref > 0.0);
    const auto t_lib = conjugate_time(GrushinModel::alpha(1.0), at(theta0), 2.0, 8192);
    REQUIRE(t_lib.has_value());
    CHECK(std::abs(*t_lib - t_ref) < 2.0 * 2.0 / n);
}

TEST_CASE("conjugate times") {
    SUBCASE("the axial unit-energy start focuses at pi/4") {
        const auto t = conjugate_time(GrushinModel::alpha(1.0), {0.25, 0.0, 0.0, 4.0},
                                      2.0 * std::numbers::pi / 4.0, 16384);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-6));
    }
    SUBCASE("straight lines have none") {
        const auto t = conjugate_time(GrushinModel::alpha(1.0), {0.5, 0.0, 1.0, 0.0}, 3.0, 2048);
        CHECK_FALSE(t.has_value());
    }
    SUBCASE("the flat cylinder has none") {
        const auto t = conjugate_time(GrushinModel::alpha(0.0), {0.5, 0.0, 0.6, 0.8}, 5.0, 2048);
        CHECK_FALSE(t.has_value());
    }
}
