#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grushin/tube.hpp"
#include "oracles.hpp"

using namespace grushin;

TEST_CASE("tube density") {
    SUBCASE("tau = 0 is the identity") {
        TubeBand band(GrushinModel::alpha(1.0), 1.5, 3.0, 0.05, 0);
        const auto d = tube_density(band, 2.0, 0.0);
        CHECK(d.exact == 1.0);
        CHECK(d.numerical == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("flat cylinder: h = 1 - tau") {
        TubeBand band(GrushinModel::alpha(0.0), 0.5, 2.5, 0.1, 0);
        for (double x : {0.7, 1.3, 2.2}) {
            for (double tau : {-0.1, -0.03, 0.04, 0.1}) {
                const auto d = tube_density(band, x, tau);
                CHECK(d.exact == doctest::Approx(1.0 - tau).epsilon(1e-14));
                CHECK(std::abs(d.numerical - d.exact) < 1e-8);
            }
        }
    }
    SUBCASE("trumpet bell, spot value") {
        TubeBand band(GrushinModel::alpha(1.0), 1.5, 3.0, 0.05, 0);
        const auto d = tube_density(band, 2.0, 0.01);
        CHECK(std::abs(d.exact - d.numerical) <= 1e-6);
    }
    SUBCASE("exact vs numerical over the acceptance grid") {
        TubeBand band(GrushinModel::alpha(1.0), 1.5, 3.0, 0.05, 0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double x = 1.5 + 1.5 * i / 49.0;
            for (int j = 0; j < 20; ++j) {
                const double tau = -0.05 + 0.1 * j / 19.0;
                const auto d = tube_density(band, x, tau);
                worst = std::max(worst, std::abs(d.exact - d.numerical));
            }
        }
        CHECK(worst <= 1e-6);
    }
    SUBCASE("self-intersecting thickness is rejected") {
        CHECK_THROWS_AS(TubeBand(GrushinModel::alpha(1.0), 1.5, 3.0, 2.0, 0), DomainError);
    }
}

TEST_CASE("extrinsic quotient") {
    SUBCASE("flat band against the exact bump integrals") {
        // alpha = 0, k = 0: quotient = -int psi'^2 / int psi^2 + 1/4
        const double lo = 0.5, hi = 2.5, hw = 1.0;
        TubeBand band(GrushinModel::alpha(0.0), lo, hi, 0.05, 0);
        const TestFunction psi = TestFunction::spanning(lo, hi);
        const double i6 = oracle::bump_moment(6);
        const double i4 = oracle::bump_moment(4), i5 = oracle::bump_moment(5);
        const double dirichlet = 36.0 * (i4 - i5) / hw;  // int psi'^2 dx
        const double norm2 = hw * i6;                    // int psi^2 dx
        const double expected = -dirichlet / norm2 + 0.25;
        CHECK(extrinsic_quotient(band, psi) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("homogeneous in the trial state") {
        TubeBand band(GrushinModel::alpha(1.0), 1.5, 3.0, 0.05, 0);
        TestFunction psi = TestFunction::spanning(1.5, 3.0);
        const double q1 = extrinsic_quotient(band, psi);
        psi.amplitude = 3.7;
        const double q2 = extrinsic_quotient(band, psi);
        CHECK(std::abs(q1 - q2) <= 1e-12 * std::abs(q1));
        const double t1 = tube_rayleigh_quotient(band, psi);
        psi.amplitude = 0.11;
        const double t2 = tube_rayleigh_quotient(band, psi);
        CHECK(std::abs(t1 - t2) <= 1e-10 * std::abs(t1));
    }
    SUBCASE("quadrature refinement leaves the target put") {
        TubeBand band(GrushinModel::alpha(1.0), 1.5, 3.0, 0.05, 0);
        const TestFunction psi = TestFunction::spanning(1.5, 3.0);
        const double q64 = extrinsic_quotient(band, psi, 64);
        const double q128 = extrinsic_quotient(band, psi, 128);
        CHECK(std::abs(q64 - q128) <= 1e-8 * std::max(1.0, std::abs(q64)));
    }
}

TEST_CASE("thin-tube limit") {
    SUBCASE("flat cylinder: shifted quotient approaches the extrinsic one") {
        const TestFunction psi = TestFunction::spanning(0.5, 2.5);
        const auto rows = convergence_study(GrushinModel::alpha(0.0), 0.5, 2.5, 0,
                                            psi, {0.1, 0.05, 0.025});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].error < rows[i - 1].error);
            CHECK(rows[i].ratio <= 0.7);
        }
    }
    SUBCASE("trumpet-bell band") {
        const TestFunction psi = TestFunction::spanning(1.5, 3.0);
        const auto rows = convergence_study(GrushinModel::alpha(1.0), 1.5, 3.0, 0,
                                            psi, {0.1, 0.05, 0.025});
        REQUIRE(rows.size() == 3);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].error < rows[i - 1].error);
            CHECK(rows[i].ratio <= 0.7);
        }
        // self-consistency of the quadrature
        TubeBand band(GrushinModel::alpha(1.0), 1.5, 3.0, 0.05, 0);
        const double q64 = tube_rayleigh_quotient(band, psi, 64);
        const double q128 = tube_rayleigh_quotient(band, psi, 128);
        CHECK(std::abs(q64 - q128) < 1e-8 * std::abs(q64));
    }
    SUBCASE("a nonzero mode contributes its angular term") {
        const TestFunction psi = TestFunction::spanning(1.5, 3.0);
        const auto rows = convergence_study(GrushinModel::alpha(1.0), 1.5, 3.0, 2,
                                            psi, {0.05, 0.025});
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].error < rows[i - 1].error);
    }
}
