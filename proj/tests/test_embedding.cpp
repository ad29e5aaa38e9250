#include <doctest.h>

#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <vector>

#include "grushin/embedding.hpp"
#include "oracles.hpp"

using namespace grushin;

TEST_CASE("anchors are exact") {
    RevolutionProfile bell(GrushinModel::alpha(1.0));
    CHECK(bell.height(1.0) == 1.0);
    RevolutionProfile w2(GrushinModel::winded(2));
    CHECK(w2.height(0.5) == 0.5);
    RevolutionProfile cyl(GrushinModel::alpha(0.0));
    for (double t : {-1.0, 0.0, 0.4, 2.0}) CHECK(cyl.height(t) == t);
    RevolutionProfile plane(GrushinModel::alpha(-1.0));
    CHECK(plane.height(3.0) == 0.0);
}

TEST_CASE("trumpet-bell height against an independent quadrature oracle") {
    // h(2) = 1 + int_1^2 sqrt(1 - s^-4) ds, via the test-side Simpson rule on
    // the substituted integrand 2u sqrt(1 - (1+u^2)^-4)
    const double oracle_value =
        1.0 + oracle::integrate(
                  [](double u) {
                      const double s = 1.0 + u * u;
                      return 2.0 * u * std::sqrt(1.0 - std::pow(s, -4.0));
                  },
                  0.0, 1.0, 1e-13);
    CHECK(oracle_value == doctest::Approx(1.8228354641803519).epsilon(1e-11));

    RevolutionProfile bell(GrushinModel::alpha(1.0));
    CHECK(std::abs(bell.height(2.0) - oracle_value) < 1e-10);
}

TEST_CASE("height for alpha < -1 anchors at the origin") {
    const GrushinModel m = GrushinModel::alpha(-2.0);
    RevolutionProfile prof(m);  // validity (0, 0.5]
    const auto integrand = [](double s) {
        return std::sqrt(1.0 - 4.0 * std::pow(s, 2.0));  // alpha=-2: g'^2 = 4 s^2
    };
    for (double x : {0.05, 0.2, 0.45}) {
        const double ref = oracle::integrate(integrand, 0.0, x, 1e-13);
        CHECK(std::abs(prof.height(x) - ref) < 1e-10);
    }
    // h is nondecreasing and h(x) -> 0 toward the puncture
    CHECK(prof.height(0.01) > 0.0);
    CHECK(prof.height(0.01) < prof.height(0.4));
}

TEST_CASE("embed points") {
    RevolutionProfile bell(GrushinModel::alpha(1.0));
    const auto p = bell.embed(1.0, 0.0);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-15));

    RevolutionProfile plane(GrushinModel::alpha(-1.0));
    const auto q = plane.embed(0.7, 1.1);
    CHECK(q[0] == doctest::Approx(0.7 * std::cos(1.1)).epsilon(1e-15));
    CHECK(q[1] == doctest::Approx(0.7 * std::sin(1.1)).epsilon(1e-15));
    CHECK(q[2] == 0.0);

    RevolutionProfile w2(GrushinModel::winded(2));
    const auto r = w2.embed(0.5, 0.0);
    CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(r[2] == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(bell.embed(0.5, 0.0), DomainError);
}

TEST_CASE("unit-speed profile, analytically and through the height cache") {
    for (const auto& m : {GrushinModel::alpha(1.0), GrushinModel::alpha(2.0),
                          GrushinModel::alpha(-2.0), GrushinModel::winded(2)}) {
        RevolutionProfile prof(m);
        const ValidityInterval v = prof.validity();
        const double lo = std::isfinite(v.hi) ? 0.1 * v.hi : v.lo * 1.2;
        const double hi = std::isfinite(v.hi) ? 0.9 * v.hi : v.lo * 1.2 + 3.0;
        for (double x : oracle::log_grid(lo, hi, 12)) {
            const ProfileDerivatives p = profile_derivatives(m, x);
            CHECK(p.dradius * p.dradius + p.dheight * p.dheight ==
                  doctest::Approx(1.0).epsilon(1e-13));
            const double d = 1e-5 * std::max(x, 1.0);
            if (!v.strictly_inside(x - d) || !v.strictly_inside(x + d)) continue;
            const double slope_fd = (prof.height(x + d) - prof.height(x - d)) / (2.0 * d);
            CHECK(std::abs(slope_fd - prof.height_slope(x)) < 1e-8);
        }
    }
}

TEST_CASE("mesh counts and radii") {
    RevolutionProfile cyl(GrushinModel::alpha(0.0));
    const Mesh band = generate_mesh(cyl, 0.0, 1.0, 2, 4);
    CHECK(band.vertices.size() == 8);
    for (const auto& v : band.vertices)
        CHECK(std::hypot(v[0], v[1]) == doctest::Approx(1.0).epsilon(1e-14));

    RevolutionProfile bell(GrushinModel::alpha(1.0));
    const Mesh trumpet = generate_mesh(bell, 1.0, 3.0, 50, 64);
    CHECK(trumpet.vertices.size() == 50u * 64u);
    double max_r = 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < trumpet.vertices.size(); ++i) {
        const double r = std::hypot(trumpet.vertices[i][0], trumpet.vertices[i][1]);
        if (r > max_r) {
            max_r = r;
            argmax = i;
        }
    }
    // largest cross-section radius is 1, attained on the x = 1 boundary ring
    CHECK(max_r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trumpet.param_grid[argmax][0] == doctest::Approx(1.0).epsilon(1e-15));

    for (const auto& f : trumpet.faces)
        for (int idx : f) CHECK((idx >= 0 && idx < static_cast<int>(trumpet.vertices.size())));

    CHECK_THROWS_AS(generate_mesh(bell, 0.5, 3.0, 10, 10), DomainError);
}

TEST_CASE("winded sweep covers one fundamental period unless asked for all") {
    RevolutionProfile w2(GrushinModel::winded(2));
    const double period = 2.0 * std::numbers::pi / 4.0;
    const Mesh fundamental = generate_mesh(w2, 0.5, 1.5, 3, 8);
    for (const auto& p : fundamental.param_grid) CHECK(p[1] < period + 1e-12);
    const Mesh full = generate_mesh(w2, 0.5, 1.5, 3, 8, true);
    double max_y = 0.0;
    for (const auto& p : full.param_grid) max_y = std::max(max_y, p[1]);
    CHECK(max_y > 2.0 * std::numbers::pi * 7.0 / 8.0 - 1e-12);
}

TEST_CASE("isometry of the immersions") {
    SUBCASE("flat cylinder is exact to roundoff") {
        RevolutionProfile cyl(GrushinModel::alpha(0.0));
        const std::vector<double> xs{0.3, 1.0, 2.5};
        for (const auto& row : verify_isometry(cyl, xs)) {
            REQUIRE(row.computed);
            CHECK(row.e_err < 1e-10);
            CHECK(row.f_err < 1e-10);
            CHECK(row.g_err < 1e-10);
        }
    }
    SUBCASE("trumpet bell") {
        RevolutionProfile bell(GrushinModel::alpha(1.0));
        const std::vector<double> xs{1.2, 2.0, 5.0};
        for (const auto& row : verify_isometry(bell, xs)) {
            REQUIRE(row.computed);
            CHECK(row.e_err <= 1e-6);
            CHECK(row.f_err <= 1e-6);
            CHECK(row.g_err <= 1e-6);
        }
    }
    SUBCASE("fractional exponents") {
        for (double a : {0.5, -0.5}) {
            const GrushinModel m = GrushinModel::alpha(a);
            RevolutionProfile prof(m);
            const double s0 = singular_radius(m);
            const std::vector<double> xs{s0 * 1.2, s0 + 1.0, s0 + 4.0};
            for (const auto& row : verify_isometry(prof, xs)) {
                REQUIRE(row.computed);
                CHECK(row.e_err <= 1e-6);
                CHECK(row.f_err <= 1e-6);
                CHECK(row.g_err <= 1e-6);
            }
        }
    }
    SUBCASE("winded bell targets the alpha = 1 metric") {
        RevolutionProfile w3(GrushinModel::winded(3));
        const std::vector<double> xs{1.0};
        const auto rows = verify_isometry(w3, xs);
        REQUIRE(rows[0].computed);
        CHECK(rows[0].g_err <= 1e-6);  // G target is 1/x^2 = 1
        CHECK(rows[0].e_err <= 1e-6);
    }
    SUBCASE("points hugging s0 are flagged, not computed") {
        RevolutionProfile bell(GrushinModel::alpha(1.0));
        const std::vector<double> xs{1.0 + 1e-7, 2.0};
        const auto rows = verify_isometry(bell, xs);
        CHECK_FALSE(rows[0].computed);
        CHECK(rows[1].computed);
    }
    SUBCASE("second-order decay under step halving") {
        RevolutionProfile bell(GrushinModel::alpha(1.0));
        const std::vector<double> xs{1.5, 2.5};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double coarse =
                verify_isometry(bell, std::vector<double>{xs[i]}, 1e-2)[0].g_err;
            const double fine =
                verify_isometry(bell, std::vector<double>{xs[i]}, 5e-3)[0].g_err;
            CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
        }
    }
}

TEST_CASE("height cache is safe under concurrent readers") {
    RevolutionProfile bell(GrushinModel::alpha(1.0));
    std::vector<double> xs;
    for (int i = 0; i < 160; ++i) xs.push_back(1.0 + 0.05 * i);
    std::vector<double> serial(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) serial[i] = bell.height(xs[i]);

    RevolutionProfile shared(GrushinModel::alpha(1.0));
    std::vector<std::future<double>> futures;
    futures.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[(i * 37) % xs.size()];
        futures.push_back(std::async(std::launch::async, [&shared, x] { return shared.height(x); }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const double expected = serial[(i * 37) % xs.size()];
        CHECK(std::abs(futures[i].get() - expected) < 2e-10);
    }
}

TEST_CASE("OBJ and CSV export") {
    Mesh tri;
    tri.vertices = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.25}};
    tri.param_grid = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    tri.faces = {{0, 1, 2}};

    SUBCASE("one-triangle OBJ") {
        const std::string obj = export_mesh_obj(tri);
        int v_lines = 0, f_lines = 0;
        std::istringstream in(obj);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("v ", 0) == 0) ++v_lines;
            if (line.rfind("f ", 0) == 0) ++f_lines;
        }
        CHECK(v_lines == 3);
        CHECK(f_lines == 1);
        CHECK(obj.back() == '\n');
    }

    SUBCASE("OBJ round-trips the vertex list") {
        RevolutionProfile bell(GrushinModel::alpha(1.0));
        const Mesh mesh = generate_mesh(bell, 1.1, 2.0, 5, 7);
        const std::string obj = export_mesh_obj(mesh);
        std::istringstream in(obj);
        std::string tag;
        std::vector<std::array<double, 3>> parsed;
        double a, b, c;
        while (in >> tag) {
            if (tag == "v") {
                in >> a >> b >> c;
                parsed.push_back({a, b, c});
            } else {
                in >> a >> b >> c;
            }
        }
        REQUIRE(parsed.size() == mesh.vertices.size());
        for (std::size_t i = 0; i < parsed.size(); ++i)
            for (int d = 0; d < 3; ++d)
                CHECK(std::abs(parsed[i][d] - mesh.vertices[i][d]) < 1e-12);
    }

    SUBCASE("CSV row count is vertices + header") {
        const std::string csv = export_mesh_csv(tri);
        int rows = 0;
        for (char ch : csv)
            if (ch == '\n') ++rows;
        CHECK(rows == 4);
        CHECK(csv.rfind("x,y,z1,z2,z3\n", 0) == 0);
    }
}
