#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "polymin/geometry.hpp"

using namespace polymin;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("domain construction") {
    auto rect = Domain2D::rectangle(-1, 1, 0, 1);
    CHECK(rect.perimeter() == doctest::Approx(6.0));
    CHECK(rect.area() == doctest::Approx(2.0));
    CHECK(rect.contains({0.0, 0.5}));
    CHECK_FALSE(rect.contains({0.0, 1.5}));

    auto disk = Domain2D::unit_disk();
    CHECK(disk.boundary_quadrature(16).total_weight() == doctest::Approx(2 * kPi).epsilon(1e-10));

    // crossing edges rejected
    CHECK_THROWS_AS(Domain2D::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ValidationError);
    CHECK_THROWS_AS(make_domain("hexagon", {}), ValidationError);

    auto tri = make_domain("polygon", {0, 0, 2, 0, 0, 2});
    CHECK(tri.area() == doctest::Approx(2.0));
}

TEST_CASE("frames") {
    auto rect = Domain2D::rectangle(-1, 1, 0, 1);
    // bottom edge midpoint: arclength 1 from the (-1,0) start corner
    auto f = rect.frame_at(1.0);
    CHECK((f.point - Vec2(0, 0)).norm() < 1e-14);
    CHECK((f.tangent - Vec2(1, 0)).norm() < 1e-14);
    CHECK((f.normal - Vec2(0, -1)).norm() < 1e-14);

    CHECK_THROWS_AS(rect.frame_at(2.0), EvaluationError); // corner (1,0)
    CHECK_THROWS_AS(rect.frame_at(0.0), EvaluationError);

    auto disk = Domain2D::unit_disk();
    const double theta = 0.73;
    auto g = disk.frame_at(theta); // arclength equals angle on the unit circle
    CHECK((g.normal - Vec2(std::cos(theta), std::sin(theta))).norm() < 1e-12);
    CHECK(std::abs(g.tangent.dot(g.normal)) < 1e-12);
}

TEST_CASE("frames are orthonormal at all quadrature nodes") {
    for (const auto& dom :
         {Domain2D::rectangle(-1, 1, 0, 1), Domain2D::unit_disk(),
          Domain2D::polygon({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {0, 2}})}) {
        auto rule = dom.boundary_quadrature(8, 0.1);
        for (double s : rule.params) {
            auto f = dom.frame_at(s);
            CHECK(std::abs(f.tangent.norm() - 1.0) <= 1e-12);
            CHECK(std::abs(f.normal.norm() - 1.0) <= 1e-12);
            CHECK(std::abs(f.tangent.dot(f.normal)) <= 1e-12);
            Mat2 B = f.basis();
            CHECK((B.transpose() * B - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("quadrature weights reproduce measures") {
    auto rect = Domain2D::rectangle(-1, 1, 0, 1);
    CHECK(rect.boundary_quadrature(8).total_weight() == doctest::Approx(6.0).epsilon(1e-12));

    auto square = Domain2D::rectangle(0, 1, 0, 1);
    CHECK(square.interior_quadrature(0.1).total_weight() == doctest::Approx(1.0).epsilon(1e-12));

    auto tri = Domain2D::polygon({{0, 0}, {2, 0}, {0, 2}});
    CHECK(tri.interior_quadrature(0.25).total_weight() == doctest::Approx(2.0).epsilon(1e-12));

    auto disk = Domain2D::unit_disk();
    CHECK(disk.interior_quadrature(0.05).total_weight() == doctest::Approx(kPi).epsilon(1e-8));
}

TEST_CASE("divergence theorem closes on polygons") {
    // oracle: int_boundary g.n equals int_domain div g for 20 random
    // polynomial fields of degree <= 3
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);

    auto dom = Domain2D::rectangle(-1, 1, 0, 1);
    auto bq = dom.boundary_quadrature(8);
    auto iq = dom.interior_quadrature(0.05);

    for (int trial = 0; trial < 20; ++trial) {
        // g_i(x, y) = sum over monomials x^a y^b with a + b <= 3
        double c1[4][4], c2[4][4];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                c1[a][b] = a + b <= 3 ? coef(rng) : 0.0;
                c2[a][b] = a + b <= 3 ? coef(rng) : 0.0;
            }
        auto g = [&](const Vec2& x) {
            Vec2 out(0, 0);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const double mono = std::pow(x(0), a) * std::pow(x(1), b);
                    out(0) += c1[a][b] * mono;
                    out(1) += c2[a][b] * mono;
                }
            return out;
        };
        auto divg = [&](const Vec2& x) {
            double d = 0.0;
            for (int a = 1; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    d += a * c1[a][b] * std::pow(x(0), a - 1) * std::pow(x(1), b);
            for (int a = 0; a < 4; ++a)
                for (int b = 1; b < 4; ++b)
                    d += b * c2[a][b] * std::pow(x(0), a) * std::pow(x(1), b - 1);
            return d;
        };

        double surface = 0.0;
        for (std::size_t i = 0; i < bq.points.size(); ++i)
            surface += bq.weights[i] * g(bq.points[i]).dot(dom.frame_at(bq.params[i]).normal);
        double volume = 0.0;
        for (std::size_t i = 0; i < iq.points.size(); ++i)
            volume += iq.weights[i] * divg(iq.points[i]);
        CHECK(std::abs(surface - volume) <= 1e-8);
    }

    // the x . n field integrates to twice the area
    double xin = 0.0;
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto sbq = sq.boundary_quadrature(4);
    for (std::size_t i = 0; i < sbq.points.size(); ++i)
        xin += sbq.weights[i] * sbq.points[i].dot(sq.frame_at(sbq.params[i]).normal);
    CHECK(xin == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quadrature nodes avoid corners") {
    auto dom = Domain2D::polygon({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {0, 2}});
    for (double s : dom.boundary_quadrature(8, 0.05).params)
        CHECK_FALSE(dom.near_corner(s, 1e-9));
}

TEST_CASE("chart minor convergence demo") {
    auto u = [](const Vec2& x) {
        return Eigen::Vector3d(x(0) + 0.2 * x(1), x(1), 0.3 * x(0) * x(1));
    };
    auto du = [](const Vec2& x) {
        Eigen::Matrix<double, 3, 2> J;
        J << 1.0, 0.2, 0.0, 1.0, 0.3 * x(1), 0.3 * x(0);
        return J;
    };
    auto eta = [](const Vec2& x) { return 1.0 + x(0) - 0.5 * x(1); };

    // zero oscillation: constant sequence, all gaps vanish
    auto flat = chart_minor_convergence_demo(1.0, u, du, {2, 4, 8}, eta, 0.0);
    for (const auto& row : flat) CHECK(row.gap == doctest::Approx(0.0));

    // rising frequency: gaps fall toward zero
    auto rows = chart_minor_convergence_demo(1.0, u, du, {4, 8, 16, 32}, eta, 1.0);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].gap > 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].gap < rows[i - 1].gap);
    // roughly first order in 1/n overall
    CHECK(rows[3].gap < 0.5 * rows[0].gap);
}
