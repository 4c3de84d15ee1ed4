#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "polymin/minimize.hpp"

using namespace polymin;

namespace {

// quadratic bulk density for the scaling test; not part of the catalog
BulkDensity W_quadratic() {
    BulkDensity W;
    W.name = "quadratic";
    W.p = 2.0;
    W.c1 = 1.0;
    W.a1 = [](const Vec2&) { return 0.0; };
    W.h_det = [](double) { return 0.0; };
    W.value = [](const Vec2&, const Vec2&, const Mat2& F) { return F.squaredNorm(); };
    W.gradient = [](const Vec2&, const Vec2&, const Mat2& F) { return Mat2(2.0 * F); };
    return W;
}

} // namespace

TEST_CASE("triangulation of rectangles") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.5);
    CHECK(mesh.num_triangles() >= 8);
    double area = 0;
    for (double a : mesh.areas) area += a;
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mesh.h <= 0.5 + 1e-12);
    CHECK(mesh.min_quality >= 0.2);

    auto rect = maps::counterexample_domain();
    auto rmesh = triangulate(rect, 0.1);
    double perim = 0;
    for (const auto& e : rmesh.boundary_edges) perim += e.length;
    CHECK(perim == doctest::Approx(6.0).epsilon(1e-12));

    // boundary loop is closed and ccw, weights sum to the perimeter
    double wsum = 0;
    for (double w : rmesh.boundary_weight) wsum += w;
    CHECK(wsum == doctest::Approx(6.0).epsilon(1e-12));

    CHECK_THROWS_AS(triangulate(Domain2D::unit_disk(), 0.1), ValidationError);
}

TEST_CASE("triangulation of a convex polygon") {
    auto hex = Domain2D::polygon({{1, 0}, {0.5, 0.87}, {-0.5, 0.87}, {-1, 0},
                                  {-0.5, -0.87}, {0.5, -0.87}});
    auto mesh = triangulate(hex, 0.3);
    CHECK(mesh.h <= 0.3 + 1e-12);
    CHECK(mesh.min_quality >= 0.2);
    double area = 0;
    for (double a : mesh.areas) area += a;
    CHECK(area == doctest::Approx(hex.area()).epsilon(1e-12));
}

TEST_CASE("assembly: identity is discretely stationary for the standard density") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.15);
    auto u = nodal_identity(mesh);
    auto W = W_standard();

    auto asm0 = assemble_energy_and_gradient(u, W, U_zero());
    CHECK(asm0.energy == doctest::Approx(4.0).epsilon(1e-12));
    // constant stress is discretely divergence-free at interior nodes
    double interior_norm = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (!mesh.is_boundary[static_cast<std::size_t>(v)])
            interior_norm += asm0.gradient.col(v).squaredNorm();
    CHECK(std::sqrt(interior_norm) <= 1e-8);
}

TEST_CASE("assembly gradient matches finite differences") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.35);
    auto W = W_standard();
    auto U = U_coercive(U_pressure(), 0.5, 2.0);

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> pert(-0.05, 0.05);

    for (int trial = 0; trial < 10; ++trial) {
        auto u = nodal_identity(mesh);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            u.nodal.col(v) += Vec2(pert(rng), pert(rng));
        if (u.min_det() <= 0.1) continue;

        auto a = assemble_energy_and_gradient(u, W, U);
        REQUIRE(a.feasible);
        const double h = 1e-6;
        double worst = 0;
        for (int v = 0; v < mesh.num_vertices(); v += 7) // sample of nodes
            for (int c = 0; c < 2; ++c) {
                auto up = u, um = u;
                up.nodal(c, v) += h;
                um.nodal(c, v) -= h;
                const double ep = assemble_energy_and_gradient(up, W, U).energy;
                const double em = assemble_energy_and_gradient(um, W, U).energy;
                const double fd = (ep - em) / (2 * h);
                worst = std::max(worst,
                                 std::abs(fd - a.gradient(c, v)) /
                                     std::max(1.0, std::abs(a.gradient(c, v))));
            }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("quadratic scaling of the pure Dirichlet energy") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.25);
    auto u = nodal_identity(mesh);
    auto Wq = W_quadratic();
    const double e1 = assemble_energy_and_gradient(u, Wq, U_zero()).energy;
    u.nodal *= 2.0;
    const double e2 = assemble_energy_and_gradient(u, Wq, U_zero()).energy;
    CHECK(e2 == doctest::Approx(4.0 * e1).epsilon(1e-12));
}

TEST_CASE("constraint projections") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.3);

    // A2: constant field projects to zero
    auto u = nodal_identity(mesh);
    u.nodal.setZero();
    u.nodal.row(0).setConstant(3.0);
    u.nodal.row(1).setConstant(-2.0);
    auto a2 = Constraint::zero_boundary_mean();
    project_constraint(u, a2);
    CHECK(u.nodal.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(constraint_residual(u, a2) <= 1e-12);

    // A1: Dirichlet vertices pinned to the data
    auto v = nodal_identity(mesh);
    v.nodal.array() += 0.5;
    auto a1 = Constraint::dirichlet_boundary(mesh, [](const Vec2& x) { return x; });
    project_constraint(v, a1);
    CHECK(constraint_residual(v, a1) <= 1e-12);
    for (int b : mesh.boundary_loop)
        CHECK((v.nodal.col(b) - mesh.vertices[static_cast<std::size_t>(b)]).norm() <= 1e-12);

    // A3: radial clip onto the unit disk
    auto w = nodal_identity(mesh);
    w.nodal.col(0) = Vec2(2.0, 0.0);
    auto a3 = Constraint::confined(ConvexRegion::disk({0, 0}, 1.0));
    project_constraint(w, a3);
    CHECK((w.nodal.col(0) - Vec2(1.0, 0.0)).norm() <= 1e-12);
    CHECK(constraint_residual(w, a3) <= 1e-12);

    auto empty_gamma = Constraint{};
    empty_gamma.cls = ConstraintClass::A1;
    CHECK_THROWS_AS(project_constraint(w, empty_gamma), ValidationError);
}

TEST_CASE("minimize: identity Dirichlet data is already optimal") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.1);
    auto c = Constraint::dirichlet_boundary(mesh, [](const Vec2& x) { return x; });
    auto res = minimize(mesh, W_standard(), U_zero(), c);

    CHECK(res.converged);
    CHECK(res.trace.back().grad_norm <= 1e-6);
    CHECK(res.trace.back().energy <= 4.0 + 1e-6);
    CHECK(res.trace.back().min_det >= 0.5);
}

TEST_CASE("minimize: contracted Dirichlet data conserves the det integral") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.12);
    auto c = Constraint::dirichlet_boundary(mesh, [](const Vec2& x) { return Vec2(0.8 * x); });
    SolveOptions opts;
    opts.max_iter = 120;
    auto res = minimize(mesh, W_standard(), U_zero(), c, opts);

    // fixed boundary: the det integral is a null Lagrangian, 0.64 |Omega|
    CHECK(res.solution.det_integral() == doctest::Approx(0.64).epsilon(1e-10));

    // energy strictly non-increasing along accepted iterates
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].energy <= res.trace[i - 1].energy);
    // determinant safeguard held
    for (const auto& row : res.trace) CHECK(row.min_det > 1e-8);
    // constraint exact after every projection
    for (const auto& row : res.trace) CHECK(row.constraint_residual <= 1e-12);
}

TEST_CASE("minimize under the confinement class keeps every vertex inside") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.15);
    auto region = ConvexRegion::box({0.05, 0.05}, {0.8, 0.8});
    auto c = Constraint::confined(region);
    SolveOptions opts;
    opts.max_iter = 80;
    auto res = minimize(mesh, W_standard(), U_zero(), c, opts);

    for (int v = 0; v < mesh.num_vertices(); ++v)
        CHECK(region.violation(res.solution.nodal.col(v)) <= 1e-12);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].energy <= res.trace[i - 1].energy);
}

TEST_CASE("minimize under the zero-boundary-mean class") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.2);
    auto c = Constraint::zero_boundary_mean();
    SolveOptions opts;
    opts.max_iter = 60;
    auto res = minimize(mesh, W_standard(), U_zero(), c, opts);
    CHECK(constraint_residual(res.solution, c) <= 1e-10);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].energy <= res.trace[i - 1].energy);
}

TEST_CASE("null Lagrangian: det integral depends only on boundary values") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    auto mesh = triangulate(sq, 0.2);
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> pert(-0.04, 0.04);

    // identity boundary, random interior fillings
    std::vector<DiscreteDeformation> fields;
    fields.push_back(nodal_identity(mesh));
    for (int k = 0; k < 3; ++k) {
        auto u = nodal_identity(mesh);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            if (!mesh.is_boundary[static_cast<std::size_t>(v)])
                u.nodal.col(v) += Vec2(pert(rng), pert(rng));
        fields.push_back(u);
    }
    CHECK(null_lagrangian_check(fields) <= 1e-10);

    // contracted boundary at factor 0.8: volume 0.64
    std::vector<DiscreteDeformation> contracted;
    for (int k = 0; k < 2; ++k) {
        auto u = nodal_identity(mesh);
        u.nodal *= 0.8;
        for (int v = 0; v < mesh.num_vertices(); ++v)
            if (!mesh.is_boundary[static_cast<std::size_t>(v)])
                u.nodal.col(v) += Vec2(pert(rng), pert(rng));
        contracted.push_back(u);
    }
    CHECK(null_lagrangian_check(contracted) <= 1e-10);
    CHECK(contracted.front().det_integral() == doctest::Approx(0.64).epsilon(1e-12));

    // differing boundary values are rejected
    auto other = nodal_identity(mesh);
    other.nodal *= 0.9;
    CHECK_THROWS_AS(null_lagrangian_check({fields.front(), other}), ValidationError);
}

TEST_CASE("mesh refinement keeps the minimized energy non-increasing") {
    auto sq = Domain2D::rectangle(0, 1, 0, 1);
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {0.4, 0.2, 0.1}) {
        auto mesh = triangulate(sq, h);
        auto c = Constraint::dirichlet_boundary(mesh, [](const Vec2& x) { return x; });
        auto res = minimize(mesh, W_standard(), U_zero(), c);
        CHECK(res.trace.back().energy <= prev + 1e-6);
        prev = res.trace.back().energy;
    }
}
