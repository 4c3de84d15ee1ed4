#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "polymin/energy.hpp"

using namespace polymin;

namespace {

Matrix random_frame(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix A(d, d);
    for (Eigen::Index i = 0; i < A.size(); ++i) A(i) = u(rng);
    const Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ();
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    return Q;
}

Matrix random_tangential(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix F(d, d - 1);
    for (Eigen::Index i = 0; i < F.size(); ++i) F(i) = u(rng);
    return F;
}

} // namespace

TEST_CASE("bulk density values and blow-up") {
    auto W = W_standard();
    const Vec2 x(0, 0), y(0, 0);
    CHECK(W.value(x, y, Mat2::Identity()) == doctest::Approx(4.0));

    // det -> 0+ blows up along diag(1, t)
    double prev = 0;
    for (double t : {1e-2, 1e-4, 1e-6}) {
        Mat2 F = Mat2::Identity();
        F(1, 1) = t;
        const double w = W.value(x, y, F);
        CHECK(w > prev);
        prev = w;
    }
    CHECK(prev > 1e5);

    Mat2 flipped = Mat2::Identity();
    flipped(0, 0) = -1.0;
    CHECK_THROWS_AS(W.value(x, y, flipped), EvaluationError);

    // h(t) limit conditions sampled over twelve decades
    for (double t : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
        CHECK(W.h_det(t) > 0);
        if (t <= 1e-6) CHECK(W.h_det(t) >= 1e6);
        if (t >= 1e6) CHECK(W.h_det(t) / t >= 1e6 - 1);
    }
}

TEST_CASE("bulk gradient matches finite differences") {
    auto W = W_standard();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec2 x(0, 0), y(0, 0);
    int accepted = 0;
    while (accepted < 100) {
        Mat2 F;
        for (int i = 0; i < 4; ++i) F(i / 2, i % 2) = 2.0 * u(rng);
        const double det = F.determinant();
        if (det < 0.2 || det > 5.0) continue;
        ++accepted;
        const Mat2 G = W.gradient(x, y, F);
        Mat2 fd;
        const double h = 1e-6;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Mat2 Fp = F, Fm = F;
                Fp(i, j) += h;
                Fm(i, j) -= h;
                fd(i, j) = (W.value(x, y, Fp) - W.value(x, y, Fm)) / (2 * h);
            }
        CHECK((G - fd).norm() / G.norm() <= 1e-6);
    }
}

TEST_CASE("pressure density: linear in minors, matches cof_normal") {
    auto U = U_pressure();
    std::mt19937_64 rng(37);

    // F = 0 gives 0
    const Matrix frame2 = Matrix::Identity(2, 2);
    CHECK(U.value(frame2, Vector::Ones(2), Matrix::Zero(2, 1)) == doctest::Approx(0.0));

    // d=2, y=(0,1), cof_normal = (0, 2) from F = (2, 0) in the frame
    Matrix F(2, 1);
    F << 2.0, 0.0;
    CHECK((cof_normal(F, frame2) - Vector(Vec2(0, 2))).norm() < 1e-14);
    CHECK(U.value(frame2, Vector(Vec2(0, 1)), F) == doctest::Approx(2.0));

    // equals pi(y) y . cof_normal(F) for random d = 2, 3
    for (int d = 2; d <= 3; ++d) {
        for (int trial = 0; trial < 50; ++trial) {
            const Matrix frame = random_frame(d, rng);
            const Matrix Ft = random_tangential(d, rng);
            Vector y(d);
            for (int i = 0; i < d; ++i) y(i) = std::sin(0.7 * trial + i);
            const double want = y.dot(cof_normal(Ft, frame));
            CHECK(U.value(frame, y, Ft) == doctest::Approx(want).epsilon(1e-12));
            // minor representation agrees
            CHECK(U.phi(frame, y, minors(Ft)) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("membrane density: norm of the cofactor column") {
    auto U = U_membrane(1.0);
    const Matrix frame3 = Matrix::Identity(3, 3);

    CHECK(U.value(frame3, Vector::Zero(3), Matrix::Zero(3, 2)) == doctest::Approx(0.0));

    // tangential identity: |cof n| = 1
    Matrix F = Matrix::Identity(3, 3).leftCols(2);
    CHECK(U.value(frame3, Vector::Zero(3), F) == doctest::Approx(1.0));

    // scaling by t multiplies the order-2 minors by t^2
    for (double t : {0.5, 2.0, 3.0})
        CHECK(U.value(frame3, Vector::Zero(3), Matrix(t * F)) == doctest::Approx(t * t));

    // minor representation for random tangential matrices
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix Ft = random_tangential(3, rng);
        const double direct = U.value(frame3, Vector::Zero(3), Ft);
        CHECK(direct == doctest::Approx(cof_normal_frame(Ft).norm()).epsilon(1e-13));
        CHECK(U.phi(frame3, Vector::Zero(3), minors(Ft)) ==
              doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("coercive wrapper restores the lower bound") {
    auto base = U_membrane(1.0);
    auto U = U_coercive(base, 1.0, 2.0);
    const Matrix frame3 = Matrix::Identity(3, 3);

    CHECK(U.value(frame3, Vector::Zero(3), Matrix::Zero(3, 2)) == doctest::Approx(0.0));

    // membrane base, c=1, p=2, tangential identity in d=3: 1 + |F|^2 = 3
    Matrix F = Matrix::Identity(3, 3).leftCols(2);
    CHECK(U.value(frame3, Vector::Zero(3), F) == doctest::Approx(1.0 + 2.0));

    CHECK(surface_coercivity_margin(U, 3, 1000, 5) >= 0.0);
    CHECK(surface_coercivity_margin(U, 2, 1000, 5) >= 0.0);

    CHECK_THROWS_AS(U_coercive(base, -1.0, 2.0), ValidationError);
    CHECK_THROWS_AS(U_coercive(base, 1.0, 0.5), ValidationError);
}

TEST_CASE("coercivity of the bulk catalog") {
    CHECK(bulk_coercivity_margin(W_standard(), 1000, 7) >= 0.0);
}

TEST_CASE("convexity probe") {
    // linear representative (pressure-like): no violation
    auto linear = [](const Vector& m) { return 1.5 * m.sum(); };
    CHECK(convexity_probe(linear, 9, 2000, 3) <= 1e-12);

    // euclidean norm (membrane-like): convex
    auto norm = [](const Vector& m) { return m.norm(); };
    CHECK(convexity_probe(norm, 9, 2000, 3) <= 1e-12);

    // planted non-convex control: -|m|^2 violates by lam(1-lam)|m1-m2|^2
    auto concave = [](const Vector& m) { return -m.squaredNorm(); };
    const double v = convexity_probe(concave, 9, 2000, 3);
    CHECK(v >= 0.1);

    // closed form at a deterministic pair
    Vector m1 = Vector::Zero(4), m2 = Vector::Ones(4);
    const double lam = 0.25;
    const double gap = -(lam * m1 + (1 - lam) * m2).squaredNorm() +
                       lam * m1.squaredNorm() + (1 - lam) * m2.squaredNorm();
    CHECK(gap == doctest::Approx(lam * (1 - lam) * (m1 - m2).squaredNorm()));
}

TEST_CASE("frame independence through Cauchy-Binet transport") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3;
        const Matrix frame = random_frame(d, rng);
        const Matrix Ft = random_tangential(d, rng);
        Vector y(d);
        for (int i = 0; i < d; ++i) y(i) = u(rng);

        // rotate the tangent sub-basis by R, normal fixed
        const double th = u(rng);
        Matrix R(2, 2);
        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Matrix frame2 = frame;
        frame2.leftCols(2) = frame.leftCols(2) * R;
        // new representation: columns mix by R, target components rotate back
        Matrix T = Matrix::Identity(d, d);
        T.topLeftCorner(2, 2) = R;
        const Matrix Ft2 = T.transpose() * Ft * R;

        for (const auto& U : {U_pressure(), U_membrane(0.7),
                              U_coercive(U_membrane(0.7), 0.3, 2.0)}) {
            const double a = U.value(frame, y, Ft);
            const double b = U.value(frame2, y, Ft2);
            CHECK(a == doctest::Approx(b).epsilon(1e-10));
        }
    }
}

TEST_CASE("tangential quasiconvexity surrogate for the membrane energy") {
    // piecewise-affine fields on a fan over the unit disk in the tangent
    // parameter plane, matching the affine data F0 on the boundary polygon:
    // the averaged energy dominates the affine energy
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto U = U_membrane(1.0);
    const Matrix frame3 = Matrix::Identity(3, 3);

    const int n = 16; // boundary vertices of the fan
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix F0 = random_tangential(3, rng);
        // center node perturbed off the affine position
        Eigen::Vector3d center = Eigen::Vector3d::Zero();
        for (int i = 0; i < 3; ++i) center(i) = 0.4 * u(rng);

        double area_total = 0.0, energy = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t0 = 2 * std::numbers::pi * i / n;
            const double t1 = 2 * std::numbers::pi * (i + 1) / n;
            const Vec2 a(std::cos(t0), std::sin(t0));
            const Vec2 b(std::cos(t1), std::sin(t1));
            // affine field on triangle (0, a, b) with w(0) = center
            Mat2 E;
            E.col(0) = a;
            E.col(1) = b;
            Matrix W3(3, 2);
            W3.col(0) = Matrix(F0 * a) - center;
            W3.col(1) = Matrix(F0 * b) - center;
            const Matrix Dw = W3 * E.inverse();
            const double area = 0.5 * std::abs(a(0) * b(1) - a(1) * b(0));
            area_total += area;
            energy += area * U.value(frame3, Vector::Zero(3), Dw);
        }
        const double affine = U.value(frame3, Vector::Zero(3), F0);
        CHECK(energy / area_total >= affine - 1e-12);
    }
}

TEST_CASE("functional evaluation") {
    auto dom = Domain2D::rectangle(0, 1, 0, 1);
    auto W = W_standard();

    auto breakdown = eval_functional(maps::identity(), dom, W, U_zero(), 0.1, 0.1);
    CHECK(breakdown.bulk == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(breakdown.surface == doctest::Approx(0.0));
    CHECK(breakdown.total == doctest::Approx(4.0).epsilon(1e-12));

    // membrane with eps0 = 1: |cof_normal| = 1 on each edge, surface = perimeter
    auto with_membrane = eval_functional(maps::identity(), dom, W, U_membrane(1.0), 0.1, 0.1);
    CHECK(with_membrane.surface == doctest::Approx(4.0).epsilon(1e-6));

    // affine u = 2x: W(2I) = 8 + 16 + 1/4
    auto scaled = eval_functional(maps::scaling(2.0), dom, W, U_zero(), 0.1, 0.1);
    CHECK(scaled.bulk == doctest::Approx(24.25).epsilon(1e-12));

    // orientation-reversing map is infeasible
    Mat2 flip;
    flip << -1, 0, 0, 1;
    CHECK_THROWS_AS(eval_functional(maps::affine(flip, Vec2(0, 0)), dom, W, U_zero(), 0.1, 0.1),
                    EvaluationError);
}
