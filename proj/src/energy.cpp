#include "polymin/energy.hpp"

#include <cmath>
#include <random>

namespace polymin {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Mat2 adj2(const Mat2& F) {
    Mat2 a;
    a << F(1, 1), -F(0, 1), -F(1, 0), F(0, 0);
    return a;
}

/// order-(d-1) minor block of M(F) for a d x (d-1) matrix, row-lex order
Vector top_block(const MinorVector& mv) {
    const int d = mv.rows;
    return mv.values.tail(d);
}

/// frame components of (cof Ftilde) n recovered from the minor vector:
/// w_i = (-1)^{d-1-i} * (minor omitting row i), the omit-i minor sitting at
/// lex rank d-1-i of the top block
Vector cof_from_minors(const MinorVector& mv) {
    const int d = mv.rows;
    const Vector block = top_block(mv);
    Vector w(d);
    for (int i = 0; i < d; ++i) {
        const double sign = ((d - 1 - i) % 2 == 0) ? 1.0 : -1.0;
        w(i) = sign * block(d - 1 - i);
    }
    return w;
}

void check_frame_matrix(const Matrix& frame, const Matrix& F) {
    if (frame.rows() != F.rows() || F.cols() != F.rows() - 1)
        throw ValidationError("surface density: F must be d x (d-1) in the given frame");
}

} // namespace

BulkDensity W_standard() {
    BulkDensity W;
    W.name = "standard";
    W.p = 2.0;
    W.c1 = 1.0;
    W.a1 = [](const Vec2&) { return 0.0; };
    W.h_det = [](double t) { return t * t + 1.0 / t; };
    W.value = [](const Vec2&, const Vec2&, const Mat2& F) {
        const double det = F.determinant();
        if (det <= 0.0) throw EvaluationError("W_standard: infeasible state, det F <= 0");
        return F.squaredNorm() + det * det + 1.0 / det;
    };
    W.gradient = [](const Vec2&, const Vec2&, const Mat2& F) {
        const double det = F.determinant();
        if (det <= 0.0) throw EvaluationError("W_standard: infeasible state, det F <= 0");
        // d(det)/dF = cof F
        const Mat2 cof = adj2(F).transpose();
        return Mat2(2.0 * F + (2.0 * det - 1.0 / (det * det)) * cof);
    };
    return W;
}

PressureFn constant_pressure(double value) {
    return {[value](const Vector&) { return value; },
            [](const Vector& y) { return Vector(Vector::Zero(y.size())); }};
}

SurfaceDensity U_zero() {
    SurfaceDensity U;
    U.name = "zero";
    U.c2 = 0.0;
    U.value = [](const Matrix&, const Vector&, const Matrix&) { return 0.0; };
    U.grad_F = [](const Matrix&, const Vector&, const Matrix& F) {
        return Matrix(Matrix::Zero(F.rows(), F.cols()));
    };
    U.grad_y = [](const Matrix&, const Vector& y, const Matrix&) {
        return Vector(Vector::Zero(y.size()));
    };
    U.phi = [](const Matrix&, const Vector&, const MinorVector&) { return 0.0; };
    return U;
}

SurfaceDensity U_pressure(PressureFn pi) {
    SurfaceDensity U;
    U.name = "pressure";
    U.c2 = 0.0;
    U.value = [pi](const Matrix& frame, const Vector& y, const Matrix& F) {
        check_frame_matrix(frame, F);
        return pi.value(y) * y.dot(frame * cof_normal_frame(F));
    };
    U.grad_F = [pi](const Matrix& frame, const Vector& y, const Matrix& F) {
        check_frame_matrix(frame, F);
        if (F.rows() != 2)
            throw ValidationError("U_pressure: analytic F-gradient is planar only");
        // planar: U = pi(y) [ -F(1,0) y.v + F(0,0) y.n ]
        const Vector yf = frame.transpose() * y;
        Matrix g(2, 1);
        g << pi.value(y) * yf(1), -pi.value(y) * yf(0);
        return g;
    };
    U.grad_y = [pi](const Matrix& frame, const Vector& y, const Matrix& F) {
        const Vector cof = frame * cof_normal_frame(F);
        return Vector(pi.gradient(y) * y.dot(cof) + pi.value(y) * cof);
    };
    U.phi = [pi](const Matrix& frame, const Vector& y, const MinorVector& mv) {
        return pi.value(y) * (frame.transpose() * y).dot(cof_from_minors(mv));
    };
    return U;
}

SurfaceDensity U_membrane(double eps0) {
    if (eps0 <= 0) throw ValidationError("U_membrane: eps0 must be positive");
    SurfaceDensity U;
    U.name = "membrane";
    U.c2 = 0.0;
    U.value = [eps0](const Matrix& frame, const Vector&, const Matrix& F) {
        check_frame_matrix(frame, F);
        return eps0 * cof_normal_frame(F).norm();
    };
    U.grad_F = [eps0](const Matrix& frame, const Vector&, const Matrix& F) {
        check_frame_matrix(frame, F);
        if (F.rows() != 2)
            throw ValidationError("U_membrane: analytic F-gradient is planar only");
        // planar: |cof_normal| = |F|
        const double n = F.norm();
        if (n < 1e-300) return Matrix(Matrix::Zero(2, 1));
        return Matrix(eps0 * F / n);
    };
    U.grad_y = [](const Matrix&, const Vector& y, const Matrix&) {
        return Vector(Vector::Zero(y.size()));
    };
    U.phi = [eps0](const Matrix&, const Vector&, const MinorVector& mv) {
        return eps0 * top_block(mv).norm();
    };
    return U;
}

SurfaceDensity U_coercive(SurfaceDensity base, double c, double p) {
    if (c <= 0) throw ValidationError("U_coercive: c must be positive");
    if (p <= 1) throw ValidationError("U_coercive: p must exceed 1");
    SurfaceDensity U;
    U.name = base.name + "+coercive";
    U.p = p;
    U.c2 = c;
    U.value = [base, c, p](const Matrix& frame, const Vector& y, const Matrix& F) {
        return base.value(frame, y, F) + c * std::pow(F.norm(), p);
    };
    U.grad_F = [base, c, p](const Matrix& frame, const Vector& y, const Matrix& F) {
        Matrix g = base.grad_F(frame, y, F);
        const double n = F.norm();
        if (n > 1e-300) g += c * p * std::pow(n, p - 2.0) * F;
        return g;
    };
    U.grad_y = base.grad_y;
    U.phi = [base, c, p](const Matrix& frame, const Vector& y, const MinorVector& mv) {
        // |F|^p through the order-1 minors: exactly the entries of F
        const auto layout = minor_layout(mv.rows, mv.cols);
        double sq = 0.0;
        for (std::size_t i = 0; i < layout.size(); ++i)
            if (layout[i].order == 1) {
                const double m = mv.values(static_cast<Eigen::Index>(i));
                sq += m * m;
            }
        return base.phi(frame, y, mv) + c * std::pow(std::sqrt(sq), p);
    };
    return U;
}

double convexity_probe(const std::function<double(const Vector&)>& phi, int dim,
                       int trials, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("convexity_probe: trials must be >= 1");
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vector m1(dim), m2(dim);
        for (int i = 0; i < dim; ++i) {
            m1(i) = 2.0 * uniform01(rng) - 1.0;
            m2(i) = 2.0 * uniform01(rng) - 1.0;
        }
        const double lam = 0.999 * uniform01(rng) + 0.0005;
        const double mid = phi(lam * m1 + (1.0 - lam) * m2);
        const double chord = lam * phi(m1) + (1.0 - lam) * phi(m2);
        worst = std::max(worst, mid - chord);
    }
    return worst;
}

double bulk_coercivity_margin(const BulkDensity& W, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    int accepted = 0;
    while (accepted < trials) {
        Mat2 F;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) F(i, j) = 4.0 * uniform01(rng) - 2.0;
        if (F.determinant() <= 0.05) continue;
        ++accepted;
        const Vec2 x(uniform01(rng), uniform01(rng));
        const Vec2 y(uniform01(rng), uniform01(rng));
        const double bound =
            W.a1(x) + W.c1 * std::pow(F.norm(), W.p) + W.h_det(F.determinant());
        worst = std::min(worst, W.value(x, y, F) - bound);
    }
    return worst;
}

double surface_coercivity_margin(const SurfaceDensity& U, int dim, int trials,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Matrix frame = Matrix::Identity(dim, dim);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Matrix F(dim, dim - 1);
        for (Eigen::Index i = 0; i < F.size(); ++i)
            F(i) = 4.0 * uniform01(rng) - 2.0;
        Vector y(dim);
        for (int i = 0; i < dim; ++i) y(i) = 2.0 * uniform01(rng) - 1.0;
        const double bound = U.c2 * std::pow(F.norm(), U.p);
        worst = std::min(worst, U.value(frame, y, F) - bound);
    }
    return worst;
}

EnergyBreakdown eval_functional(const Deformation& def, const Domain2D& dom,
                                const BulkDensity& W, const SurfaceDensity& U,
                                double h_interior, double h_boundary) {
    EnergyBreakdown out;
    const auto iq = dom.interior_quadrature(h_interior);
    for (std::size_t q = 0; q < iq.points.size(); ++q) {
        const Vec2& x = iq.points[q];
        out.bulk += iq.weights[q] * W.value(x, def(x), def.gradient(x));
    }
    out.interior_nodes = static_cast<int>(iq.points.size());

    const auto bq = dom.boundary_quadrature(4, h_boundary);
    const double spacing = dom.perimeter() / static_cast<double>(bq.points.size());
    for (std::size_t q = 0; q < bq.points.size(); ++q) {
        const double s = bq.params[q];
        const TangentFrame frame = dom.frame_at(s);
        const Matrix F = trace_tangential_derivative(def, dom, s, spacing);
        out.surface +=
            bq.weights[q] * U.value(frame.basis(), Vector(def(frame.point)), F);
    }
    out.boundary_nodes = static_cast<int>(bq.points.size());
    out.total = out.bulk + out.surface;
    return out;
}

} // namespace polymin
