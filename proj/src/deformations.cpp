#include "polymin/deformations.hpp"

#include <cmath>
#include <numbers>

namespace polymin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBranchTol = 1e-12;
} // namespace

Deformation::Deformation(std::string name, ValueFn value, GradFn grad,
                         std::string smoothness, DistFn branch_distance)
    : name_(std::move(name)),
      value_(std::move(value)),
      grad_(std::move(grad)),
      smoothness_(std::move(smoothness)),
      branch_distance_(std::move(branch_distance)) {}

Deformation Deformation::with_numeric_gradient(std::string name, ValueFn value,
                                               double h_fd, std::string smoothness) {
    ValueFn v = value;
    GradFn g = [v, h_fd](const Vec2& x) {
        Mat2 J;
        for (int j = 0; j < 2; ++j) {
            Vec2 e = Vec2::Zero();
            e(j) = h_fd;
            J.col(j) = (v(x + e) - v(x - e)) / (2.0 * h_fd);
        }
        return GradientResult{J, false};
    };
    return Deformation(std::move(name), std::move(value), std::move(g),
                       std::move(smoothness));
}

Mat2 Deformation::adjugate(const Vec2& x) const {
    const Mat2 J = gradient(x);
    Mat2 adj;
    adj << J(1, 1), -J(0, 1), -J(1, 0), J(0, 0);
    return adj;
}

Mat2 Deformation::cofactor(const Vec2& x) const {
    return adjugate(x).transpose();
}

double Deformation::branch_distance(const Vec2& x) const {
    return branch_distance_ ? branch_distance_(x) : kInf;
}

Deformation compose(const Deformation& outer, const Deformation& inner) {
    auto value = [outer, inner](const Vec2& x) { return outer(inner(x)); };
    auto grad = [outer, inner](const Vec2& x) {
        const GradientResult gi = inner.gradient_flagged(x);
        const GradientResult go = outer.gradient_flagged(inner(x));
        return GradientResult{go.jacobian * gi.jacobian,
                              gi.on_branch_boundary || go.on_branch_boundary};
    };
    auto dist = [outer, inner](const Vec2& x) {
        return std::min(inner.branch_distance(x), outer.branch_distance(inner(x)));
    };
    return Deformation(outer.name() + "∘" + inner.name(), std::move(value), std::move(grad),
                       "piecewise", std::move(dist));
}

namespace maps {

Deformation identity() {
    return Deformation(
        "identity", [](const Vec2& x) { return x; },
        [](const Vec2&) { return GradientResult{Mat2::Identity(), false}; });
}

Deformation affine(const Mat2& A, const Vec2& b) {
    return Deformation(
        "affine", [A, b](const Vec2& x) { return Vec2(A * x + b); },
        [A](const Vec2&) { return GradientResult{A, false}; });
}

Deformation scaling(double factor) {
    return affine(factor * Mat2::Identity(), Vec2::Zero());
}

Deformation sine_shear() {
    return Deformation(
        "sine-shear",
        [](const Vec2& x) { return Vec2(x(0) + 0.1 * std::sin(x(1)), x(1)); },
        [](const Vec2& x) {
            Mat2 J;
            J << 1.0, 0.1 * std::cos(x(1)), 0.0, 1.0;
            return GradientResult{J, false};
        });
}

Deformation fold() {
    return Deformation(
        "fold", [](const Vec2& x) { return Vec2(std::abs(x(0)), x(1)); },
        [](const Vec2& x) {
            Mat2 J;
            J << (x(0) >= 0 ? 1.0 : -1.0), 0.0, 0.0, 1.0;
            return GradientResult{J, std::abs(x(0)) < kBranchTol};
        },
        "piecewise", [](const Vec2& x) { return std::abs(x(0)); });
}

Deformation cavity_opener() {
    auto value = [](const Vec2& x) {
        const double m = x.cwiseAbs().maxCoeff();
        if (m == 0.0) throw EvaluationError("u1 is singular at the origin");
        return Vec2((m + 3.0) / (4.0 * m) * x);
    };
    auto grad = [](const Vec2& x) {
        const double a0 = std::abs(x(0)), a1 = std::abs(x(1));
        const double m = std::max(a0, a1);
        if (m == 0.0) throw EvaluationError("u1 is singular at the origin");
        const double f = (m + 3.0) / (4.0 * m);
        // grad |x|_inf = sign(x_i) e_i at the active coordinate
        const int i = a0 >= a1 ? 0 : 1;
        Vec2 gm = Vec2::Zero();
        gm(i) = x(i) >= 0 ? 1.0 : -1.0;
        const Vec2 gf = -(3.0 / (4.0 * m * m)) * gm;
        Mat2 J = f * Mat2::Identity() + x * gf.transpose();
        return GradientResult{J, std::abs(a0 - a1) < kBranchTol};
    };
    auto dist = [](const Vec2& x) {
        // kink across |x1| = |x2| and blow-up at the origin
        return std::min(std::abs(std::abs(x(0)) - std::abs(x(1))), x.norm());
    };
    return Deformation("u1", std::move(value), std::move(grad), "piecewise",
                       std::move(dist));
}

Deformation cavity_grip() {
    auto value = [](const Vec2& x) {
        if (std::abs(x(0)) >= 0.75) return x;
        return Vec2(x(0), 1.0 - (1.0 - x(1)) * (7.0 - 8.0 * std::abs(x(0))));
    };
    auto grad = [](const Vec2& x) {
        Mat2 J = Mat2::Identity();
        const double a = std::abs(x(0));
        if (a < 0.75) {
            const double s = x(0) >= 0 ? 1.0 : -1.0;
            J(1, 0) = 8.0 * s * (1.0 - x(1));
            J(1, 1) = 7.0 - 8.0 * a;
        }
        return GradientResult{J, std::abs(a - 0.75) < kBranchTol ||
                                     (a < 0.75 && a < kBranchTol)};
    };
    auto dist = [](const Vec2& x) {
        const double a = std::abs(x(0));
        return std::min(std::abs(a - 0.75), a); // |x1| = 3/4 interfaces and the x1 = 0 kink
    };
    return Deformation("u2", std::move(value), std::move(grad), "piecewise",
                       std::move(dist));
}

namespace {

// branch selector for u3; returns 1..4 in the printed order
int u3_branch(const Vec2& x) {
    const double a = std::abs(x(0));
    if (x(1) >= 0 && x(1) < 0.75 && a > 0.75) return 1;
    if (a < (4.0 * x(1) + 3.0) / 8.0) {
        if (x(1) >= 0 && x(1) < 0.75) return 2;
        if (x(1) >= -0.25 && x(1) < 0) return 3;
    }
    return 4;
}

} // namespace

Deformation cavity_closer() {
    auto value = [](const Vec2& x) {
        const double s = x(0) >= 0 ? 1.0 : -1.0;
        const double a = std::abs(x(0));
        switch (u3_branch(x)) {
        case 1:
            return Vec2(0.5 * (s * (1.0 - 4.0 * (1.0 - a) * (1.0 - x(1))) + 3.0),
                        2.0 * x(1) - 1.0);
        case 2:
            return Vec2(4.0 * x(0) * x(1) / (4.0 * x(1) + 3.0) + 1.5, 2.0 * x(1) - 1.0);
        case 3:
            return Vec2(-4.0 * x(0) * x(1) / (4.0 * x(1) + 3.0) + 1.5, 2.0 * x(1) - 1.0);
        default:
            return Vec2(0.5 * (x(0) + 3.0), 2.0 * x(1) - 1.0);
        }
    };
    auto dist = [](const Vec2& x) {
        const double a = std::abs(x(0));
        double d = std::min({std::abs(x(1)), std::abs(x(1) - 0.75), std::abs(x(1) + 0.25)});
        d = std::min(d, std::abs(a - 0.75));
        d = std::min(d, std::abs(a - (4.0 * x(1) + 3.0) / 8.0));
        d = std::min(d, a); // sign switch / kink across x1 = 0
        return d;
    };
    auto grad = [dist](const Vec2& x) {
        const double s = x(0) >= 0 ? 1.0 : -1.0;
        const double a = std::abs(x(0));
        Mat2 J;
        J.row(1) << 0.0, 2.0;
        switch (u3_branch(x)) {
        case 1:
            J(0, 0) = 2.0 * (1.0 - x(1));
            J(0, 1) = 2.0 * s * (1.0 - a);
            break;
        case 2:
            J(0, 0) = 4.0 * x(1) / (4.0 * x(1) + 3.0);
            J(0, 1) = 12.0 * x(0) / ((4.0 * x(1) + 3.0) * (4.0 * x(1) + 3.0));
            break;
        case 3:
            J(0, 0) = -4.0 * x(1) / (4.0 * x(1) + 3.0);
            J(0, 1) = -12.0 * x(0) / ((4.0 * x(1) + 3.0) * (4.0 * x(1) + 3.0));
            break;
        default:
            J(0, 0) = 0.5;
            J(0, 1) = 0.0;
            break;
        }
        return GradientResult{J, dist(x) < kBranchTol};
    };
    return Deformation("u3", std::move(value), std::move(grad), "piecewise",
                       std::move(dist));
}

Vec2 u4_polar(double r, double theta, double alpha) {
    return Vec2(r * std::cos(alpha * theta), r * std::sin(alpha * theta));
}

Deformation angular_fan(double alpha) {
    auto value = [alpha](const Vec2& x) {
        if (x(0) <= 0.0)
            throw EvaluationError("angular fan: point outside the right half plane");
        return u4_polar(x.norm(), std::atan(x(1) / x(0)), alpha);
    };
    auto grad = [alpha](const Vec2& x) {
        if (x(0) <= 0.0)
            throw EvaluationError("angular fan: point outside the right half plane");
        const double r = x.norm();
        const double theta = std::atan(x(1) / x(0));
        const double c = std::cos(alpha * theta), s = std::sin(alpha * theta);
        const Vec2 dr = x / r;
        const Vec2 dth(-x(1) / (r * r), x(0) / (r * r));
        Mat2 J;
        J.row(0) = c * dr.transpose() - alpha * r * s * dth.transpose();
        J.row(1) = s * dr.transpose() + alpha * r * c * dth.transpose();
        return GradientResult{J, false};
    };
    auto dist = [](const Vec2& x) { return x(0); }; // distance to the x1 = 0 wall
    return Deformation("u4∘polar", std::move(value), std::move(grad), "smooth",
                       std::move(dist));
}

double default_alpha() {
    return 0.9 * std::numbers::pi;
}

Deformation counterexample(double alpha) {
    if (!(alpha > 4.0 * std::numbers::pi / 5.0 && alpha < std::numbers::pi))
        throw ValidationError("counterexample: alpha must lie in (4*pi/5, pi)");
    Deformation u = compose(cavity_grip(), cavity_opener());
    u = compose(cavity_closer(), u);
    u = compose(angular_fan(alpha), u);
    return Deformation("counterexample", [u](const Vec2& x) { return u(x); },
                       [u](const Vec2& x) { return u.gradient_flagged(x); }, "piecewise",
                       [u](const Vec2& x) { return u.branch_distance(x); });
}

Domain2D counterexample_domain() {
    return Domain2D::rectangle(-1.0, 1.0, 0.0, 1.0);
}

} // namespace maps

Matrix trace_tangential_derivative(const Deformation& def, const Domain2D& dom,
                                   double s, double step) {
    if (step <= 0) throw ValidationError("trace derivative: step must be positive");
    const TangentFrame frame = dom.frame_at(s);
    // keep the stencil inside one smooth boundary piece
    double dc = dom.perimeter();
    for (double c : dom.corner_params()) {
        double d = std::abs(std::fmod(s - c, dom.perimeter()));
        d = std::min(d, dom.perimeter() - d);
        dc = std::min(dc, d);
    }
    const double h = std::min(step, 1.8 * dc);
    const Vec2 fwd = def(dom.boundary_point(s + 0.5 * h));
    const Vec2 bwd = def(dom.boundary_point(s - 0.5 * h));
    const Vec2 f = (fwd - bwd) / h;
    Matrix F(2, 1);
    F << f.dot(frame.tangent), f.dot(frame.normal);
    return F;
}

} // namespace polymin
