#pragma once

#include <functional>
#include <limits>
#include <string>

#include "polymin/geometry.hpp"

namespace polymin {

struct GradientResult {
    Mat2 jacobian;
    /// Set when the evaluation point lies on a branch interface of a
    /// piecewise map (measure zero); the first matching branch was used.
    bool on_branch_boundary = false;
};

/// Closed-form planar deformation with value, gradient and the usual
/// determinant / adjugate / cofactor accessors. Gradients are analytic where
/// available; with_numeric_gradient builds a central-difference fallback.
class Deformation {
public:
    using ValueFn = std::function<Vec2(const Vec2&)>;
    using GradFn = std::function<GradientResult(const Vec2&)>;
    using DistFn = std::function<double(const Vec2&)>;

    Deformation(std::string name, ValueFn value, GradFn grad,
                std::string smoothness = "smooth", DistFn branch_distance = {});

    static Deformation with_numeric_gradient(std::string name, ValueFn value,
                                             double h_fd = 1e-6,
                                             std::string smoothness = "smooth");

    Vec2 operator()(const Vec2& x) const { return value_(x); }
    GradientResult gradient_flagged(const Vec2& x) const { return grad_(x); }
    Mat2 gradient(const Vec2& x) const { return grad_(x).jacobian; }

    double det(const Vec2& x) const { return gradient(x).determinant(); }
    Mat2 adjugate(const Vec2& x) const;
    Mat2 cofactor(const Vec2& x) const;

    /// Distance from x to the nearest branch interface or singular point of
    /// the map; +inf for globally smooth maps.
    double branch_distance(const Vec2& x) const;

    const std::string& name() const { return name_; }
    const std::string& smoothness() const { return smoothness_; }

private:
    std::string name_;
    ValueFn value_;
    GradFn grad_;
    std::string smoothness_;
    DistFn branch_distance_;
};

/// outer after inner, gradients by the chain rule, branch flags combined.
Deformation compose(const Deformation& outer, const Deformation& inner);

namespace maps {

Deformation identity();
Deformation affine(const Mat2& A, const Vec2& b);
Deformation scaling(double factor);
/// Smooth diffeomorphism (x1 + 0.1 sin x2, x2).
Deformation sine_shear();
/// Two-to-one fold (|x1|, x2).
Deformation fold();

/// Max-norm radial rescaling x -> (|x|_inf + 3) / (4 |x|_inf) x, which opens
/// a cavity on the boundary of (-1,1)x(0,1); singular at the origin and
/// kinked across the diagonals |x1| = |x2|.
Deformation cavity_opener(); // u1

/// Grips the material near the cavity mouth and stretches it downward:
/// (x1, 1 - (1 - x2)(7 - 8|x1|)) for |x1| < 3/4, identity elsewhere.
Deformation cavity_grip(); // u2

/// Closes the cavity, leaving a tongue of material outside, and rescales
/// the main body onto [1,2] x [-1,1]; four affine-rational branches.
Deformation cavity_closer(); // u3

/// Fan map around the origin on the right half plane: polar coordinates
/// followed by (r, theta) -> (r cos(alpha theta), r sin(alpha theta)).
Deformation angular_fan(double alpha); // u4 after the polar chart
Vec2 u4_polar(double r, double theta, double alpha);

/// Full composed counterexample u4 ∘ polar ∘ u3 ∘ u2 ∘ u1 for
/// 4*pi/5 < alpha < pi (default 0.9*pi). Orientation preserving a.e. and
/// not injective a.e. on (-1,1)x(0,1).
double default_alpha();
Deformation counterexample(double alpha = default_alpha());

/// The reference configuration of the counterexample, (-1,1)x(0,1).
Domain2D counterexample_domain();

} // namespace maps

/// Tangential derivative of the boundary trace at arclength s, computed by
/// central-differencing the trace along the boundary (step in arclength).
/// Returned as the frame representation, a 2 x 1 matrix with rows
/// (f . tangent, f . normal).
Matrix trace_tangential_derivative(const Deformation& def, const Domain2D& dom,
                                   double s, double step);

} // namespace polymin
