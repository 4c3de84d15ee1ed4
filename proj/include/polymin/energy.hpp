#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "polymin/deformations.hpp"
#include "polymin/geometry.hpp"
#include "polymin/multilinear.hpp"

namespace polymin {

/// Bulk stored-energy density W(x, y, F) with analytic F-gradient. The
/// catalog density is polyconvex with growth
///   W >= a1(x) + c1 |F|^p + h(det F),   h(t) -> inf as t -> 0+, h(t)/t -> inf.
struct BulkDensity {
    std::string name;
    double p = 2.0;
    double c1 = 1.0;
    std::function<double(const Vec2&)> a1;
    std::function<double(double)> h_det;
    std::function<double(const Vec2& x, const Vec2& y, const Mat2& F)> value;
    std::function<Mat2(const Vec2& x, const Vec2& y, const Mat2& F)> gradient;
};

/// W(F) = |F|^2 + (det F)^2 + 1/det F, infeasible for det F <= 0.
/// Convex in (F, det F); h(t) = t^2 + 1/t.
BulkDensity W_standard();

/// Pressure function for the pressure loading density.
struct PressureFn {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
};
PressureFn constant_pressure(double value = 1.0);

/// Surface density U(x, y, F, n): F is the d x (d-1) frame representation of
/// a tangential map (frame = orthonormal basis matrix, tangents first,
/// outward normal last). `phi` is the convex minor representative with
/// U(x, y, F, n) = phi(frame, y, M(F)).
struct SurfaceDensity {
    std::string name;
    double p = 2.0;
    double c2 = 0.0; ///< coercivity constant of the |F|^p lower bound
    std::function<double(const Matrix& frame, const Vector& y, const Matrix& F)> value;
    /// dU/dF in frame coordinates; planar (d = 2) only, for assembly.
    std::function<Matrix(const Matrix& frame, const Vector& y, const Matrix& F)> grad_F;
    std::function<Vector(const Matrix& frame, const Vector& y, const Matrix& F)> grad_y;
    std::function<double(const Matrix& frame, const Vector& y, const MinorVector&)> phi;
};

SurfaceDensity U_zero();
/// Pressure loading pi(y) y . cof_normal(F); linear in the minors of F.
SurfaceDensity U_pressure(PressureFn pi = constant_pressure());
/// Membrane energy eps0 |cof_normal(F)|; convex in the minors of F.
SurfaceDensity U_membrane(double eps0);
/// base + c |F|^p: restores the coercivity lower bound, keeps the convex
/// minor representation (|F|^p is a convex function of the order-1 block).
SurfaceDensity U_coercive(SurfaceDensity base, double c, double p);

/// Max midpoint convexity violation of phi over random minor-vector pairs:
/// phi(l m1 + (1-l) m2) - [l phi(m1) + (1-l) phi(m2)], positive means
/// non-convex on the sample; <= 1e-12 certifies convexity on the sample.
double convexity_probe(const std::function<double(const Vector&)>& phi, int dim,
                       int trials, std::uint64_t seed);

/// Sampled check of the coercivity lower bounds of the catalog densities;
/// returns the worst (most negative) margin over the sample.
double bulk_coercivity_margin(const BulkDensity& W, int trials, std::uint64_t seed);
double surface_coercivity_margin(const SurfaceDensity& U, int dim, int trials,
                                 std::uint64_t seed);

struct EnergyBreakdown {
    double bulk = 0;
    double surface = 0;
    double total = 0;
    int interior_nodes = 0;
    int boundary_nodes = 0;
};

/// Quadrature evaluation of I[u] = int W(x, u, Du) + int_boundary U(x, u,
/// Dtau_u, n); the tangential derivative comes from differencing the
/// boundary trace. Throws when det Du <= 0 at an interior node.
EnergyBreakdown eval_functional(const Deformation& def, const Domain2D& dom,
                                const BulkDensity& W, const SurfaceDensity& U,
                                double h_interior, double h_boundary);

} // namespace polymin
