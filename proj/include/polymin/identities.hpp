#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polymin/deformations.hpp"
#include "polymin/geometry.hpp"

namespace polymin {

/// Scalar test function phi on the closure of the domain.
struct ScalarField {
    std::string name;
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> gradient;
    bool compact_support = false;
};

/// C^1 vector field g on image space, with bounded derivative.
struct VectorField {
    std::string name;
    std::function<Vec2(const Vec2&)> value;
    std::function<Mat2(const Vec2&)> jacobian;

    double divergence(const Vec2& y) const { return jacobian(y).trace(); }
};

namespace fields {

ScalarField phi_const();
ScalarField phi_x1();
ScalarField phi_x2();
ScalarField phi_x1x2();
/// Smooth bump supported in the ball B(center, radius); compactly supported
/// in the domain when the ball is.
ScalarField phi_bump(const Vec2& center, double radius);

VectorField g_identity();              ///< g(y) = y
VectorField g_quadratic();             ///< g(y) = (y1^2, y2)
/// g(y) = y chi(|y|^2): identical to y inside radius R, C^1, compactly
/// supported inside 2R. The bounded-derivative variant of g_identity.
VectorField g_truncated(double radius);

/// Named families for the CLI: "polynomial", "bump", "all" for phi;
/// "linear", "compact", "all" for g.
std::vector<ScalarField> phi_family(const std::string& name, const Domain2D& dom);
std::vector<VectorField> g_family(const std::string& name);

} // namespace fields

/// Weighted-residual evaluation of the interior divergence identity
///   int [adj Du g(u)] . Dphi + int det Du phi div g(u)  =  0,
/// which holds for maps free of interior cavitation. phi must be compactly
/// supported. Returns the signed quadrature residual at resolution h.
double residual_interior(const Deformation& def, const Domain2D& dom,
                         const ScalarField& phi, const VectorField& g, double h);

/// Up-to-the-boundary identity: the two volume terms against the surface term
///   int_boundary phi (adj Dtau_u g(u)) . n,
/// with the tangential derivative taken by differencing the boundary trace.
struct ResidualReport {
    double volume_adj_term = 0;
    double volume_det_term = 0;
    double surface_term = 0;
    double boundary_residual = 0; ///< volume terms minus surface term, signed
    double interior_residual = 0; ///< volume terms alone (compact phi only)
    double h = 0;
    int nudged_nodes = 0; ///< quadrature nodes moved off the singular set
};

ResidualReport residual_boundary(const Deformation& def, const Domain2D& dom,
                                 const ScalarField& phi, const VectorField& g, double h);

struct RefinementRow {
    std::string map, phi, g;
    double h = 0;
    double interior = 0; ///< |interior residual|, 0 when phi not compact
    double boundary = 0; ///< |boundary residual|
    double surface = 0;
    int nudged = 0;
};

std::vector<RefinementRow> refinement_study(
    const Deformation& def, const Domain2D& dom,
    const std::vector<std::pair<ScalarField, VectorField>>& pairs,
    const std::vector<double>& h_list);

/// Least-squares slope of log(residual) against log(1/h); +inf when every
/// residual sits at machine zero.
double fitted_decay_order(const std::vector<double>& h_list,
                          const std::vector<double>& residuals);

} // namespace polymin
