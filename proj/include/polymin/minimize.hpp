#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "polymin/energy.hpp"
#include "polymin/geometry.hpp"

namespace polymin {

/// Conforming P1 triangulation of a polygonal reference configuration.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; ///< ccw
    std::vector<double> areas;
    /// columns are the P1 shape-function gradients of the three local nodes
    std::vector<Eigen::Matrix<double, 2, 3>> shape_gradients;

    struct BoundaryEdge {
        int a = 0, b = 0; ///< ccw along the boundary
        double length = 0;
        Vec2 tangent, normal, midpoint;
    };
    std::vector<BoundaryEdge> boundary_edges; ///< ccw order around the boundary
    std::vector<int> boundary_loop;           ///< ccw vertex ids, closed implicitly
    std::vector<char> is_boundary;
    /// trapezoidal boundary-measure weight per vertex (0 off the boundary)
    std::vector<double> boundary_weight;

    double h = 0;           ///< max triangle diameter
    double min_quality = 0; ///< min inradius / diameter

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
};

/// Structured triangulation for axis-aligned rectangles, centroid fan plus
/// uniform refinement for other convex polygons. Guarantees max diameter
/// <= h and quality >= 0.2, else throws.
Mesh triangulate(const Domain2D& dom, double h);

enum class ConstraintClass { A1, A2, A3 };

/// Closed convex confinement region with a cheap projection.
struct ConvexRegion {
    enum class Kind { Box, Disk } kind = Kind::Box;
    Vec2 lo{0, 0}, hi{1, 1};
    Vec2 center{0, 0};
    double radius = 1.0;

    static ConvexRegion box(const Vec2& lo, const Vec2& hi);
    static ConvexRegion disk(const Vec2& center, double radius);
    Vec2 project(const Vec2& y) const;
    double violation(const Vec2& y) const; ///< distance to the region
};

struct Constraint {
    ConstraintClass cls = ConstraintClass::A1;
    std::vector<int> gamma;                     ///< A1 vertex ids
    std::function<Vec2(const Vec2&)> dirichlet; ///< A1 data on reference positions
    ConvexRegion region;                        ///< A3

    static Constraint dirichlet_boundary(const Mesh& mesh,
                                         std::function<Vec2(const Vec2&)> u0);
    static Constraint zero_boundary_mean();
    static Constraint confined(ConvexRegion region);
};

/// Piecewise-affine deformation as nodal positions on a mesh.
struct DiscreteDeformation {
    const Mesh* mesh = nullptr;
    Eigen::Matrix2Xd nodal; ///< 2 x num_vertices

    Mat2 gradient(int tri) const;
    double min_det() const;
    /// Integral of det Du over the mesh; a null Lagrangian of the boundary
    /// nodal values for piecewise-affine fields.
    double det_integral() const;
};

DiscreteDeformation nodal_identity(const Mesh& mesh);

void project_constraint(DiscreteDeformation& u, const Constraint& c);
double constraint_residual(const DiscreteDeformation& u, const Constraint& c);

struct Assembled {
    double energy = 0;
    Eigen::Matrix2Xd gradient;
    bool feasible = true;
    std::vector<int> infeasible_triangles;
};

/// Energy and analytic nodal gradient: triangle sum of area * W(F_T) plus
/// boundary-edge sum of length * U at the edge midpoint, with the tangential
/// derivative as the edgewise difference quotient of the trace.
Assembled assemble_energy_and_gradient(const DiscreteDeformation& u,
                                       const BulkDensity& W, const SurfaceDensity& U);

struct SolveOptions {
    int max_iter = 500;
    double tol = 1e-6;
    double armijo = 1e-4;      ///< sufficient-decrease parameter
    double delta_det = 1e-8;   ///< determinant safeguard
    double initial_step = 1.0;
};

struct TraceRow {
    int iter = 0;
    double energy = 0;
    double grad_norm = 0;
    double min_det = 0;
    double step = 0;
    double constraint_residual = 0;
};

struct SolveResult {
    DiscreteDeformation solution;
    std::vector<TraceRow> trace;
    bool converged = false;
    std::string stop_reason;
};

/// Projected gradient descent with Armijo backtracking; a step is rejected
/// whenever some triangle determinant falls to delta_det or below. Accepted
/// iterates have strictly non-increasing energy. Starts from the identity
/// projected to the class (A1 with non-identity data uses a radial blend of
/// the boundary values).
SolveResult minimize(const Mesh& mesh, const BulkDensity& W, const SurfaceDensity& U,
                     const Constraint& c, const SolveOptions& opts = {});

/// Max deviation of the det integral across fields sharing boundary values;
/// throws when the boundary nodal values differ.
double null_lagrangian_check(const std::vector<DiscreteDeformation>& fields);

} // namespace polymin
