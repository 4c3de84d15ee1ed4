#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "polymin/errors.hpp"
#include "polymin/multilinear.hpp"

namespace polymin {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Orthonormal frame at a boundary point: tangent first, outward normal last.
struct TangentFrame {
    Vec2 point;
    Vec2 tangent;
    Vec2 normal;

    /// 2 x 2 frame matrix with columns (tangent, normal).
    Mat2 basis() const {
        Mat2 B;
        B.col(0) = tangent;
        B.col(1) = normal;
        return B;
    }
};

/// Quadrature nodes and weights. Boundary rules also carry the arclength
/// parameter of each node so callers can build frames and difference the
/// trace along the boundary.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<double> params; ///< arclength, boundary rules only
    int order = 0;

    double total_weight() const;
};

/// Planar reference configuration bounded by a single closed piecewise-smooth
/// curve, oriented counterclockwise (so the wedge-formula normal points
/// outward). R^2 minus the boundary has exactly two connected components by
/// construction.
class Domain2D {
public:
    static Domain2D rectangle(double x0, double x1, double y0, double y1);
    static Domain2D unit_disk();
    /// Simple polygon, counterclockwise vertex order; self-intersecting input
    /// is rejected.
    static Domain2D polygon(std::vector<Vec2> vertices);

    const std::string& name() const { return name_; }
    double area() const { return area_; }
    double perimeter() const { return perimeter_; }
    bool is_polygonal() const { return !vertices_.empty(); }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    Eigen::AlignedBox2d bounding_box() const { return bbox_; }

    bool contains(const Vec2& x) const;

    /// Point on the boundary at arclength s in [0, perimeter), ccw.
    Vec2 boundary_point(double s) const;

    /// Arclength positions of the corners (empty for the disk).
    const std::vector<double>& corner_params() const { return corner_params_; }
    bool near_corner(double s, double tol) const;

    /// Orthonormal frame at arclength s. Throws EvaluationError at corners,
    /// where the frame is undefined; the corner set has measure zero and all
    /// quadrature rules avoid it.
    TangentFrame frame_at(double s) const;

    /// Composite Gauss rule along the boundary, exact for polynomials of the
    /// given order on flat pieces. max_spacing > 0 caps the panel length.
    QuadratureRule boundary_quadrature(int order, double max_spacing = 0.0) const;

    /// Interior rule with cells or triangles of diameter at most h, exact for
    /// polynomials of degree >= 4 per cell on polygons.
    QuadratureRule interior_quadrature(double h) const;

    /// Uniform sample of the interior of the bounding box, rejected to the
    /// domain; provides integration-free Monte-Carlo support. Returns the
    /// number of rejection iterations used.
    Vec2 sample_interior(std::function<double()> unit_rand) const;

private:
    Domain2D() = default;

    struct Segment {
        std::function<Vec2(double)> point;    // t in [0,1]
        std::function<Vec2(double)> velocity; // d/dt
        double length = 0.0;
    };

    std::vector<Segment> segments_;
    std::vector<double> cum_length_; // cumulative segment lengths, starts at 0
    std::vector<double> corner_params_;
    std::vector<Vec2> vertices_; // polygonal domains only
    std::string name_;
    double area_ = 0.0;
    double perimeter_ = 0.0;
    Eigen::AlignedBox2d bbox_;

    std::pair<std::size_t, double> locate(double s) const; // segment, local t
};

/// Parse "rectangle", "unit-disk" or "polygon" with parameters.
Domain2D make_domain(const std::string& shape, const std::vector<double>& params);

/// One row of the chart-level weak-continuity table: the frequency of the
/// oscillation and the largest component gap
/// |int eta * M(Du_n) - int eta * M(Du)| over the 9 minor components.
struct MinorConvergenceRow {
    int frequency = 0;
    double gap = 0.0;
};

/// Flat 3-D chart demo on (0, r)^2: u_n = u + (1/n) phi(n x) psi with psi
/// smooth and compactly supported, phi a bounded oscillation profile. The
/// tabulated gaps shrink as the frequency grows, the quadrature surrogate of
/// the weak L^1 convergence of the tangential minors.
std::vector<MinorConvergenceRow> chart_minor_convergence_demo(
    double r,
    const std::function<Eigen::Vector3d(const Vec2&)>& u,
    const std::function<Eigen::Matrix<double, 3, 2>(const Vec2&)>& du,
    const std::vector<int>& frequencies,
    const std::function<double(const Vec2&)>& test_fn,
    double oscillation_amplitude = 1.0);

} // namespace polymin
