#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polymin/deformations.hpp"
#include "polymin/geometry.hpp"

namespace polymin {

/// Closed polyline of boundary image points, ordered by boundary parameter.
struct BoundaryTrace {
    std::vector<Vec2> points;   ///< first point repeated at the end
    std::vector<double> params; ///< arclength parameters of the samples

    Eigen::AlignedBox2d bounding_box() const;
    double distance_to(const Vec2& y) const;
};

/// Trace of u restricted to the boundary, n >= 3 samples offset from corners.
BoundaryTrace sample_boundary_trace(const Deformation& def, const Domain2D& dom,
                                    int n_samples);

/// Brouwer degree of the trace at y as the rounded sum of signed turning
/// angles. Throws when y is within min_distance of the polyline or when the
/// rounding residue exceeds 0.1 (under-sampled trace).
int winding_number(const BoundaryTrace& trace, const Vec2& y, double min_distance = 0.0);

/// Integer degree on a raster over the trace bounding box. Cells within one
/// cell diagonal of the polyline are marked on-curve and excluded from any
/// comparison; the degree vanishes on the unbounded component.
struct DegreeField {
    Vec2 origin;      ///< lower-left corner of cell (0,0)
    double cell = 0;  ///< square cell side
    int nx = 0, ny = 0;
    Eigen::MatrixXi degree;                 ///< nx x ny
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> on_curve;

    Vec2 center(int i, int j) const {
        return origin + Vec2((i + 0.5) * cell, (j + 0.5) * cell);
    }
    std::optional<Eigen::Vector2i> locate(const Vec2& y) const;

    /// The single nonzero degree value when one exists.
    std::optional<int> uniform_nonzero_degree() const;
};

DegreeField degree_field(const BoundaryTrace& trace, int resolution, int threads = 1);

/// First 1-based index k0 such that deg(u_k; y) agrees with the final trace
/// for every k >= k0. Throws when only the last element agrees (no
/// stabilization within the sequence).
int degree_stability(const std::vector<BoundaryTrace>& traces, const Vec2& y);

/// Monte-Carlo estimate of the preimage-counting function on a raster:
/// cell mass collects |det Du| of the samples landing in it, so
/// mass * (|Omega| / samples) estimates the integral of N_u over the cell.
struct PreimageHistogram {
    Vec2 origin;
    double cell = 0;
    int nx = 0, ny = 0;
    Eigen::MatrixXd mass;  ///< sum of |det Du(x_s)| per cell
    Eigen::MatrixXi hits;  ///< raw sample counts per cell
    std::int64_t samples = 0;
    std::int64_t failures = 0;     ///< discarded evaluations (singular points)
    std::int64_t outside_grid = 0; ///< samples landing off the raster
    double domain_area = 0;
    double mc_jacobian_mass = 0;   ///< (|Omega|/N) sum |det Du|
    double quad_jacobian_mass = 0; ///< quadrature route for the same integral

    double cell_area() const { return cell * cell; }
    /// Estimated mean of N_u over cell (i, j).
    double mean_count(int i, int j) const {
        return mass(i, j) * (domain_area / static_cast<double>(samples)) / cell_area();
    }
};

/// Samples >= 1; the raster grid is taken from `grid` when given (so the
/// histogram can share the degree-field raster), otherwise from the trace of
/// def. Throws when more than 1% of the evaluations fail.
PreimageHistogram preimage_histogram(const Deformation& def, const Domain2D& dom,
                                     std::int64_t samples, int resolution,
                                     std::uint64_t seed, int threads = 1,
                                     const DegreeField* grid = nullptr,
                                     double quad_h = 0.01);

/// Cross-check of the degree raster against the preimage histogram.
struct InjectivityReport {
    bool injective_ae = false;
    double overlap_area = 0.0;     ///< area of cells with N_u >= 2
    double overlap_threshold = 0.0;///< 1e-3 |Omega|, the a.e. surrogate
    bool deg_equals_nu = false;    ///< >= 95% agreement on populated cells
    double agreement = 0.0;        ///< fraction of agreeing populated cells
    int gamma = 0;                 ///< the common nonzero degree, 0 if mixed
    bool single_gamma = false;
    int compared_cells = 0;
    int overlap_cells = 0;         ///< populated off-curve cells with N_u >= 2
    double max_mean_count = 0.0;   ///< largest per-cell N_u estimate
    DegreeField field;
    PreimageHistogram histogram;
};

InjectivityReport injectivity_report(const Deformation& def, const Domain2D& dom,
                                     std::int64_t samples, int resolution,
                                     std::uint64_t seed, int threads = 1,
                                     int trace_samples = 4096);

} // namespace polymin
