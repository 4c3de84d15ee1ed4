#include "polymin/degree.hpp"

#include <cmath>
#include <numbers>

#include "polymin/parallel.hpp"

namespace polymin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double point_segment_distance(const Vec2& y, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (y - a).norm();
    const double t = std::clamp((y - a).dot(ab) / len2, 0.0, 1.0);
    return (y - (a + t * ab)).norm();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step keeps the per-batch streams decorrelated
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SplitMixUniform {
    std::uint64_t state;
    double operator()() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

} // namespace

Eigen::AlignedBox2d BoundaryTrace::bounding_box() const {
    Eigen::AlignedBox2d box;
    for (const auto& p : points) box.extend(p);
    return box;
}

double BoundaryTrace::distance_to(const Vec2& y) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        d = std::min(d, point_segment_distance(y, points[i], points[i + 1]));
    return d;
}

BoundaryTrace sample_boundary_trace(const Deformation& def, const Domain2D& dom,
                                    int n_samples) {
    if (n_samples < 3)
        throw ValidationError("sample_boundary_trace: need at least 3 samples");
    BoundaryTrace trace;
    trace.points.reserve(static_cast<std::size_t>(n_samples) + 1);
    trace.params.reserve(static_cast<std::size_t>(n_samples) + 1);
    const double L = dom.perimeter();
    // half-step offset keeps samples away from corners and branch interfaces
    for (int i = 0; i < n_samples; ++i) {
        const double s = (i + 0.5) / n_samples * L;
        trace.points.push_back(def(dom.boundary_point(s)));
        trace.params.push_back(s);
    }
    trace.points.push_back(trace.points.front());
    trace.params.push_back(trace.params.front() + L);
    return trace;
}

int winding_number(const BoundaryTrace& trace, const Vec2& y, double min_distance) {
    if (trace.points.size() < 4 || trace.points.front() != trace.points.back())
        throw ValidationError("winding_number: trace must be a closed polyline");
    if (min_distance > 0.0 && trace.distance_to(y) <= min_distance)
        throw EvaluationError("winding_number: query point too close to the curve");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < trace.points.size(); ++i) {
        const Vec2 a = trace.points[i] - y;
        const Vec2 b = trace.points[i + 1] - y;
        total += std::atan2(a(0) * b(1) - a(1) * b(0), a.dot(b));
    }
    const double turns = total / kTwoPi;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) >= 0.1)
        throw EvaluationError("winding_number: rounding residue too large (under-sampled trace)");
    return static_cast<int>(rounded);
}

std::optional<Eigen::Vector2i> DegreeField::locate(const Vec2& y) const {
    const int i = static_cast<int>(std::floor((y(0) - origin(0)) / cell));
    const int j = static_cast<int>(std::floor((y(1) - origin(1)) / cell));
    if (i < 0 || i >= nx || j < 0 || j >= ny) return std::nullopt;
    return Eigen::Vector2i(i, j);
}

std::optional<int> DegreeField::uniform_nonzero_degree() const {
    std::optional<int> gamma;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (on_curve(i, j) || degree(i, j) == 0) continue;
            if (!gamma) gamma = degree(i, j);
            else if (*gamma != degree(i, j)) return std::nullopt;
        }
    return gamma;
}

DegreeField degree_field(const BoundaryTrace& trace, int resolution, int threads) {
    if (resolution < 8)
        throw ValidationError("degree_field: resolution must be at least 8");
    const auto box = trace.bounding_box();
    const Vec2 size = box.sizes();
    const double margin = 0.05 * size.maxCoeff();
    DegreeField field;
    field.cell = (size.maxCoeff() + 2 * margin) / resolution;
    field.origin = box.min() - Vec2(margin, margin);
    field.nx = resolution;
    field.ny = std::max(1, static_cast<int>(std::ceil((size(1) + 2 * margin) / field.cell)));
    field.degree.setZero(field.nx, field.ny);
    field.on_curve.setZero(field.nx, field.ny);

    const double diag = field.cell * std::numbers::sqrt2;
    parallel_chunks(static_cast<std::size_t>(field.nx), threads, [&](std::size_t ci) {
        const int i = static_cast<int>(ci);
        for (int j = 0; j < field.ny; ++j) {
            const Vec2 y = field.center(i, j);
            if (trace.distance_to(y) < diag) {
                field.on_curve(i, j) = 1;
                continue;
            }
            field.degree(i, j) = winding_number(trace, y);
        }
    });
    return field;
}

int degree_stability(const std::vector<BoundaryTrace>& traces, const Vec2& y) {
    if (traces.empty()) throw ValidationError("degree_stability: empty sequence");
    const int target = winding_number(traces.back(), y);
    int k0 = static_cast<int>(traces.size());
    for (int k = static_cast<int>(traces.size()) - 1; k >= 0; --k) {
        int deg;
        try {
            deg = winding_number(traces[static_cast<std::size_t>(k)], y);
        } catch (const EvaluationError&) {
            break; // y still on or too near the k-th curve
        }
        if (deg != target) break;
        k0 = k + 1; // 1-based
    }
    if (k0 == static_cast<int>(traces.size()) && traces.size() > 1)
        throw EvaluationError("degree_stability: no stabilization within the sequence");
    return k0;
}

PreimageHistogram preimage_histogram(const Deformation& def, const Domain2D& dom,
                                     std::int64_t samples, int resolution,
                                     std::uint64_t seed, int threads,
                                     const DegreeField* grid, double quad_h) {
    if (samples < 1) throw ValidationError("preimage_histogram: samples must be >= 1");
    if (resolution < 8) throw ValidationError("preimage_histogram: resolution too small");

    PreimageHistogram hist;
    if (grid) {
        hist.origin = grid->origin;
        hist.cell = grid->cell;
        hist.nx = grid->nx;
        hist.ny = grid->ny;
    } else {
        const DegreeField f = degree_field(sample_boundary_trace(def, dom, 1024), resolution);
        hist.origin = f.origin;
        hist.cell = f.cell;
        hist.nx = f.nx;
        hist.ny = f.ny;
    }
    hist.samples = samples;
    hist.domain_area = dom.area();
    hist.mass.setZero(hist.nx, hist.ny);
    hist.hits.setZero(hist.nx, hist.ny);

    struct Batch {
        Eigen::MatrixXd mass;
        Eigen::MatrixXi hits;
        double det_sum = 0.0;
        std::int64_t failures = 0;
        std::int64_t outside = 0;
    };
    const std::int64_t n_batches = std::min<std::int64_t>(64, samples);
    std::vector<Batch> batches(static_cast<std::size_t>(n_batches));

    parallel_chunks(static_cast<std::size_t>(n_batches), threads, [&](std::size_t b) {
        Batch& batch = batches[b];
        batch.mass.setZero(hist.nx, hist.ny);
        batch.hits.setZero(hist.nx, hist.ny);
        SplitMixUniform rnd{mix_seed(seed, b)};
        const std::int64_t lo = static_cast<std::int64_t>(b) * samples / n_batches;
        const std::int64_t hi = (static_cast<std::int64_t>(b) + 1) * samples / n_batches;
        for (std::int64_t s = lo; s < hi; ++s) {
            try {
                const Vec2 x = dom.sample_interior([&rnd] { return rnd(); });
                const Vec2 y = def(x);
                const double dj = std::abs(def.det(x));
                batch.det_sum += dj;
                const int i = static_cast<int>(std::floor((y(0) - hist.origin(0)) / hist.cell));
                const int j = static_cast<int>(std::floor((y(1) - hist.origin(1)) / hist.cell));
                if (i < 0 || i >= hist.nx || j < 0 || j >= hist.ny) {
                    ++batch.outside;
                    continue;
                }
                batch.mass(i, j) += dj;
                batch.hits(i, j) += 1;
            } catch (const EvaluationError&) {
                ++batch.failures;
            }
        }
    });

    double det_sum = 0.0;
    for (const Batch& b : batches) { // fixed merge order
        hist.mass += b.mass;
        hist.hits += b.hits;
        det_sum += b.det_sum;
        hist.failures += b.failures;
        hist.outside_grid += b.outside;
    }
    if (hist.failures * 100 > samples)
        throw EvaluationError("preimage_histogram: more than 1% of evaluations failed");
    hist.mc_jacobian_mass = det_sum * hist.domain_area / static_cast<double>(samples);

    // independent quadrature route for int |det Du|
    const auto rule = dom.interior_quadrature(quad_h);
    double quad = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        try {
            quad += rule.weights[q] * std::abs(def.det(rule.points[q]));
        } catch (const EvaluationError&) {
            // skipped nodes sit on the singular set; measure zero
        }
    }
    hist.quad_jacobian_mass = quad;
    return hist;
}

InjectivityReport injectivity_report(const Deformation& def, const Domain2D& dom,
                                     std::int64_t samples, int resolution,
                                     std::uint64_t seed, int threads, int trace_samples) {
    InjectivityReport rep;
    const BoundaryTrace trace = sample_boundary_trace(def, dom, trace_samples);
    rep.field = degree_field(trace, resolution, threads);
    rep.histogram =
        preimage_histogram(def, dom, samples, resolution, seed, threads, &rep.field);

    const auto gamma = rep.field.uniform_nonzero_degree();
    rep.single_gamma = gamma.has_value();
    rep.gamma = gamma.value_or(0);

    int agree = 0;
    double overlap = 0.0;
    for (int i = 0; i < rep.field.nx; ++i)
        for (int j = 0; j < rep.field.ny; ++j) {
            if (rep.field.on_curve(i, j)) continue;
            if (rep.histogram.hits(i, j) < 30) continue;
            const double nu = rep.histogram.mean_count(i, j);
            const int nu_int = static_cast<int>(std::lround(nu));
            ++rep.compared_cells;
            if (nu_int == rep.field.degree(i, j)) ++agree;
            rep.max_mean_count = std::max(rep.max_mean_count, nu);
            if (nu >= 1.5) {
                overlap += rep.histogram.cell_area();
                ++rep.overlap_cells;
            }
        }
    rep.agreement =
        rep.compared_cells > 0 ? static_cast<double>(agree) / rep.compared_cells : 1.0;
    rep.deg_equals_nu = rep.agreement >= 0.95;
    rep.overlap_area = overlap;
    rep.overlap_threshold = 1e-3 * dom.area();
    rep.injective_ae = overlap < rep.overlap_threshold;
    return rep;
}

} // namespace polymin
