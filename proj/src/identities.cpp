#include "polymin/identities.hpp"

#include <cmath>

#include "polymin/multilinear.hpp"

namespace polymin {

namespace fields {

ScalarField phi_const() {
    return {"1", [](const Vec2&) { return 1.0; }, [](const Vec2&) { return Vec2(0, 0); },
            false};
}

ScalarField phi_x1() {
    return {"x1", [](const Vec2& x) { return x(0); },
            [](const Vec2&) { return Vec2(1, 0); }, false};
}

ScalarField phi_x2() {
    return {"x2", [](const Vec2& x) { return x(1); },
            [](const Vec2&) { return Vec2(0, 1); }, false};
}

ScalarField phi_x1x2() {
    return {"x1x2", [](const Vec2& x) { return x(0) * x(1); },
            [](const Vec2& x) { return Vec2(x(1), x(0)); }, false};
}

ScalarField phi_bump(const Vec2& center, double radius) {
    auto value = [center, radius](const Vec2& x) {
        const double t2 = (x - center).squaredNorm() / (radius * radius);
        if (t2 >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - t2));
    };
    auto gradient = [center, radius, value](const Vec2& x) {
        const double t2 = (x - center).squaredNorm() / (radius * radius);
        if (t2 >= 1.0) return Vec2(0, 0);
        const double s = 1.0 - t2;
        // d/dx of exp(1 - 1/s) with s = 1 - |x-c|^2/r^2
        return Vec2(value(x) * (-2.0 / (s * s * radius * radius)) * (x - center));
    };
    return {"bump", value, gradient, true};
}

VectorField g_identity() {
    return {"y", [](const Vec2& y) { return y; },
            [](const Vec2&) { return Mat2(Mat2::Identity()); }};
}

VectorField g_quadratic() {
    return {"y1sq-y2", [](const Vec2& y) { return Vec2(y(0) * y(0), y(1)); },
            [](const Vec2& y) {
                Mat2 J;
                J << 2.0 * y(0), 0.0, 0.0, 1.0;
                return J;
            }};
}

VectorField g_truncated(double radius) {
    const double r2 = radius * radius;
    // cubic smoothstep from 1 at |y|^2 = r2 down to 0 at 4 r2; C^1
    auto chi = [r2](double s) {
        if (s <= r2) return 1.0;
        if (s >= 4.0 * r2) return 0.0;
        const double t = (s - r2) / (3.0 * r2);
        return 1.0 - t * t * (3.0 - 2.0 * t);
    };
    auto chi_prime = [r2](double s) {
        if (s <= r2 || s >= 4.0 * r2) return 0.0;
        const double t = (s - r2) / (3.0 * r2);
        return -6.0 * t * (1.0 - t) / (3.0 * r2);
    };
    return {"y-truncated",
            [chi](const Vec2& y) { return Vec2(chi(y.squaredNorm()) * y); },
            [chi, chi_prime](const Vec2& y) {
                const double s = y.squaredNorm();
                Mat2 J = chi(s) * Mat2::Identity();
                J += 2.0 * chi_prime(s) * y * y.transpose();
                return J;
            }};
}

std::vector<ScalarField> phi_family(const std::string& name, const Domain2D& dom) {
    std::vector<ScalarField> out;
    if (name == "polynomial" || name == "all") {
        out.push_back(phi_const());
        out.push_back(phi_x1());
        out.push_back(phi_x2());
        out.push_back(phi_x1x2());
    }
    if (name == "bump" || name == "all") {
        const auto box = dom.bounding_box();
        const Vec2 c = 0.5 * (box.min() + box.max());
        const double r = 0.35 * box.sizes().minCoeff();
        out.push_back(phi_bump(c, r));
    }
    if (out.empty()) throw ValidationError("unknown phi family: " + name);
    return out;
}

std::vector<VectorField> g_family(const std::string& name) {
    std::vector<VectorField> out;
    if (name == "linear" || name == "all") {
        out.push_back(g_identity());
        out.push_back(g_quadratic());
    }
    if (name == "compact" || name == "all") out.push_back(g_truncated(20.0));
    if (out.empty()) throw ValidationError("unknown g family: " + name);
    return out;
}

} // namespace fields

namespace {

constexpr double kSingularTol = 1e-8;

// move quadrature nodes off branch interfaces by one node spacing
Vec2 nudged_node(const Deformation& def, const Domain2D& dom, const Vec2& x, double h,
                 int& count) {
    if (def.branch_distance(x) >= kSingularTol) return x;
    ++count;
    const Vec2 dir = Vec2(0.6180339887, 0.7861513777).normalized();
    Vec2 moved = x + h * dir;
    if (!dom.contains(moved)) moved = x - h * dir;
    return moved;
}

struct VolumeTerms {
    double adj_term = 0;
    double det_term = 0;
    int nudged = 0;
    std::int64_t failed = 0, total = 0;
};

VolumeTerms volume_terms(const Deformation& def, const Domain2D& dom,
                         const ScalarField& phi, const VectorField& g, double h) {
    const auto rule = dom.interior_quadrature(h);
    VolumeTerms out;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        ++out.total;
        const Vec2 x = nudged_node(def, dom, rule.points[q], h, out.nudged);
        try {
            const Vec2 y = def(x);
            const Mat2 J = def.gradient(x);
            const Mat2 adj = (Mat2() << J(1, 1), -J(0, 1), -J(1, 0), J(0, 0)).finished();
            out.adj_term += rule.weights[q] * (adj * g.value(y)).dot(phi.gradient(x));
            out.det_term +=
                rule.weights[q] * J.determinant() * phi.value(x) * g.divergence(y);
        } catch (const EvaluationError&) {
            ++out.failed;
        }
    }
    if (out.failed * 1000 > out.total)
        throw EvaluationError("residual: more than 0.1% of quadrature nodes hit the singular set");
    return out;
}

} // namespace

double residual_interior(const Deformation& def, const Domain2D& dom,
                         const ScalarField& phi, const VectorField& g, double h) {
    if (!phi.compact_support)
        throw ValidationError("residual_interior: phi must be compactly supported");
    const VolumeTerms v = volume_terms(def, dom, phi, g, h);
    return v.adj_term + v.det_term;
}

ResidualReport residual_boundary(const Deformation& def, const Domain2D& dom,
                                 const ScalarField& phi, const VectorField& g, double h) {
    ResidualReport rep;
    rep.h = h;
    const VolumeTerms v = volume_terms(def, dom, phi, g, h);
    rep.volume_adj_term = v.adj_term;
    rep.volume_det_term = v.det_term;
    rep.nudged_nodes = v.nudged;

    const auto bq = dom.boundary_quadrature(4, h);
    const double node_spacing = dom.perimeter() / static_cast<double>(bq.points.size());
    double surface = 0.0;
    for (std::size_t q = 0; q < bq.points.size(); ++q) {
        const double s = bq.params[q];
        const TangentFrame frame = dom.frame_at(s);
        const Matrix F = trace_tangential_derivative(def, dom, s, node_spacing);
        // (adj Dtau_u g(u)) . n = g(u) . (cof Ftilde) n, extension free
        const Vector cof = cof_normal(F, frame.basis());
        const Vec2 y = def(frame.point);
        surface += bq.weights[q] * phi.value(frame.point) * g.value(y).dot(Vec2(cof));
    }
    rep.surface_term = surface;
    rep.boundary_residual = rep.volume_adj_term + rep.volume_det_term - surface;
    if (phi.compact_support)
        rep.interior_residual = rep.volume_adj_term + rep.volume_det_term;
    return rep;
}

std::vector<RefinementRow> refinement_study(
    const Deformation& def, const Domain2D& dom,
    const std::vector<std::pair<ScalarField, VectorField>>& pairs,
    const std::vector<double>& h_list) {
    if (h_list.size() < 3)
        throw ValidationError("refinement_study: need at least 3 refinement levels");
    std::vector<RefinementRow> rows;
    for (const auto& [phi, g] : pairs)
        for (double h : h_list) {
            const ResidualReport rep = residual_boundary(def, dom, phi, g, h);
            RefinementRow row;
            row.map = def.name();
            row.phi = phi.name;
            row.g = g.name;
            row.h = h;
            row.interior = phi.compact_support ? std::abs(rep.interior_residual) : 0.0;
            row.boundary = std::abs(rep.boundary_residual);
            row.surface = rep.surface_term;
            row.nudged = rep.nudged_nodes;
            rows.push_back(row);
        }
    return rows;
}

double fitted_decay_order(const std::vector<double>& h_list,
                          const std::vector<double>& residuals) {
    if (h_list.size() != residuals.size() || h_list.size() < 2)
        throw ValidationError("fitted_decay_order: need matching lists of length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        if (residuals[i] < 1e-14) continue; // machine zero rows carry no slope
        const double x = std::log(1.0 / h_list[i]);
        const double y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::infinity();
    return -(static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);
}

} // namespace polymin
