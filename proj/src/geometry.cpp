#include "polymin/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace polymin {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    std::sort(nodes.begin(), nodes.end());
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    return q(0) <= std::max(p(0), r(0)) + 1e-14 && q(0) >= std::min(p(0), r(0)) - 1e-14 &&
           q(1) <= std::max(p(1), r(1)) + 1e-14 && q(1) >= std::min(p(1), r(1)) - 1e-14;
}

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0));
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return true;
    if (o1 == 0 && on_segment(a, c, b)) return true;
    if (o2 == 0 && on_segment(a, d, b)) return true;
    if (o3 == 0 && on_segment(c, a, d)) return true;
    if (o4 == 0 && on_segment(c, b, d)) return true;
    return false;
}

double polygon_signed_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        a += p(0) * q(1) - q(0) * p(1);
    }
    return 0.5 * a;
}

bool point_in_polygon(const std::vector<Vec2>& v, const Vec2& x) {
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i](1) > x(1)) != (v[j](1) > x(1)) &&
            x(0) < (v[j](0) - v[i](0)) * (x(1) - v[i](1)) / (v[j](1) - v[i](1)) + v[i](0))
            inside = !inside;
    }
    return inside;
}

// Ear clipping for a simple ccw polygon.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
    std::vector<int> idx(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
    std::vector<std::array<int, 3>> tris;
    int guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const int ia = idx[(i + idx.size() - 1) % idx.size()];
            const int ib = idx[i];
            const int ic = idx[(i + 1) % idx.size()];
            const Vec2 &a = poly[static_cast<std::size_t>(ia)],
                       &b = poly[static_cast<std::size_t>(ib)],
                       &c = poly[static_cast<std::size_t>(ic)];
            if (orient(a, b, c) <= 1e-14) continue; // reflex or degenerate
            bool empty = true;
            for (int other : idx) {
                if (other == ia || other == ib || other == ic) continue;
                const Vec2& p = poly[static_cast<std::size_t>(other)];
                if (orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0) {
                    empty = false;
                    break;
                }
            }
            if (!empty) continue;
            tris.push_back({ia, ib, ic});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped && ++guard > 4) throw ValidationError("ear_clip: polygon is degenerate");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

struct TrianglePoint {
    double l1, l2, w;
};

// Degree-5 symmetric 7-point rule (barycentric), positive weights.
const std::array<TrianglePoint, 7> kTri7 = {{
    {1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
    {0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
    {0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
    {0.1012865073234563, 0.1012865073234563, 0.1259391805448271},
}};

void triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, double h,
                         std::vector<Vec2>& pts, std::vector<double>& wts) {
    const double diam = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
    if (diam > h) {
        const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
        triangle_quadrature(a, ab, ca, h, pts, wts);
        triangle_quadrature(ab, b, bc, h, pts, wts);
        triangle_quadrature(ca, bc, c, h, pts, wts);
        triangle_quadrature(ab, bc, ca, h, pts, wts);
        return;
    }
    const double area = 0.5 * std::abs(orient(a, b, c));
    for (const auto& q : kTri7) {
        pts.push_back(q.l1 * a + q.l2 * b + (1.0 - q.l1 - q.l2) * c);
        wts.push_back(q.w * area);
    }
}

} // namespace

double QuadratureRule::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

Domain2D Domain2D::rectangle(double x0, double x1, double y0, double y1) {
    if (!(x0 < x1 && y0 < y1))
        throw ValidationError("rectangle: need x0 < x1 and y0 < y1");
    Domain2D dom = polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    dom.name_ = "rectangle";
    return dom;
}

Domain2D Domain2D::polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) throw ValidationError("polygon: need at least 3 vertices");
    double signed_area = polygon_signed_area(vertices);
    if (std::abs(signed_area) < 1e-14) throw ValidationError("polygon: degenerate");
    if (signed_area < 0) { // accept clockwise input, store ccw
        std::reverse(vertices.begin(), vertices.end());
        signed_area = -signed_area;
    }
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j],
                               vertices[(j + 1) % n]))
                throw ValidationError("polygon: edges self-intersect");
        }

    Domain2D dom;
    dom.name_ = "polygon";
    dom.vertices_ = vertices;
    dom.area_ = signed_area;
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices[i];
        const Vec2 b = vertices[(i + 1) % n];
        const Vec2 dir = b - a;
        const double len = dir.norm();
        if (len < 1e-14) throw ValidationError("polygon: repeated vertex");
        dom.segments_.push_back({[a, dir](double t) { return Vec2(a + t * dir); },
                                 [dir](double) { return dir; }, len});
        dom.cum_length_.push_back(cum);
        dom.corner_params_.push_back(cum);
        cum += len;
        dom.bbox_.extend(a);
    }
    dom.perimeter_ = cum;
    return dom;
}

Domain2D Domain2D::unit_disk() {
    Domain2D dom;
    dom.name_ = "unit-disk";
    dom.area_ = kPi;
    dom.perimeter_ = 2.0 * kPi;
    dom.segments_.push_back(
        {[](double t) { return Vec2(std::cos(2 * kPi * t), std::sin(2 * kPi * t)); },
         [](double t) {
             return Vec2(-2 * kPi * std::sin(2 * kPi * t), 2 * kPi * std::cos(2 * kPi * t));
         },
         2.0 * kPi});
    dom.cum_length_.push_back(0.0);
    dom.bbox_.extend(Vec2(-1, -1));
    dom.bbox_.extend(Vec2(1, 1));
    return dom;
}

bool Domain2D::contains(const Vec2& x) const {
    if (!vertices_.empty()) return point_in_polygon(vertices_, x);
    return x.squaredNorm() < 1.0;
}

std::pair<std::size_t, double> Domain2D::locate(double s) const {
    double sm = std::fmod(s, perimeter_);
    if (sm < 0) sm += perimeter_;
    std::size_t seg = segments_.size() - 1;
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i)
        if (sm < cum_length_[i + 1]) {
            seg = i;
            break;
        }
    return {seg, (sm - cum_length_[seg]) / segments_[seg].length};
}

Vec2 Domain2D::boundary_point(double s) const {
    const auto [seg, t] = locate(s);
    return segments_[seg].point(t);
}

bool Domain2D::near_corner(double s, double tol) const {
    double sm = std::fmod(s, perimeter_);
    if (sm < 0) sm += perimeter_;
    for (double c : corner_params_) {
        double d = std::abs(sm - c);
        d = std::min(d, perimeter_ - d);
        if (d < tol) return true;
    }
    return false;
}

TangentFrame Domain2D::frame_at(double s) const {
    if (near_corner(s, 1e-9))
        throw EvaluationError("frame_at: frame undefined at a boundary corner");
    const auto [seg, t] = locate(s);
    TangentFrame f;
    f.point = segments_[seg].point(t);
    const Vec2 v = segments_[seg].velocity(t);
    f.tangent = v / v.norm();
    f.normal = Vec2(f.tangent(1), -f.tangent(0)); // outward for ccw orientation
    return f;
}

QuadratureRule Domain2D::boundary_quadrature(int order, double max_spacing) const {
    if (order < 1) throw ValidationError("boundary_quadrature: order must be >= 1");
    const int npts = (order + 2) / 2;
    std::vector<double> gn, gw;
    gauss_legendre(npts, gn, gw);

    QuadratureRule rule;
    rule.order = order;
    for (std::size_t seg = 0; seg < segments_.size(); ++seg) {
        const double len = segments_[seg].length;
        int panels = 1;
        if (max_spacing > 0)
            panels = std::max(1, static_cast<int>(std::ceil(len / max_spacing)));
        else if (vertices_.empty())
            panels = std::max(64, 4 * npts); // curved boundary
        for (int p = 0; p < panels; ++p) {
            const double t0 = static_cast<double>(p) / panels;
            const double t1 = static_cast<double>(p + 1) / panels;
            for (int q = 0; q < npts; ++q) {
                const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gn[static_cast<std::size_t>(q)];
                const double speed = segments_[seg].velocity(t).norm();
                rule.points.push_back(segments_[seg].point(t));
                rule.weights.push_back(0.5 * (t1 - t0) * gw[static_cast<std::size_t>(q)] * speed);
                rule.params.push_back(cum_length_[seg] + t * len);
            }
        }
    }
    return rule;
}

QuadratureRule Domain2D::interior_quadrature(double h) const {
    if (h <= 0) throw ValidationError("interior_quadrature: h must be positive");
    QuadratureRule rule;
    rule.order = 5;
    std::vector<double> gn, gw;
    gauss_legendre(3, gn, gw);

    if (vertices_.size() == 4 && std::abs(vertices_[0](1) - vertices_[1](1)) < 1e-15 &&
        std::abs(vertices_[1](0) - vertices_[2](0)) < 1e-15 &&
        std::abs(vertices_[2](1) - vertices_[3](1)) < 1e-15 &&
        std::abs(vertices_[3](0) - vertices_[0](0)) < 1e-15) {
        // axis-aligned rectangle: tensor cells
        const double x0 = vertices_[0](0), x1 = vertices_[1](0);
        const double y0 = vertices_[0](1), y1 = vertices_[2](1);
        const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h)));
        const int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / h)));
        const double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                const double cx = x0 + (i + 0.5) * dx, cy = y0 + (j + 0.5) * dy;
                for (std::size_t a = 0; a < gn.size(); ++a)
                    for (std::size_t b = 0; b < gn.size(); ++b) {
                        rule.points.emplace_back(cx + 0.5 * dx * gn[a], cy + 0.5 * dy * gn[b]);
                        rule.weights.push_back(0.25 * dx * dy * gw[a] * gw[b]);
                    }
            }
        return rule;
    }

    if (!vertices_.empty()) {
        for (const auto& tri : ear_clip(vertices_))
            triangle_quadrature(vertices_[static_cast<std::size_t>(tri[0])],
                                vertices_[static_cast<std::size_t>(tri[1])],
                                vertices_[static_cast<std::size_t>(tri[2])], h, rule.points,
                                rule.weights);
        return rule;
    }

    // disk: polar tensor grid, radial weight r
    const int nr = std::max(2, static_cast<int>(std::ceil(1.0 / h)));
    const int nt = std::max(8, static_cast<int>(std::ceil(2.0 * kPi / h)));
    const double dr = 1.0 / nr, dt = 2.0 * kPi / nt;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j)
            for (std::size_t a = 0; a < gn.size(); ++a)
                for (std::size_t b = 0; b < gn.size(); ++b) {
                    const double r = (i + 0.5) * dr + 0.5 * dr * gn[a];
                    const double th = (j + 0.5) * dt + 0.5 * dt * gn[b];
                    rule.points.emplace_back(r * std::cos(th), r * std::sin(th));
                    rule.weights.push_back(0.25 * dr * dt * gw[a] * gw[b] * r);
                }
    return rule;
}

Vec2 Domain2D::sample_interior(std::function<double()> unit_rand) const {
    const Vec2 lo = bbox_.min(), hi = bbox_.max();
    for (int it = 0; it < 10000; ++it) {
        Vec2 x(lo(0) + (hi(0) - lo(0)) * unit_rand(), lo(1) + (hi(1) - lo(1)) * unit_rand());
        if (contains(x)) return x;
    }
    throw EvaluationError("sample_interior: rejection sampling failed");
}

Domain2D make_domain(const std::string& shape, const std::vector<double>& params) {
    if (shape == "rectangle") {
        if (params.size() != 4)
            throw ValidationError("rectangle domain needs params x0,x1,y0,y1");
        return Domain2D::rectangle(params[0], params[1], params[2], params[3]);
    }
    if (shape == "unit-disk") {
        if (!params.empty()) throw ValidationError("unit-disk domain takes no params");
        return Domain2D::unit_disk();
    }
    if (shape == "polygon") {
        if (params.size() < 6 || params.size() % 2 != 0)
            throw ValidationError("polygon domain needs an even list of >= 6 coordinates");
        std::vector<Vec2> verts;
        for (std::size_t i = 0; i < params.size(); i += 2)
            verts.emplace_back(params[i], params[i + 1]);
        return Domain2D::polygon(std::move(verts));
    }
    throw ValidationError("unknown domain shape: " + shape);
}

namespace {

// C-infinity bump on (-1, 1), zero outside.
double bump(double t) {
    const double s = 1.0 - t * t;
    return s > 0 ? std::exp(1.0 - 1.0 / s) : 0.0;
}

double bump_deriv(double t) {
    const double s = 1.0 - t * t;
    if (s <= 0) return 0.0;
    return bump(t) * (-2.0 * t / (s * s));
}

} // namespace

std::vector<MinorConvergenceRow> chart_minor_convergence_demo(
    double r,
    const std::function<Eigen::Vector3d(const Vec2&)>& u,
    const std::function<Eigen::Matrix<double, 3, 2>(const Vec2&)>& du,
    const std::vector<int>& frequencies,
    const std::function<double(const Vec2&)>& test_fn,
    double oscillation_amplitude) {
    (void)u;
    if (r <= 0) throw ValidationError("chart demo: r must be positive");
    int max_freq = 1;
    for (int n : frequencies) {
        if (n < 1) throw ValidationError("chart demo: frequencies must be >= 1");
        max_freq = std::max(max_freq, n);
    }

    const Eigen::Vector3d psi_dir(0.8, -0.5, 1.0);
    auto psi = [&](const Vec2& x) {
        return bump(2.0 * x(0) / r - 1.0) * bump(2.0 * x(1) / r - 1.0);
    };
    auto dpsi = [&](const Vec2& x) {
        return Vec2(bump_deriv(2.0 * x(0) / r - 1.0) * bump(2.0 * x(1) / r - 1.0) * 2.0 / r,
                    bump(2.0 * x(0) / r - 1.0) * bump_deriv(2.0 * x(1) / r - 1.0) * 2.0 / r);
    };
    // oscillation profile and its gradient, phi(z) = sin(z1 + 0.7 z2)
    auto phi = [](const Vec2& z) { return std::sin(z(0) + 0.7 * z(1)); };
    auto dphi = [](const Vec2& z) {
        const double c = std::cos(z(0) + 0.7 * z(1));
        return Vec2(c, 0.7 * c);
    };

    // one fixed rule for every frequency; fine enough for the largest one
    std::vector<double> gn, gw;
    gauss_legendre(3, gn, gw);
    const int panels = std::max(24, 5 * max_freq);
    const double dcell = r / panels;

    const Eigen::Index nm = minor_count(3, 2);
    Vector base_integral = Vector::Zero(nm);
    std::vector<Vec2> pts;
    std::vector<double> wts;
    for (int i = 0; i < panels; ++i)
        for (int j = 0; j < panels; ++j)
            for (std::size_t a = 0; a < gn.size(); ++a)
                for (std::size_t b = 0; b < gn.size(); ++b) {
                    pts.emplace_back((i + 0.5) * dcell + 0.5 * dcell * gn[a],
                                     (j + 0.5) * dcell + 0.5 * dcell * gn[b]);
                    wts.push_back(0.25 * dcell * dcell * gw[a] * gw[b]);
                }
    for (std::size_t q = 0; q < pts.size(); ++q)
        base_integral += wts[q] * test_fn(pts[q]) * minors(du(pts[q])).values;

    std::vector<MinorConvergenceRow> table;
    for (int n : frequencies) {
        Vector integral = Vector::Zero(nm);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const Vec2& x = pts[q];
            Eigen::Matrix<double, 3, 2> Dn = du(x);
            const Vec2 nx = n * x;
            // D[(1/n) phi(n x) psi(x) c] = psi c dphi(nx)^T + (1/n) phi(nx) c dpsi^T
            const Vec2 gphi = dphi(nx);
            const Vec2 gpsi = dpsi(x);
            const double ph = phi(nx);
            const double ps = psi(x);
            Dn += oscillation_amplitude *
                  (ps * psi_dir * gphi.transpose() + (ph / n) * psi_dir * gpsi.transpose());
            integral += wts[q] * test_fn(x) * minors(Dn).values;
        }
        table.push_back({n, (integral - base_integral).cwiseAbs().maxCoeff()});
    }
    return table;
}

} // namespace polymin
