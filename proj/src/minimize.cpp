#include "polymin/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace polymin {

namespace {

double triangle_quality(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double s = 0.5 * (la + lb + lc);
    const double area = 0.5 * std::abs((b - a)(0) * (c - a)(1) - (b - a)(1) * (c - a)(0));
    const double inradius = area / s;
    return inradius / std::max({la, lb, lc});
}

void finalize_mesh(Mesh& mesh) {
    const int nv = mesh.num_vertices();
    mesh.areas.clear();
    mesh.shape_gradients.clear();
    mesh.h = 0;
    mesh.min_quality = 1.0;
    for (auto& tri : mesh.triangles) {
        const Vec2 &a = mesh.vertices[static_cast<std::size_t>(tri[0])],
                   &b = mesh.vertices[static_cast<std::size_t>(tri[1])],
                   &c = mesh.vertices[static_cast<std::size_t>(tri[2])];
        double twice = (b - a)(0) * (c - a)(1) - (b - a)(1) * (c - a)(0);
        if (twice < 0) { // enforce ccw
            std::swap(tri[1], tri[2]);
            twice = -twice;
        }
        if (twice <= 1e-16) throw ValidationError("triangulate: degenerate geometry");
        mesh.areas.push_back(0.5 * twice);
        // barycentric gradients: rows of E^{-1} for E = [b - a, c - a]
        Mat2 E;
        E.col(0) = mesh.vertices[static_cast<std::size_t>(tri[1])] -
                   mesh.vertices[static_cast<std::size_t>(tri[0])];
        E.col(1) = mesh.vertices[static_cast<std::size_t>(tri[2])] -
                   mesh.vertices[static_cast<std::size_t>(tri[0])];
        const Mat2 Einv = E.inverse();
        Eigen::Matrix<double, 2, 3> G;
        G.col(1) = Einv.row(0).transpose();
        G.col(2) = Einv.row(1).transpose();
        G.col(0) = -G.col(1) - G.col(2);
        mesh.shape_gradients.push_back(G);
        const Vec2 &aa = mesh.vertices[static_cast<std::size_t>(tri[0])],
                   &bb = mesh.vertices[static_cast<std::size_t>(tri[1])],
                   &cc = mesh.vertices[static_cast<std::size_t>(tri[2])];
        mesh.h = std::max({mesh.h, (aa - bb).norm(), (bb - cc).norm(), (cc - aa).norm()});
        mesh.min_quality = std::min(mesh.min_quality, triangle_quality(aa, bb, cc));
    }

    // boundary edges appear in exactly one triangle, oriented with the
    // interior on the left, which walks the boundary counterclockwise
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = tri[static_cast<std::size_t>(e)];
            const int b = tri[static_cast<std::size_t>((e + 1) % 3)];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    std::map<int, Mesh::BoundaryEdge> outgoing;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = tri[static_cast<std::size_t>(e)];
            const int b = tri[static_cast<std::size_t>((e + 1) % 3)];
            if (edge_count[{std::min(a, b), std::max(a, b)}] != 1) continue;
            Mesh::BoundaryEdge be;
            be.a = a;
            be.b = b;
            const Vec2 d = mesh.vertices[static_cast<std::size_t>(b)] -
                           mesh.vertices[static_cast<std::size_t>(a)];
            be.length = d.norm();
            be.tangent = d / be.length;
            be.normal = Vec2(be.tangent(1), -be.tangent(0));
            be.midpoint = 0.5 * (mesh.vertices[static_cast<std::size_t>(a)] +
                                 mesh.vertices[static_cast<std::size_t>(b)]);
            outgoing[a] = be;
        }
    if (outgoing.empty()) throw ValidationError("triangulate: no boundary found");

    mesh.is_boundary.assign(static_cast<std::size_t>(nv), 0);
    mesh.boundary_weight.assign(static_cast<std::size_t>(nv), 0.0);
    mesh.boundary_edges.clear();
    mesh.boundary_loop.clear();
    int start = outgoing.begin()->first;
    int v = start;
    do {
        const auto it = outgoing.find(v);
        if (it == outgoing.end()) throw ValidationError("triangulate: open boundary chain");
        const auto& be = it->second;
        mesh.boundary_edges.push_back(be);
        mesh.boundary_loop.push_back(v);
        mesh.is_boundary[static_cast<std::size_t>(v)] = 1;
        mesh.boundary_weight[static_cast<std::size_t>(be.a)] += 0.5 * be.length;
        mesh.boundary_weight[static_cast<std::size_t>(be.b)] += 0.5 * be.length;
        v = be.b;
    } while (v != start);
}

Mesh structured_rectangle(double x0, double x1, double y0, double y1, double h) {
    const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / (h / std::numbers::sqrt2))));
    const int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / (h / std::numbers::sqrt2))));
    Mesh mesh;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    finalize_mesh(mesh);
    return mesh;
}

bool is_axis_aligned_rectangle(const std::vector<Vec2>& v) {
    return v.size() == 4 && std::abs(v[0](1) - v[1](1)) < 1e-15 &&
           std::abs(v[1](0) - v[2](0)) < 1e-15 && std::abs(v[2](1) - v[3](1)) < 1e-15 &&
           std::abs(v[3](0) - v[0](0)) < 1e-15;
}

void refine_once(Mesh& mesh) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = mesh.num_vertices();
        mesh.vertices.push_back(0.5 * (mesh.vertices[static_cast<std::size_t>(a)] +
                                       mesh.vertices[static_cast<std::size_t>(b)]));
        midpoint.emplace(key, idx);
        return idx;
    };
    std::vector<std::array<int, 3>> fine;
    fine.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        fine.push_back({t[0], ab, ca});
        fine.push_back({ab, t[1], bc});
        fine.push_back({ca, bc, t[2]});
        fine.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(fine);
}

} // namespace

Mesh triangulate(const Domain2D& dom, double h) {
    if (h <= 0) throw ValidationError("triangulate: h must be positive");
    if (!dom.is_polygonal())
        throw ValidationError("triangulate: curved domains are not meshed; "
                              "use a polygon approximation");
    const auto& verts = dom.vertices();
    if (is_axis_aligned_rectangle(verts)) {
        const double x0 = verts[0](0), x1 = verts[1](0);
        const double y0 = verts[0](1), y1 = verts[2](1);
        return structured_rectangle(x0, x1, y0, y1, h);
    }

    // convex polygon: centroid fan, refined to the target size
    Vec2 centroid = Vec2::Zero();
    for (const auto& v : verts) centroid += v;
    centroid /= static_cast<double>(verts.size());
    const int n = static_cast<int>(verts.size());
    for (int i = 0; i < n; ++i) {
        const Vec2 &a = verts[static_cast<std::size_t>(i)],
                   &b = verts[static_cast<std::size_t>((i + 1) % n)],
                   &c = verts[static_cast<std::size_t>((i + 2) % n)];
        const double cross = (b - a)(0) * (c - b)(1) - (b - a)(1) * (c - b)(0);
        if (cross < -1e-12)
            throw ValidationError("triangulate: only convex polygons are meshed");
    }
    Mesh mesh;
    mesh.vertices = verts;
    mesh.vertices.push_back(centroid);
    for (int i = 0; i < n; ++i)
        mesh.triangles.push_back({i, (i + 1) % n, n});
    double diam = 0;
    for (int i = 0; i < n; ++i)
        diam = std::max({diam,
                         (verts[static_cast<std::size_t>(i)] - centroid).norm() * 2,
                         (verts[static_cast<std::size_t>(i)] -
                          verts[static_cast<std::size_t>((i + 1) % n)])
                             .norm()});
    while (diam > h) {
        refine_once(mesh);
        diam *= 0.5;
    }
    finalize_mesh(mesh);
    if (mesh.min_quality < 0.2)
        throw ValidationError("triangulate: mesh quality below 0.2 on this geometry");
    return mesh;
}

ConvexRegion ConvexRegion::box(const Vec2& lo, const Vec2& hi) {
    ConvexRegion r;
    r.kind = Kind::Box;
    r.lo = lo;
    r.hi = hi;
    return r;
}

ConvexRegion ConvexRegion::disk(const Vec2& center, double radius) {
    ConvexRegion r;
    r.kind = Kind::Disk;
    r.center = center;
    r.radius = radius;
    return r;
}

Vec2 ConvexRegion::project(const Vec2& y) const {
    if (kind == Kind::Box)
        return Vec2(std::clamp(y(0), lo(0), hi(0)), std::clamp(y(1), lo(1), hi(1)));
    const Vec2 d = y - center;
    const double n = d.norm();
    if (n <= radius) return y;
    return center + radius / n * d;
}

double ConvexRegion::violation(const Vec2& y) const {
    return (y - project(y)).norm();
}

Constraint Constraint::dirichlet_boundary(const Mesh& mesh,
                                          std::function<Vec2(const Vec2&)> u0) {
    Constraint c;
    c.cls = ConstraintClass::A1;
    c.gamma = mesh.boundary_loop;
    c.dirichlet = std::move(u0);
    return c;
}

Constraint Constraint::zero_boundary_mean() {
    Constraint c;
    c.cls = ConstraintClass::A2;
    return c;
}

Constraint Constraint::confined(ConvexRegion region) {
    Constraint c;
    c.cls = ConstraintClass::A3;
    c.region = region;
    return c;
}

Mat2 DiscreteDeformation::gradient(int tri) const {
    const auto& t = mesh->triangles[static_cast<std::size_t>(tri)];
    Eigen::Matrix<double, 2, 3> U;
    for (int l = 0; l < 3; ++l) U.col(l) = nodal.col(t[static_cast<std::size_t>(l)]);
    return U * mesh->shape_gradients[static_cast<std::size_t>(tri)].transpose();
}

double DiscreteDeformation::min_det() const {
    double m = std::numeric_limits<double>::infinity();
    for (int t = 0; t < mesh->num_triangles(); ++t)
        m = std::min(m, gradient(t).determinant());
    return m;
}

double DiscreteDeformation::det_integral() const {
    double sum = 0;
    for (int t = 0; t < mesh->num_triangles(); ++t)
        sum += mesh->areas[static_cast<std::size_t>(t)] * gradient(t).determinant();
    return sum;
}

DiscreteDeformation nodal_identity(const Mesh& mesh) {
    DiscreteDeformation u;
    u.mesh = &mesh;
    u.nodal.resize(2, mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v)
        u.nodal.col(v) = mesh.vertices[static_cast<std::size_t>(v)];
    return u;
}

void project_constraint(DiscreteDeformation& u, const Constraint& c) {
    const Mesh& mesh = *u.mesh;
    switch (c.cls) {
    case ConstraintClass::A1: {
        if (c.gamma.empty()) throw ValidationError("A1 constraint: empty Dirichlet set");
        for (int v : c.gamma)
            u.nodal.col(v) = c.dirichlet(mesh.vertices[static_cast<std::size_t>(v)]);
        return;
    }
    case ConstraintClass::A2: {
        Vec2 mean = Vec2::Zero();
        double total = 0;
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            mean += mesh.boundary_weight[static_cast<std::size_t>(v)] * u.nodal.col(v);
            total += mesh.boundary_weight[static_cast<std::size_t>(v)];
        }
        mean /= total;
        u.nodal.colwise() -= mean;
        return;
    }
    case ConstraintClass::A3:
        for (int v = 0; v < mesh.num_vertices(); ++v)
            u.nodal.col(v) = c.region.project(u.nodal.col(v));
        return;
    }
}

double constraint_residual(const DiscreteDeformation& u, const Constraint& c) {
    const Mesh& mesh = *u.mesh;
    switch (c.cls) {
    case ConstraintClass::A1: {
        double r = 0;
        for (int v : c.gamma)
            r = std::max(r, (u.nodal.col(v) -
                             c.dirichlet(mesh.vertices[static_cast<std::size_t>(v)]))
                                .norm());
        return r;
    }
    case ConstraintClass::A2: {
        Vec2 sum = Vec2::Zero();
        for (int v = 0; v < mesh.num_vertices(); ++v)
            sum += mesh.boundary_weight[static_cast<std::size_t>(v)] * u.nodal.col(v);
        return sum.norm();
    }
    case ConstraintClass::A3: {
        double r = 0;
        for (int v = 0; v < mesh.num_vertices(); ++v)
            r = std::max(r, c.region.violation(u.nodal.col(v)));
        return r;
    }
    }
    return 0;
}

Assembled assemble_energy_and_gradient(const DiscreteDeformation& u,
                                       const BulkDensity& W, const SurfaceDensity& U) {
    const Mesh& mesh = *u.mesh;
    Assembled out;
    out.gradient.setZero(2, mesh.num_vertices());

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Mat2 F = u.gradient(t);
        if (F.determinant() <= 0) {
            out.feasible = false;
            out.infeasible_triangles.push_back(t);
            continue;
        }
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = mesh.areas[static_cast<std::size_t>(t)];
        const Vec2 xc = (mesh.vertices[static_cast<std::size_t>(tri[0])] +
                         mesh.vertices[static_cast<std::size_t>(tri[1])] +
                         mesh.vertices[static_cast<std::size_t>(tri[2])]) /
                        3.0;
        const Vec2 yc = (u.nodal.col(tri[0]) + u.nodal.col(tri[1]) + u.nodal.col(tri[2])) / 3.0;
        out.energy += area * W.value(xc, yc, F);
        const Mat2 P = W.gradient(xc, yc, F);
        const auto& G = mesh.shape_gradients[static_cast<std::size_t>(t)];
        for (int l = 0; l < 3; ++l)
            out.gradient.col(tri[static_cast<std::size_t>(l)]) += area * P * G.col(l);
    }
    if (!out.feasible) return out;

    for (const auto& be : mesh.boundary_edges) {
        Mat2 frame;
        frame.col(0) = be.tangent;
        frame.col(1) = be.normal;
        const Vec2 f = (u.nodal.col(be.b) - u.nodal.col(be.a)) / be.length;
        Matrix F(2, 1);
        F << f.dot(be.tangent), f.dot(be.normal);
        const Vec2 ymid = 0.5 * (u.nodal.col(be.a) + u.nodal.col(be.b));
        out.energy += be.length * U.value(frame, Vector(ymid), F);
        const Matrix gF = U.grad_F(frame, Vector(ymid), F);
        const Vector gy = U.grad_y(frame, Vector(ymid), F);
        const Vec2 chain = gF(0, 0) * be.tangent + gF(1, 0) * be.normal;
        out.gradient.col(be.b) += chain + 0.5 * be.length * Vec2(gy);
        out.gradient.col(be.a) += -chain + 0.5 * be.length * Vec2(gy);
    }
    return out;
}

namespace {

Eigen::Matrix2Xd project_direction(const Eigen::Matrix2Xd& g, const Mesh& mesh,
                                   const Constraint& c) {
    Eigen::Matrix2Xd out = g;
    switch (c.cls) {
    case ConstraintClass::A1:
        for (int v : c.gamma) out.col(v).setZero();
        return out;
    case ConstraintClass::A2: {
        // orthogonal projection onto { sum_v w_v u_v = 0 }, per component
        double w2 = 0;
        Vec2 wg = Vec2::Zero();
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const double w = mesh.boundary_weight[static_cast<std::size_t>(v)];
            w2 += w * w;
            wg += w * g.col(v);
        }
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const double w = mesh.boundary_weight[static_cast<std::size_t>(v)];
            if (w != 0.0) out.col(v) -= (w / w2) * wg;
        }
        return out;
    }
    case ConstraintClass::A3:
        return out; // handled through the projected update
    }
    return out;
}

double stationarity_norm(const DiscreteDeformation& u, const Eigen::Matrix2Xd& grad,
                         const Mesh& mesh, const Constraint& c) {
    if (c.cls == ConstraintClass::A3) {
        // unit-step projected gradient mapping
        DiscreteDeformation trial = u;
        trial.nodal -= grad;
        project_constraint(trial, c);
        return (u.nodal - trial.nodal).norm();
    }
    return project_direction(grad, mesh, c).norm();
}

DiscreteDeformation initial_guess(const Mesh& mesh, const Constraint& c) {
    DiscreteDeformation u = nodal_identity(mesh);
    if (c.cls == ConstraintClass::A1 && !c.gamma.empty()) {
        // radial blend of the boundary data through the weighted boundary
        // centroid; reproduces affine data exactly
        if (c.gamma.size() == mesh.boundary_loop.size()) {
            Vec2 centroid = Vec2::Zero();
            Vec2 data_mean = Vec2::Zero();
            double total = 0;
            for (int v : mesh.boundary_loop) {
                const double w = mesh.boundary_weight[static_cast<std::size_t>(v)];
                centroid += w * mesh.vertices[static_cast<std::size_t>(v)];
                data_mean += w * c.dirichlet(mesh.vertices[static_cast<std::size_t>(v)]);
                total += w;
            }
            centroid /= total;
            data_mean /= total;
            DiscreteDeformation blend = u;
            for (int v = 0; v < mesh.num_vertices(); ++v) {
                if (mesh.is_boundary[static_cast<std::size_t>(v)]) continue;
                const Vec2 x = mesh.vertices[static_cast<std::size_t>(v)];
                // exit point of the centroid ray through x
                double t_exit = std::numeric_limits<double>::infinity();
                const Vec2 d = x - centroid;
                if (d.norm() < 1e-14) {
                    blend.nodal.col(v) = data_mean;
                    continue;
                }
                for (const auto& be : mesh.boundary_edges) {
                    const Vec2 p = mesh.vertices[static_cast<std::size_t>(be.a)];
                    const Vec2 q = mesh.vertices[static_cast<std::size_t>(be.b)];
                    const Mat2 A = (Mat2() << d(0), p(0) - q(0), d(1), p(1) - q(1)).finished();
                    if (std::abs(A.determinant()) < 1e-14) continue;
                    const Vec2 ts = A.inverse() * (p - centroid);
                    if (ts(1) < -1e-12 || ts(1) > 1 + 1e-12 || ts(0) <= 0) continue;
                    t_exit = std::min(t_exit, ts(0));
                }
                if (!std::isfinite(t_exit)) continue; // keep identity position
                const Vec2 exit_pt = centroid + t_exit * d;
                const double lam = 1.0 / t_exit; // |x - centroid| / |exit - centroid|
                blend.nodal.col(v) = data_mean + lam * (c.dirichlet(exit_pt) - data_mean);
            }
            project_constraint(blend, c);
            if (blend.min_det() > 0) return blend;
        }
        project_constraint(u, c);
        if (u.min_det() <= 0)
            throw EvaluationError("minimize: no feasible initial guess for the A1 data");
        return u;
    }
    project_constraint(u, c);
    return u;
}

} // namespace

SolveResult minimize(const Mesh& mesh, const BulkDensity& W, const SurfaceDensity& U,
                     const Constraint& c, const SolveOptions& opts) {
    SolveResult res;
    DiscreteDeformation u = initial_guess(mesh, c);
    if (u.min_det() <= opts.delta_det)
        throw EvaluationError("minimize: initial guess violates the determinant safeguard");

    Assembled cur = assemble_energy_and_gradient(u, W, U);
    if (!cur.feasible) throw EvaluationError("minimize: infeasible initial energy state");

    double step = opts.initial_step;
    auto push_row = [&](int iter, double s) {
        res.trace.push_back({iter, cur.energy,
                             stationarity_norm(u, cur.gradient, mesh, c), u.min_det(), s,
                             constraint_residual(u, c)});
    };
    push_row(0, 0.0);

    for (int it = 1; it <= opts.max_iter; ++it) {
        const Eigen::Matrix2Xd dir = project_direction(cur.gradient, mesh, c);
        const double gnorm = stationarity_norm(u, cur.gradient, mesh, c);
        if (gnorm <= opts.tol) {
            res.converged = true;
            res.stop_reason = "gradient tolerance reached";
            break;
        }

        double s = step;
        bool accepted = false;
        DiscreteDeformation trial = u;
        Assembled next;
        while (s >= 1e-14) {
            trial.nodal = u.nodal - s * dir;
            project_constraint(trial, c);
            if (trial.min_det() > opts.delta_det) {
                next = assemble_energy_and_gradient(trial, W, U);
                const double decrease =
                    opts.armijo / std::max(s, 1e-300) * (trial.nodal - u.nodal).squaredNorm();
                if (next.feasible && next.energy <= cur.energy - decrease) {
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!accepted) {
            res.stop_reason = "line search failure (step below 1e-14)";
            break;
        }
        u = trial;
        cur = next;
        step = std::min(2.0 * s, opts.initial_step);
        push_row(it, s);
    }
    if (res.stop_reason.empty()) res.stop_reason = "iteration limit reached";
    res.solution = u;
    return res;
}

double null_lagrangian_check(const std::vector<DiscreteDeformation>& fields) {
    if (fields.size() < 2)
        throw ValidationError("null_lagrangian_check: need at least two fields");
    const Mesh& mesh = *fields.front().mesh;
    for (const auto& f : fields) {
        if (f.mesh != &mesh)
            throw ValidationError("null_lagrangian_check: fields on different meshes");
        for (int v : mesh.boundary_loop)
            if ((f.nodal.col(v) - fields.front().nodal.col(v)).norm() > 1e-12)
                throw ValidationError("null_lagrangian_check: boundary values differ");
    }
    const double ref = fields.front().det_integral();
    double dev = 0;
    for (const auto& f : fields) dev = std::max(dev, std::abs(f.det_integral() - ref));
    return dev;
}

} // namespace polymin
