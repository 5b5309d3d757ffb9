#include "lclab/body.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "lclab/fourier.hpp"
#include "lclab/numerics.hpp"

namespace lclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using json = nlohmann::json;


// signed solid angle of a direction triangle (unit 3-vectors)
double tri_solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                       const Eigen::Vector3d& c) {
    double det = a.dot(b.cross(c));
    double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(det, denom);
}

// periodic cubic spline on a uniform angle grid (cyclic tridiagonal solve)
struct PeriodicCubic {
    int N;
    double h;
    Eigen::VectorXd f, M;  // values and second derivatives at the knots

    explicit PeriodicCubic(const Eigen::VectorXd& values)
        : N(static_cast<int>(values.size())), h(2.0 * kPi / N), f(values) {
        Eigen::VectorXd rhs(N);
        for (int j = 0; j < N; ++j) {
            double d2 = f[(j + 1) % N] - 2.0 * f[j] + f[(j + N - 1) % N];
            rhs[j] = 6.0 * d2 / (h * h);
        }
        // cyclic system M_{j-1} + 4 M_j + M_{j+1} = rhs_j: Sherman-Morrison
        // around a plain Thomas solve (sub = sup = 1)
        const double gamma = -4.0;
        Eigen::VectorXd diag = Eigen::VectorXd::Constant(N, 4.0);
        diag[0] -= gamma;
        diag[N - 1] -= 1.0 / gamma;
        auto tridiag = [&](Eigen::VectorXd d) {
            Eigen::VectorXd c(N);
            c[0] = 1.0 / diag[0];
            d[0] /= diag[0];
            for (int i = 1; i < N; ++i) {
                double denom = diag[i] - c[i - 1];
                c[i] = 1.0 / denom;
                d[i] = (d[i] - d[i - 1]) / denom;
            }
            for (int i = N - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
            return d;
        };
        Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
        u[0] = gamma;
        u[N - 1] = 1.0;
        Eigen::VectorXd y = tridiag(rhs);
        Eigen::VectorXd z = tridiag(u);
        double vy = y[0] + y[N - 1] / gamma;
        double vz = 1.0 + z[0] + z[N - 1] / gamma;
        M = y - (vy / vz) * z;
    }

    double eval(double theta) const {
        double t = std::fmod(theta, 2.0 * kPi);
        if (t < 0) t += 2.0 * kPi;
        int j = std::min(N - 1, static_cast<int>(t / h));
        double s = t - j * h;
        int j1 = (j + 1) % N;
        double A = (h - s) / h, B = s / h;
        return A * f[j] + B * f[j1] +
               ((A * A * A - A) * M[j] + (B * B * B - B) * M[j1]) * h * h / 6.0;
    }
};

}  // namespace

double radial_volume_antiderivative(SpaceformKind kind, int n, double r) {
    if (n == 1) {
        switch (kind) {
            case SpaceformKind::Euclidean: return 0.5 * r * r;
            case SpaceformKind::Spherical: return 1.0 - std::cos(r);
            case SpaceformKind::Hyperbolic: return std::cosh(r) - 1.0;
        }
    } else {
        switch (kind) {
            case SpaceformKind::Euclidean: return r * r * r / 3.0;
            case SpaceformKind::Spherical: return 0.5 * (r - std::sin(r) * std::cos(r));
            case SpaceformKind::Hyperbolic: return 0.5 * (std::sinh(r) * std::cosh(r) - r);
        }
    }
    throw DomainError("bad spaceform kind");
}

RadialBody make_radial_body(SpaceformKind kind, const Point& center,
                            std::shared_ptr<const SphereGrid> grid,
                            const Eigen::VectorXd& rho) {
    if (!grid) throw DomainError("radial body needs a grid");
    if (rho.size() != grid->size()) throw DomainError("rho size does not match grid");
    if (center.kind != kind) throw DomainError("center kind mismatch");
    int want_dim = grid->n + 1;
    if (center.dim() != want_dim) throw DomainError("center dimension does not match grid");
    for (int i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
            throw DomainError("radial function must be positive and finite");
        if (kind == SpaceformKind::Spherical && rho[i] >= kPi / 2)
            throw DomainError("spherical body must stay inside the open hemisphere");
    }
    RadialBody b;
    b.kind = kind;
    b.center = center;
    b.grid = std::move(grid);
    b.rho = rho;
    b.smooth_flags.assign(rho.size(), 1);
    b.frame = tangent_frame(center);
    return b;
}

Vec node_direction(const RadialBody& body, int i) {
    const auto& row = body.grid->nodes;
    Vec d = row(i, 0) * body.frame[0];
    for (int k = 1; k < row.cols(); ++k) d += row(i, k) * body.frame[k];
    return d;
}

Point node_position(const RadialBody& body, int i) {
    Vec dir = node_direction(body, i);
    double r = body.rho[i];
    Point out;
    out.kind = body.kind;
    switch (body.kind) {
        case SpaceformKind::Euclidean:
            out.x = body.center.x + r * dir;
            break;
        case SpaceformKind::Spherical:
            out.x = std::cos(r) * body.center.x + std::sin(r) * dir;
            break;
        case SpaceformKind::Hyperbolic:
            out.x = std::cosh(r) * body.center.x + std::sinh(r) * dir;
            break;
    }
    return out;
}

std::vector<Point> surface_points(const RadialBody& body) {
    std::vector<Point> pts;
    pts.reserve(body.size());
    for (int i = 0; i < body.size(); ++i) pts.push_back(node_position(body, i));
    return pts;
}

RadialBody make_ball(SpaceformKind kind, const Point& center, double R,
                     std::shared_ptr<const SphereGrid> grid) {
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    if (kind == SpaceformKind::Spherical && R >= kPi / 2)
        throw DomainError("spherical ball radius must be < pi/2");
    int N = grid->size();
    return make_radial_body(kind, center, std::move(grid), Eigen::VectorXd::Constant(N, R));
}

Eigen::VectorXd harmonic_profile(const SphereGrid& grid, int mode) {
    int N = grid.size();
    Eigen::VectorXd out(N);
    if (grid.n == 1) {
        if (mode < 1) throw DomainError("circle profile mode must be >= 1");
        for (int j = 0; j < N; ++j) {
            double th = std::atan2(grid.nodes(j, 1), grid.nodes(j, 0));
            out[j] = std::cos(mode * th);
        }
        return out;
    }
    for (int j = 0; j < N; ++j) {
        double x = grid.nodes(j, 0), y = grid.nodes(j, 1), z = grid.nodes(j, 2);
        switch (mode) {
            case 1: out[j] = z; break;
            case 2: out[j] = x; break;
            case 3: out[j] = y; break;
            case 4: out[j] = x * y; break;
            case 5: out[j] = y * z; break;
            case 6: out[j] = z * x; break;
            case 7: out[j] = x * x - y * y; break;
            case 8: out[j] = 0.5 * (3.0 * z * z - 1.0); break;
            case 9: out[j] = 0.5 * z * (5.0 * z * z - 3.0); break;
            default: throw DomainError("unknown icosphere profile mode");
        }
    }
    return out;
}

RadialBody make_perturbed_ball(SpaceformKind kind, const Point& center, double R,
                               std::shared_ptr<const SphereGrid> grid, int mode,
                               double amplitude) {
    Eigen::VectorXd prof = harmonic_profile(*grid, mode);
    Eigen::VectorXd rho = R * (1.0 + amplitude * prof.array());
    return make_radial_body(kind, center, std::move(grid), rho);
}

RadialBody make_lens_body(const LensSpec& lens, std::shared_ptr<const SphereGrid> grid) {
    double R = lens.lc.radius();
    Point c = geodesic_interpolate(lens.p, lens.q, 0.5);
    auto member = [&](const Point& x) {
        return distance(x, lens.p) <= R && distance(x, lens.q) <= R;
    };
    int N = grid->size();
    Eigen::VectorXd rho(N);
    RadialBody probe;  // only for direction bookkeeping
    probe.kind = lens.kind;
    probe.center = c;
    probe.grid = grid;
    probe.frame = tangent_frame(c);
    for (int i = 0; i < N; ++i) {
        Vec dir = node_direction(probe, i);
        auto radial_member = [&](double r) {
            Point x = exp_map(TangentVector{c, r * dir});
            return member(x) ? 1.0 : -1.0;
        };
        rho[i] = bisect(radial_member, 0.0, R * (1.0 + 1e-9), 1e-12);
    }
    return make_radial_body(lens.kind, c, std::move(grid), rho);
}

Eigen::VectorXd surface_area_weights(const RadialBody& body) {
    const SphereGrid& g = *body.grid;
    int N = body.size();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
    if (g.n == 1) {
        Eigen::VectorXd up = fourier::derivative(body.rho, 1);
        double w = 2.0 * kPi / N;
        for (int j = 0; j < N; ++j) {
            WarpValues wv = warp_functions(body.kind, body.rho[j]);
            a[j] = std::hypot(up[j], wv.theta) * w;
        }
        return a;
    }
    std::vector<Point> pts = surface_points(body);
    for (const auto& f : g.faces) {
        double ab = distance(pts[f[0]], pts[f[1]]);
        double bc = distance(pts[f[1]], pts[f[2]]);
        double ca = distance(pts[f[2]], pts[f[0]]);
        double area3 = triangle_area(ab, bc, ca) / 3.0;
        a[f[0]] += area3;
        a[f[1]] += area3;
        a[f[2]] += area3;
    }
    return a;
}

Measures measure(const RadialBody& body) {
    const SphereGrid& g = *body.grid;
    Measures m;
    if (g.n == 1) {
        Eigen::VectorXd a = surface_area_weights(body);
        m.area = a.sum();
        double w = 2.0 * kPi / body.size();
        for (int j = 0; j < body.size(); ++j)
            m.volume += radial_volume_antiderivative(body.kind, 1, body.rho[j]) * w;
        return m;
    }
    std::vector<Point> pts = surface_points(body);
    for (const auto& f : g.faces) {
        double ab = distance(pts[f[0]], pts[f[1]]);
        double bc = distance(pts[f[1]], pts[f[2]]);
        double ca = distance(pts[f[2]], pts[f[0]]);
        m.area += triangle_area(ab, bc, ca);
    }
    for (int j = 0; j < body.size(); ++j)
        m.volume += g.weights[j] * radial_volume_antiderivative(body.kind, 2, body.rho[j]);
    return m;
}

Measures closed_form_ball(SpaceformKind kind, int n, double R) {
    double sphere = n == 1 ? 2.0 * kPi : 4.0 * kPi;
    WarpValues wv = warp_functions(kind, R);
    Measures m;
    m.area = sphere * std::pow(wv.theta, n);
    m.volume = sphere * radial_volume_antiderivative(kind, n, R);
    return m;
}

Measures closed_form_sausage(double lambda, double L) {
    if (!(lambda > 0.0) || !(L >= 0.0)) throw DomainError("sausage needs lambda > 0, L >= 0");
    double r = 1.0 / lambda;
    Measures m;
    m.area = 4.0 * kPi * r * r + 2.0 * kPi * r * L;
    m.volume = 4.0 * kPi * r * r * r / 3.0 + kPi * r * r * L;
    return m;
}

Measures closed_form_lens2d(double lambda, double d) {
    double r = 1.0 / lambda;
    if (!(d > 0.0) || !(d < 2.0 * r)) throw DomainError("lens needs 0 < d < 2/lambda");
    double alpha = std::acos(d / (2.0 * r));  // half-angle of each arc
    Measures m;
    m.area = 4.0 * r * alpha;
    m.volume = 2.0 * r * r * alpha - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
    return m;
}

bool contains(const RadialBody& body, const Point& p) {
    if (p.kind != body.kind) throw DomainError("point kind mismatch");
    LogResult lr = log_and_distance(body.center, p);
    if (lr.distance < 1e-14) return true;
    Vec dir = lr.v.v / lr.distance;
    const SphereGrid& g = *body.grid;
    if (g.n == 1) {
        double a = std::atan2(model_inner(body.kind, dir, body.frame[1]),
                              model_inner(body.kind, dir, body.frame[0]));
        PeriodicCubic spline(body.rho);
        return lr.distance <= spline.eval(a) + 1e-12;
    }
    Eigen::Vector3d xi;
    for (int k = 0; k < 3; ++k) xi[k] = model_inner(body.kind, dir, body.frame[k]);
    xi.normalize();
    // nearest node, then its faces; fall back to a full scan
    int best = 0;
    double bd = -2.0;
    for (int i = 0; i < g.size(); ++i) {
        double dot = xi.dot(g.nodes.row(i).transpose());
        if (dot > bd) {
            bd = dot;
            best = i;
        }
    }
    auto try_face = [&](int fi, double& value) {
        const auto& f = g.faces[fi];
        Eigen::Matrix3d M;
        for (int k = 0; k < 3; ++k) M.col(k) = g.nodes.row(f[k]).transpose();
        Eigen::Vector3d beta = M.fullPivLu().solve(xi);
        if (beta.minCoeff() < -1e-10) return false;
        double s = beta.sum();
        if (s <= 0.0) return false;
        beta /= s;
        value = beta[0] * body.rho[f[0]] + beta[1] * body.rho[f[1]] + beta[2] * body.rho[f[2]];
        return true;
    };
    double val = 0.0;
    for (int fi : g.node_faces[best])
        if (try_face(fi, val)) return lr.distance <= val + 1e-12;
    for (int j : g.neighbors[best])
        for (int fi : g.node_faces[j])
            if (try_face(fi, val)) return lr.distance <= val + 1e-12;
    for (int fi = 0; fi < static_cast<int>(g.faces.size()); ++fi)
        if (try_face(fi, val)) return lr.distance <= val + 1e-12;
    throw NumericalDegeneracy("direction not covered by the grid");
}

std::vector<Vec> surface_normals(const RadialBody& body) {
    const SphereGrid& g = *body.grid;
    int N = body.size();
    std::vector<Vec> out(N);
    if (g.n == 1) {
        Eigen::VectorXd up = fourier::derivative(body.rho, 1);
        for (int j = 0; j < N; ++j) {
            double th = 2.0 * kPi * j / N;
            Vec dir = node_direction(body, j);
            Vec tang = -std::sin(th) * body.frame[0] + std::cos(th) * body.frame[1];
            WarpValues wv = warp_functions(body.kind, body.rho[j]);
            Vec radial = polar_radial_direction(body.center, dir, body.rho[j]);
            Vec w = radial - (up[j] / wv.theta) * tang;
            double nn = std::sqrt(model_inner(body.kind, w, w));
            out[j] = -w / nn;
        }
        return out;
    }
    for (int j = 0; j < N; ++j) {
        const auto& st = g.stencils[j];
        Eigen::VectorXd vals(st.size());
        for (size_t r = 0; r < st.size(); ++r) vals[r] = body.rho[st[r]];
        Eigen::VectorXd coef = g.fit[j] * vals;
        Vec t1m = Vec::Zero(body.center.x.size());
        Vec t2m = Vec::Zero(body.center.x.size());
        for (int k = 0; k < 3; ++k) {
            t1m += g.frame1(j, k) * body.frame[k];
            t2m += g.frame2(j, k) * body.frame[k];
        }
        WarpValues wv = warp_functions(body.kind, body.rho[j]);
        Vec dir = node_direction(body, j);
        Vec radial = polar_radial_direction(body.center, dir, body.rho[j]);
        Vec w = radial - (coef[1] / wv.theta) * t1m - (coef[2] / wv.theta) * t2m;
        double nn = std::sqrt(model_inner(body.kind, w, w));
        out[j] = -w / nn;
    }
    return out;
}

double typical_spacing(const RadialBody& body) {
    if (body.grid->n == 1) return measure(body).area / body.size();
    std::vector<Point> pts = surface_points(body);
    double s = 0.0;
    long cnt = 0;
    for (int i = 0; i < body.size(); ++i)
        for (int j : body.grid->neighbors[i])
            if (j > i) {
                s += distance(pts[i], pts[j]);
                ++cnt;
            }
    return s / static_cast<double>(cnt);
}

Measures lagrangian_measure(const RadialBody& body, const std::vector<Point>& pts) {
    const SphereGrid& g = *body.grid;
    if (static_cast<int>(pts.size()) != body.size())
        throw DomainError("point set does not match grid");
    Measures m;
    if (g.n == 1) {
        int N = body.size();
        int dim = static_cast<int>(body.center.x.size());
        // area from the exact tangent of the moved curve (spectral in theta)
        Eigen::MatrixXd coords(N, dim);
        for (int j = 0; j < N; ++j) coords.row(j) = pts[j].x.transpose();
        Eigen::MatrixXd dcoords(N, dim);
        for (int k = 0; k < dim; ++k)
            dcoords.col(k) = fourier::derivative(coords.col(k), 1);
        double w = 2.0 * kPi / N;
        Eigen::VectorXd r(N), dev(N);
        for (int j = 0; j < N; ++j) {
            Vec dy = dcoords.row(j).transpose();
            double q = model_inner(body.kind, dy, dy);
            m.area += std::sqrt(std::max(0.0, q)) * w;
            LogResult lr = log_and_distance(body.center, pts[j]);
            r[j] = lr.distance;
            Vec dir = lr.v.v / std::max(lr.distance, 1e-300);
            double psi = std::atan2(model_inner(body.kind, dir, body.frame[1]),
                                    model_inner(body.kind, dir, body.frame[0]));
            double th = 2.0 * kPi * j / N;
            double delta = std::remainder(psi - th, 2.0 * kPi);
            dev[j] = delta;
        }
        Eigen::VectorXd dpsi = fourier::derivative(dev, 1).array() + 1.0;
        for (int j = 0; j < N; ++j) {
            if (dpsi[j] <= 1e-9) throw GraphFailure("moved curve is no longer a radial graph");
            m.volume += radial_volume_antiderivative(body.kind, 1, r[j]) * dpsi[j] * w;
        }
        return m;
    }
    int N = body.size();
    Eigen::MatrixXd xi(N, 3);
    Eigen::VectorXd r(N);
    for (int j = 0; j < N; ++j) {
        LogResult lr = log_and_distance(body.center, pts[j]);
        r[j] = lr.distance;
        Vec dir = lr.v.v / std::max(lr.distance, 1e-300);
        for (int k = 0; k < 3; ++k) xi(j, k) = model_inner(body.kind, dir, body.frame[k]);
        xi.row(j).normalize();
    }
    for (const auto& f : g.faces) {
        double ab = distance(pts[f[0]], pts[f[1]]);
        double bc = distance(pts[f[1]], pts[f[2]]);
        double ca = distance(pts[f[2]], pts[f[0]]);
        m.area += triangle_area(ab, bc, ca);
        double omega = tri_solid_angle(xi.row(f[0]), xi.row(f[1]), xi.row(f[2]));
        if (omega <= 0.0) throw GraphFailure("moved mesh is no longer a radial graph");
        double phi = (radial_volume_antiderivative(body.kind, 2, r[f[0]]) +
                      radial_volume_antiderivative(body.kind, 2, r[f[1]]) +
                      radial_volume_antiderivative(body.kind, 2, r[f[2]])) / 3.0;
        m.volume += omega * phi;
    }
    return m;
}

std::string body_to_json(const RadialBody& body) {
    json j;
    j["kind"] = kind_name(body.kind);
    j["n"] = body.grid->n;
    j["center"] = std::vector<double>(body.center.x.data(),
                                      body.center.x.data() + body.center.x.size());
    j["grid"] = {{"type", body.grid->type}, {"param", body.grid->param}};
    j["rho"] = std::vector<double>(body.rho.data(), body.rho.data() + body.rho.size());
    j["smooth_flags"] = body.smooth_flags;
    return j.dump();
}

RadialBody body_from_json(const std::string& text) {
    json j = json::parse(text);
    SpaceformKind kind = kind_from_name(j.at("kind").get<std::string>());
    auto cvec = j.at("center").get<std::vector<double>>();
    Vec c(cvec.size());
    for (size_t i = 0; i < cvec.size(); ++i) c[i] = cvec[i];
    Point center = make_point(kind, c);
    std::string type = j.at("grid").at("type").get<std::string>();
    int param = j.at("grid").at("param").get<int>();
    std::shared_ptr<const SphereGrid> grid =
        type == "circle" ? SphereGrid::circle(param) : SphereGrid::icosphere(param);
    auto rvec = j.at("rho").get<std::vector<double>>();
    Eigen::VectorXd rho(rvec.size());
    for (size_t i = 0; i < rvec.size(); ++i) rho[i] = rvec[i];
    RadialBody body = make_radial_body(kind, center, grid, rho);
    if (j.contains("smooth_flags"))
        body.smooth_flags = j.at("smooth_flags").get<std::vector<std::uint8_t>>();
    return body;
}

}  // namespace lclab
