#include "lclab/enclosure.hpp"

#include <algorithm>
#include <cmath>

#include "lclab/body.hpp"
#include "lclab/curvature.hpp"
#include "lclab/numerics.hpp"

namespace lclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// half-opening angle of the lens cap around the axis toward the other center
double cap_angle(SpaceformKind kind, double R, double d) {
    double c;
    switch (kind) {
        case SpaceformKind::Euclidean:
            c = d / (2.0 * R);
            break;
        case SpaceformKind::Spherical:
            c = std::cos(R) * (1.0 - std::cos(d)) / (std::sin(d) * std::sin(R));
            break;
        case SpaceformKind::Hyperbolic:
            c = std::cosh(R) * (std::cosh(d) - 1.0) / (std::sinh(d) * std::sinh(R));
            break;
        default:
            c = 1.0;
    }
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// orthonormal tangent basis at `at` with the first vector pointing toward
// `toward` along the geodesic
std::vector<Vec> axis_frame(const Point& at, const Point& toward) {
    LogResult lr = log_and_distance(at, toward);
    Vec e0 = lr.v.v / lr.v.norm();
    std::vector<Vec> frame = tangent_frame(at);
    std::vector<Vec> out{e0};
    for (const Vec& f : frame) {
        Vec w = f;
        for (const Vec& u : out) w -= model_inner(at.kind, w, u) * u;
        double nn = std::sqrt(std::max(0.0, model_inner(at.kind, w, w)));
        if (nn < 1e-8) continue;
        out.push_back(w / nn);
        if (static_cast<int>(out.size()) == at.dim()) break;
    }
    return out;
}

void sample_cap(const LensSpec& lens, const Point& apex_center, const Point& other,
                int per_cap, std::vector<Point>& out) {
    double R = lens.lc.radius();
    double phi_star = cap_angle(lens.kind, R, lens.d);
    std::vector<Vec> frame = axis_frame(apex_center, other);
    const Vec& axis = frame[0];
    if (apex_center.dim() == 2) {
        for (int k = 0; k < per_cap; ++k) {
            double phi = phi_star * (2.0 * k / (per_cap - 1) - 1.0);
            Vec dir = std::cos(phi) * axis + std::sin(phi) * frame[1];
            out.push_back(exp_map(make_tangent(apex_center, R * dir)));
        }
        return;
    }
    // spiral over the cap: uniform in the axial coordinate, golden angle in
    // longitude; k = 0 is the apex, the last ring sits on the rim
    double z_lo = std::cos(phi_star);
    double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < per_cap; ++k) {
        double z = 1.0 - (1.0 - z_lo) * k / (per_cap - 1);
        double phi = std::acos(std::clamp(z, -1.0, 1.0));
        double psi = golden * k;
        Vec dir = std::cos(phi) * axis +
                  std::sin(phi) * (std::cos(psi) * frame[1] + std::sin(psi) * frame[2]);
        out.push_back(exp_map(make_tangent(apex_center, R * dir)));
    }
}

}  // namespace

LensSpec make_lens_spec(const LambdaClass& lc, const Point& p, const Point& q) {
    if (p.kind != lc.kind || q.kind != lc.kind)
        throw DomainError("lens centers live in a different spaceform than lambda");
    double R = lc.radius();  // throws DomainError when lambda is inadmissible
    double d = distance(p, q);
    if (d <= 1e-14) throw DegenerateLens("coincident supporting centers form no lens");
    if (d >= 2.0 * R) throw DomainError("supporting balls too far apart to intersect");
    LensSpec lens;
    lens.kind = lc.kind;
    lens.lc = lc;
    lens.p = p;
    lens.q = q;
    lens.d = d;
    return lens;
}

LensSpec lens_from_supports(const RadialBody& body, double lambda) {
    double R = supporting_radius(body.kind, lambda);
    std::vector<Point> pts = surface_points(body);
    std::vector<Vec> nus = surface_normals(body);
    int N = body.size();
    std::vector<Point> centers;
    centers.reserve(N);
    for (int j = 0; j < N; ++j)
        centers.push_back(exp_map(make_tangent(pts[j], R * nus[j])));

    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            double d = distance(centers[i], centers[j]);
            if (d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    if (best <= 1e-10)
        throw TrivialBody("all supporting centers coincide: the body is the extremal ball");

    LensSpec lens = make_lens_spec(radius_of_lambda(body.kind, lambda),
                                   centers[bi], centers[bj]);
    for (const Point& x : pts) {
        if (distance(lens.p, x) > R + 1e-8 || distance(lens.q, x) > R + 1e-8)
            throw MarginViolation("body escapes the supporting lens");
    }
    return lens;
}

std::vector<Point> lens_boundary_samples(const LensSpec& lens, int per_cap) {
    if (per_cap <= 0) per_cap = lens.p.dim() == 2 ? 4096 : 16384;
    if (per_cap < 2) throw DomainError("need at least two samples per cap");
    std::vector<Point> out;
    out.reserve(2 * per_cap);
    sample_cap(lens, lens.p, lens.q, per_cap, out);
    sample_cap(lens, lens.q, lens.p, per_cap, out);
    return out;
}

EnclosureResult enclosing_ball(const LensSpec& lens, int per_cap) {
    EnclosureResult res;
    res.center = geodesic_interpolate(lens.p, lens.q, 0.5);
    double rho = 0.0;
    for (const Point& x : lens_boundary_samples(lens, per_cap))
        rho = std::max(rho, distance(res.center, x));
    res.rho = rho;
    res.margin = lens.lc.radius() - rho;
    if (!(res.margin > 0.0))
        throw MarginViolation("midpoint ball fails to strictly enclose the lens");
    return res;
}

CircumradiusResult circumradius_bruteforce(const LensSpec& lens, int centers,
                                           int per_cap) {
    if (centers < 3) throw DomainError("need at least three candidate centers");
    std::vector<Point> samples = lens_boundary_samples(lens, per_cap);
    CircumradiusResult res;
    res.radius = 1e300;
    for (int i = 0; i < centers; ++i) {
        double s = static_cast<double>(i) / (centers - 1);
        Point c = geodesic_interpolate(lens.p, lens.q, s);
        double r = 0.0;
        for (const Point& x : samples) r = std::max(r, distance(c, x));
        if (r < res.radius) {
            res.radius = r;
            res.s = s;
        }
    }
    return res;
}

BetaReport beta_profile_check(const LensSpec& lens, const Point& z, int samples,
                              double tol) {
    if (samples < 3) throw DomainError("need at least three profile samples");
    double R = lens.lc.radius();
    if (distance(z, lens.p) > R + 1e-12 || distance(z, lens.q) > R + 1e-12)
        throw DomainError("probe point lies outside the lens");

    BetaReport rep;
    rep.t.resize(samples);
    rep.beta.resize(samples);
    for (int k = 0; k < samples; ++k) {
        double t = static_cast<double>(k) / (samples - 1);
        Point g = geodesic_interpolate(lens.p, lens.q, t);
        rep.t[k] = t;
        rep.beta[k] = warp_functions(lens.kind, distance(z, g)).antiderivative;
    }

    double scale = 1.0;
    for (double b : rep.beta) scale = std::max(scale, std::abs(b));

    if (lens.kind == SpaceformKind::Spherical) {
        // beta(t) = a cos(d t) + b sin(d t): two-parameter fit at the known
        // frequency, residual judged against the profile scale
        Eigen::MatrixXd M(samples, 2);
        Eigen::VectorXd y(samples);
        for (int k = 0; k < samples; ++k) {
            M(k, 0) = std::cos(lens.d * rep.t[k]);
            M(k, 1) = std::sin(lens.d * rep.t[k]);
            y[k] = rep.beta[k];
        }
        Eigen::Vector2d ab = M.colPivHouseholderQr().solve(y);
        double worst = 0.0;
        for (int k = 0; k < samples; ++k)
            worst = std::max(worst, std::abs(M.row(k).dot(ab) - y[k]));
        rep.residual = worst / scale;
        rep.convex_or_sinusoid = rep.residual <= tol;
    } else {
        bool ok = true;
        for (int k = 1; k + 1 < samples; ++k) {
            double dd = rep.beta[k - 1] - 2.0 * rep.beta[k] + rep.beta[k + 1];
            if (dd < -tol * scale) {
                ok = false;
                break;
            }
        }
        rep.convex_or_sinusoid = ok;
    }

    double ends = std::max(rep.beta.front(), rep.beta.back());
    double cap = warp_functions(lens.kind, R).antiderivative;
    bool ok = ends <= cap + tol * scale;
    for (int k = 1; k + 1 < samples && ok; ++k)
        if (rep.beta[k] > ends + tol * scale) ok = false;
    rep.end_maximal = ok;
    return rep;
}

}  // namespace lclab
