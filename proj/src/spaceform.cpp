#include "lclab/spaceform.hpp"

#include <cmath>
#include <limits>

namespace lclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool all_finite(const Vec& v) {
    for (int i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

// sin(x)/x and sinh(x)/x with the removable singularity handled.
double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double sinhc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

void snap_to_model(Point& p) {
    switch (p.kind) {
        case SpaceformKind::Euclidean:
            break;
        case SpaceformKind::Spherical:
            p.x /= p.x.norm();
            break;
        case SpaceformKind::Hyperbolic: {
            double q = -minkowski_inner(p.x, p.x);
            p.x /= std::sqrt(q);
            break;
        }
    }
}

}  // namespace

const char* kind_name(SpaceformKind kind) {
    switch (kind) {
        case SpaceformKind::Euclidean: return "euclidean";
        case SpaceformKind::Spherical: return "spherical";
        case SpaceformKind::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

SpaceformKind kind_from_name(const std::string& name) {
    if (name == "euclidean" || name == "E") return SpaceformKind::Euclidean;
    if (name == "spherical" || name == "S") return SpaceformKind::Spherical;
    if (name == "hyperbolic" || name == "H") return SpaceformKind::Hyperbolic;
    throw DomainError("unknown spaceform name: " + name);
}

int sectional_curvature(SpaceformKind kind) {
    switch (kind) {
        case SpaceformKind::Euclidean: return 0;
        case SpaceformKind::Spherical: return 1;
        case SpaceformKind::Hyperbolic: return -1;
    }
    return 0;
}

double ricci_normal(SpaceformKind kind, int n) {
    return static_cast<double>(n) * sectional_curvature(kind);
}

double minkowski_inner(const Vec& a, const Vec& b) {
    double s = -a[0] * b[0];
    for (int i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double model_inner(SpaceformKind kind, const Vec& a, const Vec& b) {
    if (kind == SpaceformKind::Hyperbolic) return minkowski_inner(a, b);
    return a.dot(b);
}

int Point::dim() const {
    int m = static_cast<int>(x.size());
    return kind == SpaceformKind::Euclidean ? m : m - 1;
}

Point make_point(SpaceformKind kind, const Vec& coords) {
    if (!all_finite(coords)) throw NumericalDegeneracy("point with non-finite coordinates");
    Point p{kind, coords};
    switch (kind) {
        case SpaceformKind::Euclidean:
            break;
        case SpaceformKind::Spherical: {
            if (std::abs(coords.norm() - 1.0) > 1e-9)
                throw DomainError("spherical point off the unit sphere");
            break;
        }
        case SpaceformKind::Hyperbolic: {
            if (coords[0] <= 0.0) throw DomainError("hyperboloid point with x0 <= 0");
            if (std::abs(minkowski_inner(coords, coords) + 1.0) > 1e-9)
                throw DomainError("point off the unit hyperboloid");
            break;
        }
    }
    snap_to_model(p);
    return p;
}

Point model_origin(SpaceformKind kind, int space_dim) {
    Vec x;
    if (kind == SpaceformKind::Euclidean) {
        x = Vec::Zero(space_dim);
    } else {
        x = Vec::Zero(space_dim + 1);
        x[0] = 1.0;
    }
    return Point{kind, x};
}

double TangentVector::norm() const {
    double q = model_inner(base.kind, v, v);
    return std::sqrt(std::max(0.0, q));
}

Vec project_to_tangent(const Point& p, const Vec& v) {
    switch (p.kind) {
        case SpaceformKind::Euclidean:
            return v;
        case SpaceformKind::Spherical:
            return v - v.dot(p.x) * p.x;
        case SpaceformKind::Hyperbolic:
            return v + minkowski_inner(v, p.x) * p.x;
    }
    return v;
}

TangentVector make_tangent(const Point& base, const Vec& v) {
    if (!all_finite(v)) throw NumericalDegeneracy("tangent with non-finite coordinates");
    if (base.kind != SpaceformKind::Euclidean) {
        double drift = std::abs(model_inner(base.kind, v, base.x));
        if (drift > 1e-9 * (1.0 + v.norm()))
            throw DomainError("vector not tangent to the model at its base point");
    }
    return TangentVector{base, project_to_tangent(base, v)};
}

WarpValues warp_functions(SpaceformKind kind, double r) {
    if (!(r >= 0.0)) throw DomainError("warp functions need r >= 0");
    switch (kind) {
        case SpaceformKind::Euclidean:
            return {r, 1.0, 0.5 * r * r};
        case SpaceformKind::Spherical:
            if (r > kPi) throw DomainError("spherical warp beyond r = pi");
            return {std::sin(r), std::cos(r), -std::cos(r)};
        case SpaceformKind::Hyperbolic:
            return {std::sinh(r), std::cosh(r), std::cosh(r)};
    }
    throw DomainError("bad spaceform kind");
}

double LambdaClass::radius() const {
    if (!radius_opt)
        throw DomainError("no ball of constant curvature lambda in this spaceform");
    return *radius_opt;
}

bool lambda_in_interval(SpaceformKind kind, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) return false;
    if (kind == SpaceformKind::Hyperbolic) return lambda > 1.0;
    return true;
}

LambdaClass radius_of_lambda(SpaceformKind kind, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("lambda must be positive and finite");
    LambdaClass lc{kind, lambda, std::nullopt};
    switch (kind) {
        case SpaceformKind::Euclidean:
            lc.radius_opt = 1.0 / lambda;
            break;
        case SpaceformKind::Spherical:
            lc.radius_opt = std::atan(1.0 / lambda);  // arccot in (0, pi/2)
            break;
        case SpaceformKind::Hyperbolic:
            if (lambda > 1.0) lc.radius_opt = std::atanh(1.0 / lambda);  // arccoth
            break;
    }
    return lc;
}

double supporting_radius(SpaceformKind kind, double lambda) {
    return radius_of_lambda(kind, lambda).radius();
}

double lambda_of_radius(SpaceformKind kind, double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("radius must be positive");
    switch (kind) {
        case SpaceformKind::Euclidean:
            return 1.0 / R;
        case SpaceformKind::Spherical:
            if (R >= kPi / 2) throw DomainError("spherical supporting radius must be < pi/2");
            return 1.0 / std::tan(R);
        case SpaceformKind::Hyperbolic:
            return 1.0 / std::tanh(R);
    }
    throw DomainError("bad spaceform kind");
}

Point exp_map(const TangentVector& tv) {
    const Point& p = tv.base;
    const Vec& v = tv.v;
    if (!all_finite(v)) throw NumericalDegeneracy("exp of non-finite vector");
    double x = tv.norm();
    Point out;
    out.kind = p.kind;
    switch (p.kind) {
        case SpaceformKind::Euclidean:
            out.x = p.x + v;
            break;
        case SpaceformKind::Spherical:
            if (x >= kPi) throw DomainError("spherical exp needs |v| < pi");
            out.x = std::cos(x) * p.x + sinc(x) * v;
            break;
        case SpaceformKind::Hyperbolic:
            out.x = std::cosh(x) * p.x + sinhc(x) * v;
            break;
    }
    snap_to_model(out);
    return out;
}

LogResult log_and_distance(const Point& p, const Point& q) {
    if (p.kind != q.kind) throw DomainError("log between different spaceforms");
    switch (p.kind) {
        case SpaceformKind::Euclidean: {
            Vec v = q.x - p.x;
            return {TangentVector{p, v}, v.norm()};
        }
        case SpaceformKind::Spherical: {
            if ((p.x + q.x).norm() < 1e-8)
                throw DomainError("log undefined for an antipodal pair");
            double d = 2.0 * std::asin(std::min(1.0, 0.5 * (q.x - p.x).norm()));
            double c = std::cos(d);
            Vec w = q.x - c * p.x;  // |w| = sin d
            Vec v = d < 1e-14 ? Vec(Vec::Zero(p.x.size())) : Vec(w / sinc(d));
            return {TangentVector{p, v}, d};
        }
        case SpaceformKind::Hyperbolic: {
            Vec delta = q.x - p.x;
            double s2 = std::max(0.0, minkowski_inner(delta, delta));
            double d = 2.0 * std::asinh(0.5 * std::sqrt(s2));
            double c = std::cosh(d);
            Vec w = q.x - c * p.x;  // |w|_M = sinh d
            Vec v = d < 1e-14 ? Vec(Vec::Zero(p.x.size())) : Vec(w / sinhc(d));
            return {TangentVector{p, v}, d};
        }
    }
    throw DomainError("bad spaceform kind");
}

double distance(const Point& p, const Point& q) {
    if (p.kind != q.kind) throw DomainError("distance between different spaceforms");
    switch (p.kind) {
        case SpaceformKind::Euclidean:
            return (q.x - p.x).norm();
        case SpaceformKind::Spherical:
            return 2.0 * std::asin(std::min(1.0, 0.5 * (q.x - p.x).norm()));
        case SpaceformKind::Hyperbolic: {
            Vec delta = q.x - p.x;
            double s2 = std::max(0.0, minkowski_inner(delta, delta));
            return 2.0 * std::asinh(0.5 * std::sqrt(s2));
        }
    }
    throw DomainError("bad spaceform kind");
}

Point geodesic_interpolate(const Point& p, const Point& q, double t) {
    LogResult lr = log_and_distance(p, q);
    return exp_map(make_tangent(p, t * lr.v.v));
}

TangentVector killing_field_sample(SpaceformKind kind, const Point& p,
                                   const TangentVector& direction) {
    const Vec& b = direction.base.x;
    const Vec& w = direction.v;
    switch (kind) {
        case SpaceformKind::Euclidean:
            return TangentVector{p, w};
        case SpaceformKind::Spherical: {
            // rotation generator w b^T - b w^T applied to p
            Vec xp = w * b.dot(p.x) - b * w.dot(p.x);
            return TangentVector{p, xp};
        }
        case SpaceformKind::Hyperbolic: {
            // boost generator in so(1, m): p -> b <w,p>_M - w <b,p>_M
            Vec xp = b * minkowski_inner(w, p.x) - w * minkowski_inner(b, p.x);
            return TangentVector{p, xp};
        }
    }
    throw DomainError("bad spaceform kind");
}

Point killing_flow(const TangentVector& direction, const Point& p, double time) {
    SpaceformKind kind = direction.base.kind;
    const Vec& b = direction.base.x;
    double wn = direction.norm();
    if (wn == 0.0) return p;
    Vec wh = direction.v / wn;
    Point out;
    out.kind = kind;
    switch (kind) {
        case SpaceformKind::Euclidean:
            out.x = p.x + time * direction.v;
            break;
        case SpaceformKind::Spherical: {
            double alpha = p.x.dot(b), beta = p.x.dot(wh);
            Vec perp = p.x - alpha * b - beta * wh;
            double a = time * wn, c = std::cos(a), s = std::sin(a);
            out.x = (alpha * c - beta * s) * b + (alpha * s + beta * c) * wh + perp;
            break;
        }
        case SpaceformKind::Hyperbolic: {
            double alpha = -minkowski_inner(p.x, b), beta = minkowski_inner(p.x, wh);
            Vec perp = p.x - alpha * b - beta * wh;
            double a = time * wn, c = std::cosh(a), s = std::sinh(a);
            out.x = (alpha * c + beta * s) * b + (alpha * s + beta * c) * wh + perp;
            break;
        }
    }
    snap_to_model(out);
    return out;
}

std::vector<Vec> tangent_frame(const Point& center) {
    int m = static_cast<int>(center.x.size());
    int want = center.dim();
    std::vector<Vec> frame;
    std::vector<Vec> candidates;
    for (int i = 0; i < m; ++i) {
        Vec e = Vec::Zero(m);
        e[i] = 1.0;
        candidates.push_back(e);
    }
    // greedy pivoted Gram-Schmidt: deterministic and stable near axis points
    while (static_cast<int>(frame.size()) < want) {
        int best = -1;
        double best_q = -1.0;
        Vec best_v;
        for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
            Vec v = project_to_tangent(center, candidates[i]);
            for (const Vec& f : frame)
                v -= model_inner(center.kind, v, f) * f;
            double q = model_inner(center.kind, v, v);
            if (q > best_q) {
                best_q = q;
                best = i;
                best_v = v;
            }
        }
        if (best < 0 || best_q < 1e-20)
            throw NumericalDegeneracy("degenerate tangent frame");
        frame.push_back(best_v / std::sqrt(best_q));
        candidates.erase(candidates.begin() + best);
    }
    return frame;
}

Vec polar_radial_direction(const Point& center, const Vec& dir, double r) {
    switch (center.kind) {
        case SpaceformKind::Euclidean:
            return dir;
        case SpaceformKind::Spherical:
            return -std::sin(r) * center.x + std::cos(r) * dir;
        case SpaceformKind::Hyperbolic:
            return std::sinh(r) * center.x + std::cosh(r) * dir;
    }
    return dir;
}

}  // namespace lclab
