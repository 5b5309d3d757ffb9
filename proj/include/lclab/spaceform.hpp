#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lclab/errors.hpp"

namespace lclab {

// Model coordinates never need more than 4 components (ambient dimension of
// S^3 / H^3), so vectors live on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

enum class SpaceformKind { Euclidean, Spherical, Hyperbolic };

const char* kind_name(SpaceformKind kind);
SpaceformKind kind_from_name(const std::string& name);

// Sectional curvature K of the spaceform: 0, +1, -1.
int sectional_curvature(SpaceformKind kind);

// Ric(nu, nu) for a unit normal of a hypersurface: n * K.
double ricci_normal(SpaceformKind kind, int n);

double minkowski_inner(const Vec& a, const Vec& b);

// Ambient model inner product: Euclidean dot for E and S, Minkowski for H.
double model_inner(SpaceformKind kind, const Vec& a, const Vec& b);

// A point of the spaceform in model coordinates.
//   Euclidean:  R^{n+1} itself.
//   Spherical:  unit sphere in R^{n+2}.
//   Hyperbolic: hyperboloid <x,x>_M = -1, x_0 > 0, in R^{1,n+1}.
struct Point {
    SpaceformKind kind = SpaceformKind::Euclidean;
    Vec x;

    // Dimension of the spaceform itself (n+1 for a body of dimension n).
    int dim() const;
};

Point make_point(SpaceformKind kind, const Vec& coords);
Point model_origin(SpaceformKind kind, int space_dim);

struct TangentVector {
    Point base;
    Vec v;

    double norm() const;  // length in the metric of the spaceform
};

TangentVector make_tangent(const Point& base, const Vec& v);

// Drop the component of v sticking out of T_p; used to build tangent data
// from ambient directions.
Vec project_to_tangent(const Point& p, const Vec& v);

// theta solves theta'' = -K theta, theta(0)=0, theta'(0)=1:
//   r, sin r, sinh r.  The antiderivative convention is
//   r^2/2, -cos r, cosh r.
struct WarpValues {
    double theta;
    double theta_prime;
    double antiderivative;
};

WarpValues warp_functions(SpaceformKind kind, double r);

// lambda together with the geodesic radius of the ball of constant principal
// curvature lambda, when that ball exists.
struct LambdaClass {
    SpaceformKind kind = SpaceformKind::Euclidean;
    double lambda = 0.0;
    std::optional<double> radius_opt;

    bool has_radius() const { return radius_opt.has_value(); }
    double radius() const;  // throws DomainError when lambda is inadmissible
};

// Admissible intervals: E (0,inf), S (0,inf), H (1,inf).
bool lambda_in_interval(SpaceformKind kind, double lambda);

LambdaClass radius_of_lambda(SpaceformKind kind, double lambda);
double supporting_radius(SpaceformKind kind, double lambda);
double lambda_of_radius(SpaceformKind kind, double R);

Point exp_map(const TangentVector& tv);

struct LogResult {
    TangentVector v;
    double distance;
};

LogResult log_and_distance(const Point& p, const Point& q);
double distance(const Point& p, const Point& q);

Point geodesic_interpolate(const Point& p, const Point& q, double t);

// Killing field whose value at direction.base equals direction.v:
// a translation (E), a rotation generator (S), a boost generator (H).
// Returns the field sampled at p.
TangentVector killing_field_sample(SpaceformKind kind, const Point& p,
                                   const TangentVector& direction);

// Flow of the same Killing field for the given time, applied to p.
// Always an isometry of the model.
Point killing_flow(const TangentVector& direction, const Point& p, double time);

// Deterministic orthonormal basis of T_c, used to map abstract grid
// directions to model tangent vectors.
std::vector<Vec> tangent_frame(const Point& center);

// Unit radial direction d/dr of the geodesic polar chart around c,
// evaluated at exp_c(r * dir) (dir a unit tangent at c).
Vec polar_radial_direction(const Point& center, const Vec& dir, double r);

}  // namespace lclab
