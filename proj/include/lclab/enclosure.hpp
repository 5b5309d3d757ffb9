#pragma once

#include <vector>

#include "lclab/spaceform.hpp"

namespace lclab {

struct RadialBody;

// Intersection of two closed balls of the supporting radius R(lambda) whose
// centers p, q satisfy 0 < d(p,q) < 2R.
struct LensSpec {
    SpaceformKind kind = SpaceformKind::Euclidean;
    LambdaClass lc;
    Point p, q;
    double d = 0.0;  // center distance
};

LensSpec make_lens_spec(const LambdaClass& lc, const Point& p, const Point& q);

// Lens from the two most distant supporting-ball centers of a lambda-convex
// body; throws TrivialBody when all centers coincide (the extremal ball).
LensSpec lens_from_supports(const RadialBody& body, double lambda);

// Boundary of the lens, sampled over both spherical caps.
std::vector<Point> lens_boundary_samples(const LensSpec& lens, int per_cap);

struct EnclosureResult {
    Point center;       // geodesic midpoint of the two ball centers
    double rho = 0.0;   // max distance from center to the lens boundary
    double margin = 0.0;  // R - rho, strictly positive
};

// Ball around the geodesic midpoint enclosing the lens with margin;
// throws MarginViolation if the sampled margin is not positive.
EnclosureResult enclosing_ball(const LensSpec& lens, int per_cap = 0);

// Smallest max-distance over candidate centers along the geodesic through
// p and q: an independent check that the midpoint is optimal.
struct CircumradiusResult {
    double radius = 0.0;
    double s = 0.0;  // geodesic parameter of the best center in [0, 1]
};
CircumradiusResult circumradius_bruteforce(const LensSpec& lens, int centers = 257,
                                           int per_cap = 0);

// Profile beta(t) = Theta(dist(z, gamma(t))) along the center geodesic for a
// point z of the lens: convex for E/H, a pure sinusoid in S, and in all three
// cases maximal only at the endpoints.
struct BetaReport {
    std::vector<double> t;
    std::vector<double> beta;
    bool convex_or_sinusoid = false;  // discrete convexity (E/H) or sinusoid fit (S)
    bool end_maximal = false;
    double residual = 0.0;  // sinusoid LSQ residual (S only)
    bool pass() const { return convex_or_sinusoid && end_maximal; }
};

BetaReport beta_profile_check(const LensSpec& lens, const Point& z, int samples = 129,
                              double tol = 1e-8);

}  // namespace lclab
