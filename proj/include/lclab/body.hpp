#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lclab/enclosure.hpp"
#include "lclab/grid.hpp"
#include "lclab/spaceform.hpp"

namespace lclab {

// Star-shaped body given by a positive radial function over a direction grid
// centered at `center`. Spherical bodies stay inside the open hemisphere
// (rho < pi/2) so the radial chart is sound.
struct RadialBody {
    SpaceformKind kind = SpaceformKind::Euclidean;
    Point center;
    std::shared_ptr<const SphereGrid> grid;
    Eigen::VectorXd rho;
    std::vector<std::uint8_t> smooth_flags;  // nodes currently treated as C^2

    std::vector<Vec> frame;  // tangent frame at center mapping grid directions

    int size() const { return static_cast<int>(rho.size()); }
};

RadialBody make_radial_body(SpaceformKind kind, const Point& center,
                            std::shared_ptr<const SphereGrid> grid,
                            const Eigen::VectorXd& rho);

RadialBody make_ball(SpaceformKind kind, const Point& center, double R,
                     std::shared_ptr<const SphereGrid> grid);

// Ball radius R with a low-frequency harmonic ripple: rho = R (1 + amplitude * profile).
RadialBody make_perturbed_ball(SpaceformKind kind, const Point& center, double R,
                               std::shared_ptr<const SphereGrid> grid, int mode,
                               double amplitude);

// Node values of a fixed low-frequency angular profile (cos(mode * theta) on the
// circle; low-degree solid harmonics on the icosphere).
Eigen::VectorXd harmonic_profile(const SphereGrid& grid, int mode);

// Radial sampling of a lens by bisection on two-ball membership; centered at
// the geodesic midpoint of the lens centers.
RadialBody make_lens_body(const LensSpec& lens, std::shared_ptr<const SphereGrid> grid);

struct Measures {
    double area = 0.0;    // n-measure of the boundary
    double volume = 0.0;  // (n+1)-measure of the body
};

// Boundary area from the induced metric of the radial graph, enclosed volume
// from the warped polar quadrature.
Measures measure(const RadialBody& body);

// Closed forms used as anchors.
Measures closed_form_ball(SpaceformKind kind, int n, double R);
Measures closed_form_sausage(double lambda, double L);  // E^3 segment + ball
Measures closed_form_lens2d(double lambda, double d);   // E^2 two-disc lens

bool contains(const RadialBody& body, const Point& p);

std::string body_to_json(const RadialBody& body);
RadialBody body_from_json(const std::string& text);

// --- shared geometry helpers -------------------------------------------------

// Grid direction as a unit tangent at the body's center (model coordinates).
Vec node_direction(const RadialBody& body, int i);
Point node_position(const RadialBody& body, int i);
std::vector<Point> surface_points(const RadialBody& body);

// Per-node weights of the boundary area measure (they sum to the area).
Eigen::VectorXd surface_area_weights(const RadialBody& body);

// Inward unit normals (model coordinates) at the surface nodes.
std::vector<Vec> surface_normals(const RadialBody& body);

// Mean boundary arc length per node / mean mesh edge length.
double typical_spacing(const RadialBody& body);

// Measures of a deformed copy of the body given by explicit surface points
// with the grid's connectivity (no reprojection involved).
Measures lagrangian_measure(const RadialBody& body, const std::vector<Point>& pts);

double radial_volume_antiderivative(SpaceformKind kind, int n, double r);

}  // namespace lclab
