#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

namespace lclab {

// Quadrature grid on the unit n-sphere of directions, n = 1 or 2.
// Immutable after construction; bodies hold shared pointers to one.
struct SphereGrid {
    int n = 1;
    std::string type;  // "circle" or "icosphere"
    int param = 0;     // node count N, or subdivision level

    Eigen::MatrixXd nodes;    // rows are unit vectors in R^{n+1}
    Eigen::VectorXd weights;  // sum to |S^n| within 1e-10
    std::vector<std::array<int, 3>> faces;      // n = 2 only
    std::vector<std::vector<int>> neighbors;    // 1-ring, sorted
    std::vector<std::vector<int>> stencils;     // 2-ring incl. node itself (n = 2)
    std::vector<std::vector<int>> node_faces;   // faces touching each node (n = 2)

    // Per-node tangent frame of the direction sphere and the least-squares
    // quadric-fit pseudoinverse over the 2-ring (n = 2).
    Eigen::MatrixXd frame1, frame2;   // size x 3
    std::vector<Eigen::MatrixXd> fit;  // 6 x |stencil|

    int size() const { return static_cast<int>(nodes.rows()); }
    // typical angular distance between adjacent nodes
    double angular_spacing() const { return spacing_; }

    static std::shared_ptr<const SphereGrid> circle(int N);
    static std::shared_ptr<const SphereGrid> icosphere(int level);

    double spacing_ = 0.0;
};

}  // namespace lclab
