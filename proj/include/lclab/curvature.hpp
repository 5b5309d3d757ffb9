#pragma once

#include <string>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lclab/body.hpp"

namespace lclab {

// Everything uses the inward normal convention: geodesic spheres have
// positive principal curvatures.
struct CurvatureReport {
    Eigen::MatrixXd kappa;                     // N x n, ascending per row
    Eigen::VectorXd mean;                      // H = tr A
    Eigen::VectorXd trace_a2;                  // tr(A^2)
    std::vector<Eigen::MatrixXd> metric;       // induced metric, n x n
    std::vector<Eigen::MatrixXd> second_form;  // n x n
    std::vector<Vec> normal;                   // inward unit normal, model coords
};

CurvatureReport shape_operator(const RadialBody& body);

struct LambdaCheck {
    double lambda = 0.0;
    double tol = 0.0;
    bool is_lambda_convex = false;
    double min_kappa = 0.0;
    int min_node = -1;
    std::optional<int> witness_strict;  // some node with kappa_1 > lambda + tol
};

// 1e-6 for circle grids, 1e-3 for icospheres: the stencil accuracy floor.
double default_curvature_tol(const RadialBody& body);

LambdaCheck lambda_convexity_check(const RadialBody& body, double lambda,
                                   double tol = -1.0);

// Local containment probe: centers the supporting ball at exp_p(R nu_in)
// and tests the nodes within geodesic distance delta of p (default: five
// grid spacings).
bool supporting_ball_test(const RadialBody& body, int node, double lambda,
                          double delta = -1.0);

// Lowest node index attaining max kappa_1 (within tol); NoStrictPoint if the
// body has kappa_1 <= lambda + tol everywhere.
int strict_point(const RadialBody& body, double lambda, double tol = -1.0);

// Every supporting ball of radius R(lambda) contains the whole body
// (tolerance 1e-8 in distance). DomainError if the body is not lambda-convex.
bool global_blaschke_check(const RadialBody& body, const LambdaClass& lc);

std::string curvature_to_csv(const CurvatureReport& report);

// Laplace-Beltrami of f on the boundary surface: spectral with metric
// factors on circle grids, cotangent weights with lumped mass on icospheres.
Eigen::VectorXd laplace_beltrami_apply(const RadialBody& body,
                                       const Eigen::VectorXd& f);

// kappa_1 from compact stencils: fourth-order periodic differences on circle
// grids (errors near a sharpening corner stay local, unlike global spectra),
// the usual quadric fits on icospheres.
Eigen::VectorXd local_kappa1(const RadialBody& body);

}  // namespace lclab
