#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lclab/body.hpp"
#include "lclab/curvature.hpp"

namespace lclab {

// Normal variation data on a node subset: v is the normal speed (positive =
// inward, matching the inward normal convention), a the normal acceleration.
// Both vanish outside the support.
struct VariationField {
    std::vector<int> support;  // sorted node indices
    Eigen::VectorXd v;         // size N
    Eigen::VectorXd a;         // size N, or empty for a == 0
};

VariationField make_variation_field(const RadialBody& body,
                                    const Eigen::VectorXd& v,
                                    const Eigen::VectorXd& a = Eigen::VectorXd());

struct Variations {
    double d_vol = 0.0;
    double d_area = 0.0;
};

// dVol = -∫v,  dArea = -∫vH
Variations first_variations(const RadialBody& body, const VariationField& vf);

// d²Vol = ∫(v²H - a),  d²Area = ∫(-vT(v) + H²v² - aH)
Variations second_variations(const RadialBody& body, const VariationField& vf);

// T(f) = Δf + n·K·f + tr(A²)·f, the stability operator.
Eigen::VectorXd stability_operator_apply(const RadialBody& body,
                                         const Eigen::VectorXd& f);

// -∫_Ω f T(f); f must vanish outside omega.
double stability_quadratic_form(const RadialBody& body,
                                const std::vector<int>& omega,
                                const Eigen::VectorXd& f);

struct SupersolutionReport {
    bool certificate = false;  // max_Ω T(u) <= tol
    double max_Tu = 0.0;
    double tol = 0.0;
    int positive_random = 0;  // random mean-zero fields with positive form
    int random_trials = 0;
    bool pass() const { return certificate && positive_random == random_trials; }
};

// Certificate that u > 0 with T(u) <= tol on omega implies strong stability;
// cross-validated on random mean-zero compactly supported fields.
SupersolutionReport supersolution_stability_test(const RadialBody& body,
                                                 const std::vector<int>& omega,
                                                 const Eigen::VectorXd& u,
                                                 double tol = -1.0,
                                                 std::uint64_t seed = 1234,
                                                 int trials = 100);

// True iff the Killing field through `direction` has strictly positive inner
// product with the inward normal throughout omega.
bool killing_stability_test(const RadialBody& body, const std::vector<int>& omega,
                            const TangentVector& direction);

// Surface points displaced by amount_j along dirs_j (inward normals when
// dirs is empty).
std::vector<Point> displaced_points(const RadialBody& body,
                                    const Eigen::VectorXd& amount,
                                    const std::vector<Vec>* dirs = nullptr);

// Radial re-representation of a moved copy of `reference` (same grid,
// same center). GraphFailure when the moved surface is not a graph.
RadialBody reproject_to_graph(const RadialBody& reference,
                              const std::vector<Point>& pts);

// Node points move to exp_p(t v ν); the result is re-projected to the grid.
RadialBody deform(const RadialBody& body, const VariationField& vf, double t);

struct FiniteDifferenceReport {
    std::vector<double> h;
    // absolute FD-vs-analytic errors per h, per quantity
    std::vector<double> err_dvol, err_darea, err_d2vol, err_d2area;
    // observed orders from consecutive FD differences (grid-independent)
    double order_dvol = 0.0, order_darea = 0.0;
    double order_d2vol = 0.0, order_d2area = 0.0;
    // relative errors at the smallest h
    double rel_dvol = 0.0, rel_darea = 0.0, rel_d2vol = 0.0, rel_d2area = 0.0;

    bool pass(double rel_tol, double min_order = 2.0) const;
};

// Centered finite differences of the measured family
// x(τ) = exp_p((τ v + τ²a/2) ν) against the analytic variations.
FiniteDifferenceReport finite_difference_check(const RadialBody& body,
                                               const VariationField& vf,
                                               const std::vector<double>& h_seq);

}  // namespace lclab
