#pragma once

#include <string>
#include <vector>

#include "lclab/variation.hpp"

namespace lclab {

// Two disjoint nonnegative bump fields with a reference direction field,
// normalized so that ∫F⟨ν̂,ν⟩ = ∫G⟨ν̂,ν⟩ = 1 (case 1). Case 2 instead uses
// ν̂ = ν, a mean-zero F and ∫G = 1.
struct BumpPair {
    std::vector<int> omega1, omega2;
    Eigen::VectorXd F, G;     // size N, zero off their supports
    std::vector<Vec> nu_hat;  // per node, model coordinates
    int case_mode = 1;
    double t_hint = 0.0;      // suggested step scale, 0 when the builder has none
};

enum class CaseMode { Auto, Case1, Case2 };

// Relative oscillation of H over the union support, the case-1/2 classifier.
double mean_curvature_oscillation(const RadialBody& body, const BumpPair& bumps);

// Builds the bump machinery for the body: case 1 picks a window of maximal
// H-contrast (F on the low side, G on the high side, ν̂ the constant
// extension of the normal at the window center); case 2 pairs a mean-zero
// wiggle with a far-away feeding bump along ν itself.
BumpPair make_bump_pair(const RadialBody& body, double lambda,
                        CaseMode mode = CaseMode::Auto);

// Solves vol(exp_p((tF + sG)ν̂)) = target for s (monotone decreasing in s),
// measuring the re-projected body. Default target: the body's own volume.
double solve_volume_constraint(const RadialBody& body, const BumpPair& bumps,
                               double t, double tol = 1e-10,
                               double target_vol = -1.0);

struct PerturbEntry {
    double t = 0.0;
    RadialBody body;
    double area = 0.0;
    double volume = 0.0;
    double b = 0.0;
    double min_kappa = 0.0;
    int case_used = 0;
};

// One volume-constrained two-bump step. ConvexityExit when the stepped body
// leaves the λ-convex class, TrivialBody when the seed has no strict point.
PerturbEntry perturb_step(const RadialBody& body, double lambda,
                          const BumpPair& bumps, double t,
                          CaseMode mode = CaseMode::Auto,
                          double target_vol = -1.0);

struct PerturbTrajectory {
    std::vector<PerturbEntry> entries;  // entry 0 is the seed
    int case_used = 0;                  // classification at the seed
};

PerturbTrajectory run_perturb_trajectory(const RadialBody& seed, double lambda,
                                         int steps, double t0,
                                         CaseMode mode = CaseMode::Auto);

std::string trajectory_to_csv(const PerturbTrajectory& traj);

struct MaximizeConfig {
    int max_iters = 400000;
    double t0 = 2e-3;          // initial step scale
    double stall_tol = 1e-13;  // relative area gain considered progress
    int stall_limit = 40;      // consecutive stalled iterations before stop
    double pin_tol = 1e-3;     // arcs count as pinned when kappa_1 - lambda <= 5*pin_tol
    double corner_cap_factor = 3.0;  // corner flag: kappa > 1/(factor * h)
    double vol_tol = 1e-11;
    int log_every = 50;  // trajectory logging stride
};

struct MaximizeResult {
    RadialBody body;
    PerturbTrajectory trajectory;
    int accepted_steps = 0;
    double pinned_fraction = 0.0;  // smooth arc fraction with kappa_1 - lambda <= 5*pin_tol
    double max_smooth_excess = 0.0;
    std::string note;
};

// Volume-preserving area ascent with λ-convexity enforced by backtracking:
// pushes arcs with excess curvature outward toward κ = λ while feeding the
// volume into high-curvature corners.
MaximizeResult maximize_area(const RadialBody& seed, double lambda,
                             const MaximizeConfig& cfg = {});

}  // namespace lclab
