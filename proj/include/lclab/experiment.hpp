#pragma once

#include <cstdint>
#include <string>

#include "lclab/body.hpp"

namespace lclab {

// Everything a subcommand run needs, with explicit defaults. The echoed JSON
// (all fields, alphabetical keys) is hashed into every summary so any output
// file can be traced back to its exact configuration.
struct ExperimentConfig {
    std::string subcommand;
    std::string kind = "euclidean";
    int n = 1;
    int grid = 0;  // circle node count / icosphere level; 0 = 512 / 4
    double lambda = 1.0;

    // seed body: ball | perturbed | ellipse | lens
    std::string body = "ball";
    double radius = 1.0;
    int mode = 2;
    double amplitude = 0.05;
    double axis_a = 1.0;
    double axis_b = 0.8;
    double lens_d = 1.0;

    // perturb / maximize
    int steps = 10;
    double t0 = 1e-3;
    std::string case_mode = "auto";
    int max_iters = 40000;

    int trials = 5;  // variation-verify bodies / lens probe points
    std::uint64_t rng_seed = 1234;
    std::string out_dir = "out";
    bool verbose = false;
};

// Merge a JSON object onto the defaults; unknown keys are an error.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

// Throws DomainError when a field combination makes no sense (exit 2 at the
// command line).
void validate_config(const ExperimentConfig& cfg);

// Runs the subcommand, writes summary.json plus its CSV artifacts into
// out_dir, prints a one-line result. Returns 0 on pass, 1 on property
// failure.
int run_experiment(const ExperimentConfig& cfg);

// rho(theta) = ab / sqrt(b^2 cos^2 + a^2 sin^2), the planar ellipse as a
// radial graph (Euclidean, n = 1).
RadialBody make_ellipse_body(double a, double b,
                             std::shared_ptr<const SphereGrid> grid);

RadialBody seed_body_from_config(const ExperimentConfig& cfg);

}  // namespace lclab
