#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace lclab::fourier {

// Helpers for smooth 2pi-periodic grid functions sampled at theta_j = 2pi j/N.
// Differentiation and off-grid evaluation go through the trigonometric
// interpolant, so both are exact for band-limited data.

// d^order/dtheta^order at the nodes.
Eigen::VectorXd derivative(const Eigen::VectorXd& f, int order);

// Half-spectrum of a real signal; evaluates the interpolant anywhere.
struct Series {
    int N = 0;
    std::vector<std::complex<double>> coeff;  // k = 0 .. N/2, unnormalized

    double eval(double theta) const;
    double eval_derivative(double theta, int order) const;
};

Series analyze(const Eigen::VectorXd& f);

}  // namespace lclab::fourier
