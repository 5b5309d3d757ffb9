#include "lclab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>

namespace lclab::fourier {

namespace {

struct Plans {
    int N = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd{};
    fftw_plan inv{};
};

// One set of buffers per transform size, reused across calls. The library is
// single-threaded by design, so no locking.
Plans& plans_for(int N) {
    static std::map<int, Plans> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    Plans p;
    p.N = N;
    p.real = fftw_alloc_real(N);
    p.cplx = fftw_alloc_complex(N / 2 + 1);
    p.fwd = fftw_plan_dft_r2c_1d(N, p.real, p.cplx, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_c2r_1d(N, p.cplx, p.real, FFTW_ESTIMATE);
    return cache.emplace(N, p).first->second;
}

// (ik)^order, with the odd-order Nyquist mode dropped as usual.
std::complex<double> deriv_multiplier(int k, int order, int N) {
    if (order % 2 == 1 && 2 * k == N) return {0.0, 0.0};
    std::complex<double> ik(0.0, static_cast<double>(k));
    std::complex<double> m(1.0, 0.0);
    for (int i = 0; i < order; ++i) m *= ik;
    return m;
}

}  // namespace

Series analyze(const Eigen::VectorXd& f) {
    int N = static_cast<int>(f.size());
    Plans& p = plans_for(N);
    for (int j = 0; j < N; ++j) p.real[j] = f[j];
    fftw_execute(p.fwd);
    Series s;
    s.N = N;
    s.coeff.resize(N / 2 + 1);
    for (int k = 0; k <= N / 2; ++k) s.coeff[k] = {p.cplx[k][0], p.cplx[k][1]};
    return s;
}

Eigen::VectorXd derivative(const Eigen::VectorXd& f, int order) {
    int N = static_cast<int>(f.size());
    Plans& p = plans_for(N);
    for (int j = 0; j < N; ++j) p.real[j] = f[j];
    fftw_execute(p.fwd);
    for (int k = 0; k <= N / 2; ++k) {
        std::complex<double> c(p.cplx[k][0], p.cplx[k][1]);
        c *= deriv_multiplier(k, order, N);
        p.cplx[k][0] = c.real();
        p.cplx[k][1] = c.imag();
    }
    fftw_execute(p.inv);
    Eigen::VectorXd out(N);
    for (int j = 0; j < N; ++j) out[j] = p.real[j] / N;
    return out;
}

double Series::eval_derivative(double theta, int order) const {
    // f(theta) = (1/N) Re[ c_0 + 2 sum_{0<k<N/2} c_k e^{ik theta} + c_{N/2} e^{i(N/2)theta} ]
    // with term-wise (ik)^order for derivatives; this reproduces the real
    // trigonometric interpolant and its derivatives exactly.
    int K = N / 2;
    std::complex<double> rot = std::polar(1.0, theta);
    std::complex<double> e(1.0, 0.0);
    std::complex<double> acc = order == 0 ? coeff[0] : std::complex<double>(0.0, 0.0);
    for (int k = 1; k <= K; ++k) {
        if ((k & 31) == 0) e = std::polar(1.0, k * theta);  // kill drift
        else e *= rot;
        std::complex<double> c = coeff[k] * deriv_multiplier(k, order, N);
        double w = (2 * k == N) ? 1.0 : 2.0;
        acc += w * c * e;
    }
    return acc.real() / N;
}

double Series::eval(double theta) const { return eval_derivative(theta, 0); }

}  // namespace lclab::fourier
