#include "lclab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "lclab/fourier.hpp"
#include "lclab/numerics.hpp"

namespace lclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Eigen::VectorXd zeros_like(const RadialBody& body) {
    return Eigen::VectorXd::Zero(body.size());
}

double integrate(const Eigen::VectorXd& w, const Eigen::VectorXd& f) {
    return (w.array() * f.array()).sum();
}

// median-of-consecutive-ratios order estimate; 99 when the differences are
// at roundoff already
double observed_order(const std::vector<double>& h, const std::vector<double>& fd,
                      double scale) {
    std::vector<double> est;
    for (size_t i = 0; i + 2 < fd.size(); ++i) {
        double d1 = std::abs(fd[i] - fd[i + 1]);
        double d2 = std::abs(fd[i + 1] - fd[i + 2]);
        double floor = 1e-13 * std::max(scale, 1e-300);
        if (d1 <= floor && d2 <= floor) {
            est.push_back(99.0);
            continue;
        }
        if (d2 <= floor) d2 = floor;
        double ratio = std::log(h[i] / h[i + 1]);
        est.push_back(std::log(d1 / d2) / std::max(ratio, 1e-12));
    }
    if (est.empty()) return 0.0;
    std::sort(est.begin(), est.end());
    return est[est.size() / 2];
}

}  // namespace

VariationField make_variation_field(const RadialBody& body, const Eigen::VectorXd& v,
                                    const Eigen::VectorXd& a) {
    if (v.size() != body.size()) throw DomainError("speed size does not match grid");
    if (a.size() != 0 && a.size() != body.size())
        throw DomainError("acceleration size does not match grid");
    VariationField vf;
    vf.v = v;
    vf.a = a;
    for (int j = 0; j < body.size(); ++j) {
        bool active = v[j] != 0.0 || (a.size() != 0 && a[j] != 0.0);
        if (active) vf.support.push_back(j);
    }
    return vf;
}

Variations first_variations(const RadialBody& body, const VariationField& vf) {
    CurvatureReport rep = shape_operator(body);
    Eigen::VectorXd w = surface_area_weights(body);
    Variations out;
    out.d_vol = -integrate(w, vf.v);
    out.d_area = -integrate(w, (vf.v.array() * rep.mean.array()).matrix());
    return out;
}

Variations second_variations(const RadialBody& body, const VariationField& vf) {
    CurvatureReport rep = shape_operator(body);
    Eigen::VectorXd w = surface_area_weights(body);
    Eigen::VectorXd a = vf.a.size() ? vf.a : zeros_like(body);
    Eigen::VectorXd Tv = stability_operator_apply(body, vf.v);
    Variations out;
    out.d_vol = integrate(w, (vf.v.array().square() * rep.mean.array() - a.array()).matrix());
    out.d_area = integrate(
        w, (-vf.v.array() * Tv.array() +
            rep.mean.array().square() * vf.v.array().square() -
            a.array() * rep.mean.array())
               .matrix());
    return out;
}

Eigen::VectorXd stability_operator_apply(const RadialBody& body,
                                         const Eigen::VectorXd& f) {
    CurvatureReport rep = shape_operator(body);
    Eigen::VectorXd lap = laplace_beltrami_apply(body, f);
    double ric = ricci_normal(body.kind, body.grid->n);
    return lap.array() + (rep.trace_a2.array() + ric) * f.array();
}

double stability_quadratic_form(const RadialBody& body, const std::vector<int>& omega,
                                const Eigen::VectorXd& f) {
    if (f.size() != body.size()) throw DomainError("field size does not match grid");
    std::vector<char> in(body.size(), 0);
    for (int j : omega) in[j] = 1;
    for (int j = 0; j < body.size(); ++j)
        if (!in[j] && f[j] != 0.0)
            throw DomainError("field is not compactly supported in omega");
    Eigen::VectorXd Tf = stability_operator_apply(body, f);
    Eigen::VectorXd w = surface_area_weights(body);
    return -integrate(w, (f.array() * Tf.array()).matrix());
}

SupersolutionReport supersolution_stability_test(const RadialBody& body,
                                                 const std::vector<int>& omega,
                                                 const Eigen::VectorXd& u, double tol,
                                                 std::uint64_t seed, int trials) {
    if (u.size() != body.size()) throw DomainError("field size does not match grid");
    if (omega.empty()) throw DomainError("empty patch");
    double umin = 1e300, umax = -1e300;
    for (int j : omega) {
        umin = std::min(umin, u[j]);
        umax = std::max(umax, u[j]);
    }
    if (umin <= 0.0 && umax > 0.0) throw DomainError("supersolution candidate changes sign");
    if (umax <= 0.0) throw DomainError("supersolution candidate must be positive");
    if (tol < 0.0) tol = body.grid->n == 1 ? 1e-8 : 5e-2;

    SupersolutionReport rep;
    rep.tol = tol;
    rep.random_trials = trials;
    Eigen::VectorXd Tu = stability_operator_apply(body, u);
    rep.max_Tu = -1e300;
    for (int j : omega) rep.max_Tu = std::max(rep.max_Tu, Tu[j]);
    rep.certificate = rep.max_Tu <= tol;

    // hop distance to the complement, for a boundary-vanishing window
    std::vector<int> hops(body.size(), -1);
    std::deque<int> queue;
    std::vector<char> in(body.size(), 0);
    for (int j : omega) in[j] = 1;
    for (int j = 0; j < body.size(); ++j)
        if (!in[j]) {
            hops[j] = 0;
            queue.push_back(j);
        }
    if (queue.empty())  // omega is everything: no boundary, window is flat
        for (int j = 0; j < body.size(); ++j) hops[j] = 4;
    while (!queue.empty()) {
        int j = queue.front();
        queue.pop_front();
        for (int k : body.grid->neighbors[j])
            if (hops[k] < 0) {
                hops[k] = hops[j] + 1;
                queue.push_back(k);
            }
    }
    Eigen::VectorXd window = zeros_like(body);
    for (int j : omega) window[j] = smooth_step(std::min(hops[j], 4) / 4.0);
    double wmass = window.sum();
    if (wmass <= 0.0) throw DomainError("patch too thin for compactly supported fields");

    Eigen::VectorXd wts = surface_area_weights(body);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd noise(body.size());
        for (int j = 0; j < body.size(); ++j) noise[j] = gauss(rng);
        // smooth the noise a little so T(f) is not pure grid noise
        for (int pass = 0; pass < 3; ++pass) {
            Eigen::VectorXd s = noise;
            for (int j = 0; j < body.size(); ++j) {
                double acc = noise[j];
                for (int k : body.grid->neighbors[j]) acc += noise[k];
                s[j] = acc / (1.0 + body.grid->neighbors[j].size());
            }
            noise = s;
        }
        Eigen::VectorXd f = (window.array() * noise.array()).matrix();
        double fmean = integrate(wts, f) / integrate(wts, window);
        f -= fmean * window;
        double q = stability_quadratic_form(body, omega, f);
        if (q > 0.0) ++rep.positive_random;
    }
    return rep;
}

bool killing_stability_test(const RadialBody& body, const std::vector<int>& omega,
                            const TangentVector& direction) {
    std::vector<Point> pts = surface_points(body);
    std::vector<Vec> nus = surface_normals(body);
    for (int j : omega) {
        TangentVector X = killing_field_sample(body.kind, pts[j], direction);
        if (model_inner(body.kind, nus[j], X.v) <= 0.0) return false;
    }
    return true;
}

std::vector<Point> displaced_points(const RadialBody& body,
                                    const Eigen::VectorXd& amount,
                                    const std::vector<Vec>* dirs) {
    if (amount.size() != body.size()) throw DomainError("amount size does not match grid");
    std::vector<Vec> normals;
    if (!dirs) {
        normals = surface_normals(body);
        dirs = &normals;
    }
    std::vector<Point> pts = surface_points(body);
    std::vector<Point> out;
    out.reserve(pts.size());
    for (int j = 0; j < body.size(); ++j) {
        if (amount[j] == 0.0) {
            out.push_back(pts[j]);
            continue;
        }
        out.push_back(exp_map(TangentVector{pts[j], amount[j] * (*dirs)[j]}));
    }
    return out;
}

RadialBody reproject_to_graph(const RadialBody& reference, const std::vector<Point>& pts) {
    const SphereGrid& g = *reference.grid;
    int N = reference.size();
    if (static_cast<int>(pts.size()) != N) throw DomainError("point set does not match grid");

    if (g.n == 1) {
        Eigen::VectorXd r(N), dev(N);
        for (int j = 0; j < N; ++j) {
            LogResult lr = log_and_distance(reference.center, pts[j]);
            r[j] = lr.distance;
            Vec dir = lr.v.v / std::max(lr.distance, 1e-300);
            double psi = std::atan2(model_inner(reference.kind, dir, reference.frame[1]),
                                    model_inner(reference.kind, dir, reference.frame[0]));
            dev[j] = std::remainder(psi - 2.0 * kPi * j / N, 2.0 * kPi);
        }
        Eigen::VectorXd dpsi = fourier::derivative(dev, 1).array() + 1.0;
        if (dpsi.minCoeff() <= 1e-9)
            throw GraphFailure("moved curve is no longer a radial graph");
        fourier::Series dev_s = fourier::analyze(dev);
        fourier::Series r_s = fourier::analyze(r);
        Eigen::VectorXd rho(N);
        for (int k = 0; k < N; ++k) {
            double target = 2.0 * kPi * k / N;
            double th = target - dev[k];  // good initial guess for small motions
            bool done = false;
            for (int it = 0; it < 60; ++it) {
                double gval = th + dev_s.eval(th) - target;
                double gp = 1.0 + dev_s.eval_derivative(th, 1);
                if (gp <= 1e-9) throw GraphFailure("angle map not monotone");
                double step = gval / gp;
                th -= step;
                if (std::abs(step) < 1e-14) {
                    done = true;
                    break;
                }
            }
            if (!done) throw GraphFailure("angle inversion did not converge");
            rho[k] = r_s.eval(th);
            if (!(rho[k] > 0.0)) throw GraphFailure("moved surface crossed the center");
        }
        if (reference.kind == SpaceformKind::Spherical && rho.maxCoeff() >= kPi / 2)
            throw GraphFailure("moved surface left the hemisphere chart");
        RadialBody out = make_radial_body(reference.kind, reference.center,
                                          reference.grid, rho);
        out.smooth_flags = reference.smooth_flags;
        return out;
    }

    // n = 2: ray through each grid direction against the moved triangulation
    Eigen::MatrixXd xi(N, 3);
    Eigen::VectorXd r(N);
    for (int j = 0; j < N; ++j) {
        LogResult lr = log_and_distance(reference.center, pts[j]);
        r[j] = lr.distance;
        Vec dir = lr.v.v / std::max(lr.distance, 1e-300);
        for (int k = 0; k < 3; ++k)
            xi(j, k) = model_inner(reference.kind, dir, reference.frame[k]);
        xi.row(j).normalize();
    }
    Eigen::VectorXd rho(N);
    auto try_face = [&](int fi, const Eigen::Vector3d& target, double& value) {
        const auto& f = g.faces[fi];
        Eigen::Matrix3d M;
        for (int k = 0; k < 3; ++k) M.col(k) = xi.row(f[k]).transpose();
        Eigen::Vector3d beta = M.fullPivLu().solve(target);
        if (beta.minCoeff() < -1e-10) return false;
        double s = beta.sum();
        if (s <= 0.0) return false;
        beta /= s;
        value = beta[0] * r[f[0]] + beta[1] * r[f[1]] + beta[2] * r[f[2]];
        return true;
    };
    for (int k = 0; k < N; ++k) {
        Eigen::Vector3d target = g.nodes.row(k).transpose();
        double val = -1.0;
        bool hit = false;
        for (int fi : g.node_faces[k])
            if (try_face(fi, target, val)) {
                hit = true;
                break;
            }
        if (!hit)
            for (int nb : g.neighbors[k]) {
                for (int fi : g.node_faces[nb])
                    if (try_face(fi, target, val)) {
                        hit = true;
                        break;
                    }
                if (hit) break;
            }
        if (!hit)
            for (int fi = 0; fi < static_cast<int>(g.faces.size()) && !hit; ++fi)
                hit = try_face(fi, target, val);
        if (!hit) throw GraphFailure("moved mesh does not cover the direction sphere");
        if (!(val > 0.0)) throw GraphFailure("moved surface crossed the center");
        rho[k] = val;
    }
    if (reference.kind == SpaceformKind::Spherical && rho.maxCoeff() >= kPi / 2)
        throw GraphFailure("moved surface left the hemisphere chart");
    RadialBody out = make_radial_body(reference.kind, reference.center, reference.grid, rho);
    out.smooth_flags = reference.smooth_flags;
    return out;
}

RadialBody deform(const RadialBody& body, const VariationField& vf, double t) {
    if (t == 0.0 || vf.support.empty()) return body;
    Eigen::VectorXd amount = t * vf.v;
    return reproject_to_graph(body, displaced_points(body, amount));
}

bool FiniteDifferenceReport::pass(double rel_tol, double min_order) const {
    bool orders = order_dvol >= min_order && order_darea >= min_order &&
                  order_d2vol >= min_order && order_d2area >= min_order;
    bool rels = rel_dvol <= rel_tol && rel_darea <= rel_tol &&
                rel_d2vol <= rel_tol && rel_d2area <= rel_tol;
    return orders && rels;
}

FiniteDifferenceReport finite_difference_check(const RadialBody& body,
                                               const VariationField& vf,
                                               const std::vector<double>& h_seq) {
    Variations v1 = first_variations(body, vf);
    Variations v2 = second_variations(body, vf);
    Eigen::VectorXd w = surface_area_weights(body);
    CurvatureReport rep = shape_operator(body);
    Eigen::VectorXd a = vf.a.size() ? vf.a : Eigen::VectorXd::Zero(body.size());
    Eigen::VectorXd Tv = stability_operator_apply(body, vf.v);

    double s_dvol = integrate(w, vf.v.cwiseAbs());
    double s_darea = integrate(w, (vf.v.array().abs() * rep.mean.array().abs()).matrix());
    double s_d2vol = integrate(
        w, (vf.v.array().square() * rep.mean.array().abs() + a.array().abs()).matrix());
    double s_d2area = integrate(
        w, (vf.v.array().abs() * Tv.array().abs() +
            rep.mean.array().square() * vf.v.array().square() +
            a.array().abs() * rep.mean.array().abs())
               .matrix());

    Measures m0 = measure(body);
    auto family = [&](double tau) {
        Eigen::VectorXd amount = tau * vf.v + 0.5 * tau * tau * a;
        return lagrangian_measure(body, displaced_points(body, amount));
    };

    FiniteDifferenceReport out;
    out.h = h_seq;
    std::vector<double> fd_dvol, fd_darea, fd_d2vol, fd_d2area;
    for (double h : h_seq) {
        Measures mp = family(h);
        Measures mm = family(-h);
        double dvol = (mp.volume - mm.volume) / (2.0 * h);
        double darea = (mp.area - mm.area) / (2.0 * h);
        double d2vol = (mp.volume - 2.0 * m0.volume + mm.volume) / (h * h);
        double d2area = (mp.area - 2.0 * m0.area + mm.area) / (h * h);
        fd_dvol.push_back(dvol);
        fd_darea.push_back(darea);
        fd_d2vol.push_back(d2vol);
        fd_d2area.push_back(d2area);
        out.err_dvol.push_back(std::abs(dvol - v1.d_vol));
        out.err_darea.push_back(std::abs(darea - v1.d_area));
        out.err_d2vol.push_back(std::abs(d2vol - v2.d_vol));
        out.err_d2area.push_back(std::abs(d2area - v2.d_area));
    }
    out.order_dvol = observed_order(h_seq, fd_dvol, s_dvol);
    out.order_darea = observed_order(h_seq, fd_darea, s_darea);
    out.order_d2vol = observed_order(h_seq, fd_d2vol, s_d2vol);
    out.order_d2area = observed_order(h_seq, fd_d2area, s_d2area);
    size_t last = h_seq.size() - 1;
    out.rel_dvol = out.err_dvol[last] / std::max(std::abs(v1.d_vol), s_dvol);
    out.rel_darea = out.err_darea[last] / std::max(std::abs(v1.d_area), s_darea);
    out.rel_d2vol = out.err_d2vol[last] / std::max(std::abs(v2.d_vol), s_d2vol);
    out.rel_d2area = out.err_d2area[last] / std::max(std::abs(v2.d_area), s_d2area);
    return out;
}

}  // namespace lclab
