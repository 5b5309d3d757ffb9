#include "lclab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lclab/fourier.hpp"
#include "lclab/numerics.hpp"

namespace lclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

double default_curvature_tol(const RadialBody& body) {
    return body.grid->n == 1 ? 1e-6 : 1e-3;
}

CurvatureReport shape_operator(const RadialBody& body) {
    const SphereGrid& g = *body.grid;
    int N = body.size();
    int n = g.n;
    CurvatureReport rep;
    rep.kappa.resize(N, n);
    rep.mean.resize(N);
    rep.trace_a2.resize(N);
    rep.metric.resize(N);
    rep.second_form.resize(N);
    rep.normal = surface_normals(body);

    if (n == 1) {
        Eigen::VectorXd up = fourier::derivative(body.rho, 1);
        Eigen::VectorXd upp = fourier::derivative(body.rho, 2);
        for (int j = 0; j < N; ++j) {
            WarpValues wv = warp_functions(body.kind, body.rho[j]);
            double th = wv.theta, thp = wv.theta_prime;
            double gj = up[j] * up[j] + th * th;
            if (gj < 1e-14) throw NumericalDegeneracy("degenerate induced metric");
            double W = std::sqrt(1.0 + up[j] * up[j] / (th * th));
            double hj = (-upp[j] + (2.0 * thp / th) * up[j] * up[j] + th * thp) / W;
            double kappa = hj / gj;
            rep.kappa(j, 0) = kappa;
            rep.mean[j] = kappa;
            rep.trace_a2[j] = kappa * kappa;
            rep.metric[j] = Eigen::MatrixXd::Constant(1, 1, gj);
            rep.second_form[j] = Eigen::MatrixXd::Constant(1, 1, hj);
        }
        return rep;
    }

    for (int j = 0; j < N; ++j) {
        const auto& st = g.stencils[j];
        Eigen::VectorXd vals(st.size());
        for (size_t r = 0; r < st.size(); ++r) vals[r] = body.rho[st[r]];
        Eigen::VectorXd c = g.fit[j] * vals;  // (u, u1, u2, u11, u12, u22)
        WarpValues wv = warp_functions(body.kind, body.rho[j]);
        double th = wv.theta, thp = wv.theta_prime;
        Eigen::Vector2d du(c[1], c[2]);
        Eigen::Matrix2d hess;
        hess << c[3], c[4], c[4], c[5];
        Eigen::Matrix2d metric = du * du.transpose() +
                                 th * th * Eigen::Matrix2d::Identity();
        if (metric.determinant() < 1e-14)
            throw NumericalDegeneracy("degenerate induced metric");
        double W = std::sqrt(1.0 + du.squaredNorm() / (th * th));
        Eigen::Matrix2d second =
            (-hess + (2.0 * thp / th) * du * du.transpose() +
             th * thp * Eigen::Matrix2d::Identity()) / W;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(second, metric);
        Eigen::Vector2d k = es.eigenvalues();  // ascending
        rep.kappa(j, 0) = k[0];
        rep.kappa(j, 1) = k[1];
        rep.mean[j] = k.sum();
        rep.trace_a2[j] = k.squaredNorm();
        rep.metric[j] = metric;
        rep.second_form[j] = second;
    }
    return rep;
}

LambdaCheck lambda_convexity_check(const RadialBody& body, double lambda, double tol) {
    if (tol < 0.0) tol = default_curvature_tol(body);
    CurvatureReport rep = shape_operator(body);
    LambdaCheck out;
    out.lambda = lambda;
    out.tol = tol;
    int arg = 0;
    double mn = rep.kappa(0, 0);
    for (int j = 1; j < rep.kappa.rows(); ++j)
        if (rep.kappa(j, 0) < mn) {
            mn = rep.kappa(j, 0);
            arg = j;
        }
    out.min_kappa = mn;
    out.min_node = arg;
    out.is_lambda_convex = mn >= lambda - tol;
    for (int j = 0; j < rep.kappa.rows(); ++j)
        if (rep.kappa(j, 0) > lambda + tol) {
            out.witness_strict = j;
            break;
        }
    return out;
}

bool supporting_ball_test(const RadialBody& body, int node, double lambda,
                          double delta) {
    double R = supporting_radius(body.kind, lambda);
    if (delta < 0.0) delta = 5.0 * typical_spacing(body);
    std::vector<Point> pts = surface_points(body);
    std::vector<Vec> nus = surface_normals(body);
    Point c = exp_map(TangentVector{pts[node], R * nus[node]});
    for (int q = 0; q < body.size(); ++q) {
        if (distance(pts[node], pts[q]) > delta) continue;
        if (distance(c, pts[q]) > R + 1e-12) return false;
    }
    return true;
}

int strict_point(const RadialBody& body, double lambda, double tol) {
    if (tol < 0.0) tol = default_curvature_tol(body);
    CurvatureReport rep = shape_operator(body);
    double mx = rep.kappa.col(0).maxCoeff();
    if (mx <= lambda + tol)
        throw NoStrictPoint("smallest principal curvature never exceeds lambda");
    for (int j = 0; j < rep.kappa.rows(); ++j)
        if (rep.kappa(j, 0) >= mx - tol) return j;
    return 0;  // unreachable
}

bool global_blaschke_check(const RadialBody& body, const LambdaClass& lc) {
    LambdaCheck chk = lambda_convexity_check(body, lc.lambda);
    if (!chk.is_lambda_convex)
        throw DomainError("global containment presumes a lambda-convex body");
    double R = lc.radius();
    std::vector<Point> pts = surface_points(body);
    std::vector<Vec> nus = surface_normals(body);
    for (int p = 0; p < body.size(); ++p) {
        Point c = exp_map(TangentVector{pts[p], R * nus[p]});
        for (int q = 0; q < body.size(); ++q)
            if (distance(c, pts[q]) > R + 1e-8) return false;
    }
    return true;
}

std::string curvature_to_csv(const CurvatureReport& report) {
    int n = static_cast<int>(report.kappa.cols());
    std::string out = "node";
    for (int k = 1; k <= n; ++k) out += ",k" + std::to_string(k);
    out += ",H\n";
    for (int j = 0; j < report.kappa.rows(); ++j) {
        out += std::to_string(j);
        for (int k = 0; k < n; ++k) out += "," + format_double(report.kappa(j, k));
        out += "," + format_double(report.mean[j]) + "\n";
    }
    return out;
}

Eigen::VectorXd local_kappa1(const RadialBody& body) {
    const SphereGrid& g = *body.grid;
    if (g.n == 2) return shape_operator(body).kappa.col(0);
    int N = body.size();
    double dt = 2.0 * kPi / N;
    const Eigen::VectorXd& u = body.rho;
    Eigen::VectorXd out(N);
    for (int j = 0; j < N; ++j) {
        double um2 = u[(j + N - 2) % N], um1 = u[(j + N - 1) % N];
        double up1 = u[(j + 1) % N], up2 = u[(j + 2) % N];
        double d1 = (8.0 * (up1 - um1) - (up2 - um2)) / (12.0 * dt);
        double d2 = (-up2 + 16.0 * up1 - 30.0 * u[j] + 16.0 * um1 - um2) /
                    (12.0 * dt * dt);
        WarpValues wv = warp_functions(body.kind, u[j]);
        double th = wv.theta, thp = wv.theta_prime;
        double gj = d1 * d1 + th * th;
        double W = std::sqrt(1.0 + d1 * d1 / (th * th));
        out[j] = (-d2 + (2.0 * thp / th) * d1 * d1 + th * thp) / (W * gj);
    }
    return out;
}

Eigen::VectorXd laplace_beltrami_apply(const RadialBody& body,
                                       const Eigen::VectorXd& f) {
    const SphereGrid& g = *body.grid;
    int N = body.size();
    if (f.size() != N) throw DomainError("field size does not match grid");
    if (g.n == 1) {
        // Delta f = (1/sqrt(g)) d/dtheta (f' / sqrt(g))
        Eigen::VectorXd up = fourier::derivative(body.rho, 1);
        Eigen::VectorXd sg(N);
        for (int j = 0; j < N; ++j) {
            WarpValues wv = warp_functions(body.kind, body.rho[j]);
            sg[j] = std::sqrt(up[j] * up[j] + wv.theta * wv.theta);
        }
        Eigen::VectorXd fp = fourier::derivative(f, 1);
        Eigen::VectorXd inner = fp.array() / sg.array();
        return (fourier::derivative(inner, 1).array() / sg.array()).matrix();
    }
    // cotangent weights from intrinsic (geodesic) edge lengths, lumped mass
    std::vector<Point> pts = surface_points(body);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd stiff = Eigen::VectorXd::Zero(N);
    auto cot_of = [](double opp, double s1, double s2, double area) {
        double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
        double sinv = 2.0 * area / (s1 * s2);
        return cosv / std::max(sinv, 1e-300);
    };
    for (const auto& fc : g.faces) {
        int i = fc[0], j = fc[1], k = fc[2];
        double lij = distance(pts[i], pts[j]);
        double ljk = distance(pts[j], pts[k]);
        double lki = distance(pts[k], pts[i]);
        double area = triangle_area(lij, ljk, lki);
        if (area <= 0.0) throw NumericalDegeneracy("degenerate surface triangle");
        double ci = cot_of(ljk, lij, lki, area);  // angle at i, opposite jk
        double cj = cot_of(lki, lij, ljk, area);
        double ck = cot_of(lij, ljk, lki, area);
        // edge (j,k) gets cot(i)/2, etc.
        stiff[j] += 0.5 * ci * (f[j] - f[k]);
        stiff[k] += 0.5 * ci * (f[k] - f[j]);
        stiff[k] += 0.5 * cj * (f[k] - f[i]);
        stiff[i] += 0.5 * cj * (f[i] - f[k]);
        stiff[i] += 0.5 * ck * (f[i] - f[j]);
        stiff[j] += 0.5 * ck * (f[j] - f[i]);
        double third = area / 3.0;
        mass[i] += third;
        mass[j] += third;
        mass[k] += third;
    }
    return (-stiff.array() / mass.array()).matrix();
}

}  // namespace lclab
