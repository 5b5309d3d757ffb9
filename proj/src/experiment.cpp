#include "lclab/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

#include "lclab/curvature.hpp"
#include "lclab/enclosure.hpp"
#include "lclab/numerics.hpp"
#include "lclab/perturb.hpp"
#include "lclab/variation.hpp"

namespace lclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double env_tol(const char* name, double fallback) {
    const char* s = std::getenv(name);
    if (!s) return fallback;
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || !(v > 0.0))
        throw DomainError(std::string("bad tolerance in environment variable ") + name);
    return v;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

CaseMode parse_case_mode(const std::string& s) {
    if (s == "auto") return CaseMode::Auto;
    if (s == "case1") return CaseMode::Case1;
    if (s == "case2") return CaseMode::Case2;
    throw DomainError("case_mode must be auto, case1 or case2");
}

struct Artifacts {
    fs::path dir;
    json summary;

    void finalize(const ExperimentConfig& cfg, bool pass) {
        std::string echoed = config_to_json(cfg);
        summary["config"] = json::parse(echoed);
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(fnv1a(echoed)));
        summary["config_hash"] = hash;
        summary["pass"] = pass;
        write_file(dir / "summary.json", summary.dump(2) + "\n");
    }
};

json measures_json(const Measures& m) {
    return json{{"area", m.area}, {"volume", m.volume}};
}

// --- subcommands -------------------------------------------------------------

int run_spaceform_table(const ExperimentConfig&, Artifacts& art) {
    std::string warp = "kind,r,theta,theta_prime,antiderivative\n";
    std::string radius = "kind,lambda,radius\n";
    for (SpaceformKind k : {SpaceformKind::Euclidean, SpaceformKind::Spherical,
                            SpaceformKind::Hyperbolic}) {
        for (int i = 0; i <= 15; ++i) {
            double r = 0.1 * i;
            WarpValues wv = warp_functions(k, r);
            warp += std::string(kind_name(k)) + "," + format_double(r) + "," +
                    format_double(wv.theta) + "," + format_double(wv.theta_prime) + "," +
                    format_double(wv.antiderivative) + "\n";
        }
        std::vector<double> lambdas = k == SpaceformKind::Hyperbolic
                                          ? std::vector<double>{1.1, 1.5, 2.0, 5.0}
                                          : std::vector<double>{0.5, 1.0, 2.0, 5.0};
        for (double l : lambdas)
            radius += std::string(kind_name(k)) + "," + format_double(l) + "," +
                      format_double(supporting_radius(k, l)) + "\n";
    }
    write_file(art.dir / "warp.csv", warp);
    write_file(art.dir / "radius.csv", radius);

    double r_e = supporting_radius(SpaceformKind::Euclidean, 2.0);
    double r_s = supporting_radius(SpaceformKind::Spherical, 1.0);
    double r_h = supporting_radius(SpaceformKind::Hyperbolic, 2.0);
    bool rejected = !radius_of_lambda(SpaceformKind::Hyperbolic, 1.0).has_radius();
    bool pass = r_e == 0.5 && std::abs(r_s - kPi / 4.0) <= 1e-10 &&
                std::abs(r_h - 0.5 * std::log(3.0)) <= 1e-10 && rejected;
    art.summary["anchors"] = {{"euclidean_lambda2", r_e},
                              {"spherical_lambda1", r_s},
                              {"hyperbolic_lambda2", r_h},
                              {"hyperbolic_lambda1_rejected", rejected}};
    std::cout << "[spaceform-table] radius anchors " << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

int run_measure(const ExperimentConfig& cfg, Artifacts& art) {
    RadialBody body = seed_body_from_config(cfg);
    Measures m = measure(body);
    art.summary["measures"] = measures_json(m);

    bool pass = true;
    if (cfg.body == "ball") {
        double tol = env_tol("LCLAB_TOL_MEASURE", cfg.n == 1 ? 1e-8 : 1e-3);
        Measures ref = closed_form_ball(body.kind, cfg.n, cfg.radius);
        double ra = std::abs(m.area - ref.area) / ref.area;
        double rv = std::abs(m.volume - ref.volume) / ref.volume;
        pass = ra <= tol && rv <= tol;
        art.summary["closed_form"] = measures_json(ref);
        art.summary["rel_err"] = {{"area", ra}, {"volume", rv}, {"tol", tol}};
    } else if (cfg.body == "lens" && body.kind == SpaceformKind::Euclidean && cfg.n == 1) {
        // corner sampling keeps the lens anchor looser than the smooth one
        double tol = env_tol("LCLAB_TOL_MEASURE", 5e-3);
        Measures ref = closed_form_lens2d(cfg.lambda, cfg.lens_d);
        double ra = std::abs(m.area - ref.area) / ref.area;
        double rv = std::abs(m.volume - ref.volume) / ref.volume;
        pass = ra <= tol && rv <= tol;
        art.summary["closed_form"] = measures_json(ref);
        art.summary["rel_err"] = {{"area", ra}, {"volume", rv}, {"tol", tol}};
    }
    if (!pass)
        art.summary["failure"] = {{"kind", "measure-anchor"},
                                  {"detail", "relative error above tolerance"}};
    std::cout << "[measure] area=" << format_double(m.area)
              << " volume=" << format_double(m.volume)
              << (art.summary.contains("rel_err") ? (pass ? " (anchor ok)" : " (anchor FAIL)")
                                                  : "")
              << "\n";
    return pass ? 0 : 1;
}

int run_check(const ExperimentConfig& cfg, Artifacts& art) {
    RadialBody body = seed_body_from_config(cfg);
    double tol = env_tol("LCLAB_TOL_CURVATURE", default_curvature_tol(body));
    LambdaCheck chk = lambda_convexity_check(body, cfg.lambda, tol);
    write_file(art.dir / "curvature.csv", curvature_to_csv(shape_operator(body)));

    art.summary["lambda"] = chk.lambda;
    art.summary["tol"] = chk.tol;
    art.summary["is_lambda_convex"] = chk.is_lambda_convex;
    art.summary["min_kappa"] = chk.min_kappa;
    art.summary["min_node"] = chk.min_node;
    if (chk.witness_strict) art.summary["witness_strict"] = *chk.witness_strict;

    if (!chk.is_lambda_convex) {
        art.summary["failure"] = {{"kind", "not-lambda-convex"},
                                  {"witness_node", chk.min_node},
                                  {"min_kappa", chk.min_kappa}};
        std::cout << "[check] not lambda-convex, witness node " << chk.min_node
                  << " (kappa_1 = " << format_double(chk.min_kappa) << " < "
                  << format_double(cfg.lambda) << ")\n";
        return 1;
    }
    bool blaschke = true;
    if (lambda_in_interval(body.kind, cfg.lambda)) {
        blaschke = global_blaschke_check(body, radius_of_lambda(body.kind, cfg.lambda));
        art.summary["blaschke"] = blaschke;
    } else {
        art.summary["blaschke"] = nullptr;  // no supporting radius for this lambda
    }
    if (!blaschke)
        art.summary["failure"] = {{"kind", "blaschke-containment"},
                                  {"detail", "a supporting ball misses part of the body"}};
    std::cout << "[check] lambda-convex (min kappa_1 = " << format_double(chk.min_kappa)
              << (lambda_in_interval(body.kind, cfg.lambda)
                      ? std::string(", blaschke ") + (blaschke ? "pass" : "FAIL")
                      : std::string(", no supporting radius for lambda"))
              << ")\n";
    return blaschke ? 0 : 1;
}

int run_variation_verify(const ExperimentConfig& cfg, Artifacts& art) {
    SpaceformKind kind = kind_from_name(cfg.kind);
    auto grid = cfg.n == 1 ? SphereGrid::circle(cfg.grid ? cfg.grid : 512)
                           : SphereGrid::icosphere(cfg.grid ? cfg.grid : 5);
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<double> h_seq = cfg.n == 1 ? std::vector<double>{4e-3, 2e-3, 1e-3, 5e-4}
                                           : std::vector<double>{4e-2, 2e-2, 1e-2};
    double tol = env_tol("LCLAB_TOL_FD", cfg.n == 1 ? 1e-6 : 1e-3);
    double min_order = cfg.n == 1 ? 1.95 : 1.8;

    std::string csv = "trial,h,err_dvol,err_darea,err_d2vol,err_d2area\n";
    json trials = json::array();
    bool pass = true;
    int max_mode = cfg.n == 1 ? 6 : 9;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        double R = kind == SpaceformKind::Spherical ? 0.5 + 0.3 * uni(rng)
                                                    : 0.7 + 0.4 * uni(rng);
        double amp = 0.02 + 0.06 * uni(rng);
        int mode = 1 + static_cast<int>(uni(rng) * max_mode) % max_mode;
        RadialBody body = make_perturbed_ball(kind, model_origin(kind, cfg.n + 1), R,
                                              grid, mode, amp);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(body.size());
        Eigen::VectorXd a = Eigen::VectorXd::Zero(body.size());
        for (int m = 1; m <= 4; ++m) {
            Eigen::VectorXd prof = harmonic_profile(*grid, m);
            v += (uni(rng) - 0.5) * prof;
            a += (uni(rng) - 0.5) * prof;
        }
        v.array() += 0.1 * (uni(rng) - 0.5);  // nonzero mean: exercises volume change
        VariationField vf = make_variation_field(body, v, a);
        FiniteDifferenceReport rep = finite_difference_check(body, vf, h_seq);
        for (size_t i = 0; i < h_seq.size(); ++i)
            csv += std::to_string(trial) + "," + format_double(rep.h[i]) + "," +
                   format_double(rep.err_dvol[i]) + "," + format_double(rep.err_darea[i]) +
                   "," + format_double(rep.err_d2vol[i]) + "," +
                   format_double(rep.err_d2area[i]) + "\n";
        bool ok = rep.pass(tol, min_order);
        pass = pass && ok;
        trials.push_back({{"trial", trial},
                          {"orders",
                           {rep.order_dvol, rep.order_darea, rep.order_d2vol,
                            rep.order_d2area}},
                          {"rel_errors",
                           {rep.rel_dvol, rep.rel_darea, rep.rel_d2vol, rep.rel_d2area}},
                          {"pass", ok}});
    }
    write_file(art.dir / "fd.csv", csv);
    art.summary["trials"] = trials;
    art.summary["tol"] = tol;
    art.summary["min_order"] = min_order;
    if (!pass)
        art.summary["failure"] = {{"kind", "finite-difference-mismatch"},
                                  {"detail", "see trials[] for orders and errors"}};
    std::cout << "[variation-verify] " << cfg.trials << " trials "
              << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

int run_perturb(const ExperimentConfig& cfg, Artifacts& art) {
    RadialBody seed = seed_body_from_config(cfg);
    CaseMode mode = parse_case_mode(cfg.case_mode);
    double drift_tol = env_tol("LCLAB_TOL_DRIFT", 1e-8);

    PerturbTrajectory traj;
    bool trivial = false;
    try {
        traj = run_perturb_trajectory(seed, cfg.lambda, cfg.steps, cfg.t0, mode);
    } catch (const TrivialBody& e) {
        trivial = true;
        Measures m = measure(seed);
        PerturbEntry e0;
        e0.body = seed;
        e0.area = m.area;
        e0.volume = m.volume;
        e0.min_kappa = shape_operator(seed).kappa.col(0).minCoeff();
        traj.entries.push_back(std::move(e0));
        art.summary["note"] = e.what();
    }
    write_file(art.dir / "trajectory.csv", trajectory_to_csv(traj));

    int accepted = static_cast<int>(traj.entries.size()) - 1;
    double vol0 = traj.entries.front().volume;
    bool increasing = true;
    double drift = 0.0;
    for (size_t i = 1; i < traj.entries.size(); ++i) {
        increasing = increasing && traj.entries[i].area > traj.entries[i - 1].area;
        drift = std::max(drift,
                         std::abs(traj.entries[i].volume - vol0) / std::abs(vol0));
    }
    art.summary["accepted_steps"] = accepted;
    art.summary["case_used"] = traj.case_used;
    art.summary["area_increasing"] = increasing;
    art.summary["volume_drift"] = drift;
    art.summary["drift_tol"] = drift_tol;
    art.summary["final"] = {{"area", traj.entries.back().area},
                            {"volume", traj.entries.back().volume}};

    bool pass = trivial ? accepted == 0
                        : accepted >= 1 && increasing && drift <= drift_tol;
    if (!pass)
        art.summary["failure"] = {{"kind", "perturb-trajectory"},
                                  {"accepted", accepted},
                                  {"area_increasing", increasing},
                                  {"volume_drift", drift}};
    std::cout << "[perturb] " << (trivial ? "trivial seed, no admissible step"
                                          : std::to_string(accepted) + " accepted steps")
              << (pass ? " (pass)" : " (FAIL)") << "\n";
    return pass ? 0 : 1;
}

int run_maximize(const ExperimentConfig& cfg, Artifacts& art) {
    RadialBody seed = seed_body_from_config(cfg);
    MaximizeConfig mc;
    mc.max_iters = cfg.max_iters;
    mc.t0 = cfg.t0;
    double drift_tol = env_tol("LCLAB_TOL_DRIFT", 1e-8);

    MaximizeResult res;
    try {
        res = maximize_area(seed, cfg.lambda, mc);
    } catch (const DomainError& e) {
        art.summary["failure"] = {{"kind", "bad-seed"}, {"detail", e.what()}};
        std::cout << "[maximize] " << e.what() << " (FAIL)\n";
        return 1;
    }
    write_file(art.dir / "trajectory.csv", trajectory_to_csv(res.trajectory));

    Measures m0 = measure(seed);
    Measures mf = measure(res.body);
    double drift = std::abs(mf.volume - m0.volume) / std::abs(m0.volume);
    art.summary["accepted_steps"] = res.accepted_steps;
    art.summary["pinned_fraction"] = res.pinned_fraction;
    art.summary["max_smooth_excess"] = res.max_smooth_excess;
    art.summary["note"] = res.note;
    art.summary["seed"] = measures_json(m0);
    art.summary["final"] = measures_json(mf);
    art.summary["volume_drift"] = drift;

    bool trivial = res.note.rfind("trivial", 0) == 0;
    bool pass = trivial ? res.accepted_steps == 0
                        : res.pinned_fraction >= 0.95 && mf.area > m0.area &&
                              drift <= drift_tol;
    if (!pass)
        art.summary["failure"] = {{"kind", "maximize-quality"},
                                  {"pinned_fraction", res.pinned_fraction},
                                  {"volume_drift", drift}};
    std::cout << "[maximize] " << res.accepted_steps << " steps, pinned fraction "
              << format_double(res.pinned_fraction) << ", " << res.note
              << (pass ? " (pass)" : " (FAIL)") << "\n";
    return pass ? 0 : 1;
}

int run_lens(const ExperimentConfig& cfg, Artifacts& art) {
    SpaceformKind kind = kind_from_name(cfg.kind);
    LambdaClass lc = radius_of_lambda(kind, cfg.lambda);
    Point origin = model_origin(kind, cfg.n + 1);
    std::vector<Vec> frame = tangent_frame(origin);
    Point p = exp_map(make_tangent(origin, -0.5 * cfg.lens_d * frame[0]));
    Point q = exp_map(make_tangent(origin, 0.5 * cfg.lens_d * frame[0]));
    LensSpec lens = make_lens_spec(lc, p, q);

    EnclosureResult enc;
    try {
        enc = enclosing_ball(lens);
    } catch (const MarginViolation& e) {
        art.summary["failure"] = {{"kind", "margin-violation"}, {"detail", e.what()}};
        std::cout << "[lens] " << e.what() << " (FAIL)\n";
        return 1;
    }
    CircumradiusResult brute = circumradius_bruteforce(lens, 257);

    // random interior probes for the distance profile property
    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double R = lc.radius();
    Point mid = geodesic_interpolate(p, q, 0.5);
    std::vector<Vec> mid_frame = tangent_frame(mid);
    int beta_pass = 0;
    std::string beta_csv = "t,beta\n";
    for (int probe = 0; probe < cfg.trials; ++probe) {
        Point z = mid;
        for (int attempt = 0; attempt < 100; ++attempt) {
            Vec dir = Vec::Zero(mid.x.size());
            for (const Vec& f : mid_frame) dir += gauss(rng) * f;
            double nn = std::sqrt(model_inner(kind, dir, dir));
            if (nn < 1e-12) continue;
            Point cand = exp_map(make_tangent(mid, (uni(rng) * R / nn) * dir));
            if (distance(cand, p) <= R - 1e-9 && distance(cand, q) <= R - 1e-9) {
                z = cand;
                break;
            }
        }
        BetaReport rep = beta_profile_check(lens, z);
        if (rep.pass()) ++beta_pass;
        if (probe == 0)
            for (size_t k = 0; k < rep.t.size(); ++k)
                beta_csv += format_double(rep.t[k]) + "," + format_double(rep.beta[k]) + "\n";
    }
    write_file(art.dir / "beta.csv", beta_csv);

    art.summary["rho"] = enc.rho;
    art.summary["margin"] = enc.margin;
    art.summary["bruteforce"] = {{"radius", brute.radius}, {"s", brute.s}};
    art.summary["beta_pass"] = beta_pass;
    art.summary["beta_trials"] = cfg.trials;

    bool midpoint_optimal = enc.rho - brute.radius <= 1e-9;
    bool pass = enc.margin > 0.0 && midpoint_optimal && beta_pass == cfg.trials;
    if (!pass)
        art.summary["failure"] = {{"kind", "enclosure-chain"},
                                  {"midpoint_optimal", midpoint_optimal},
                                  {"beta_pass", beta_pass}};
    std::cout << "[lens] rho=" << format_double(enc.rho)
              << " margin=" << format_double(enc.margin) << " beta " << beta_pass << "/"
              << cfg.trials << (pass ? " (pass)" : " (FAIL)") << "\n";
    return pass ? 0 : 1;
}

}  // namespace

RadialBody make_ellipse_body(double a, double b,
                             std::shared_ptr<const SphereGrid> grid) {
    if (grid->n != 1) throw DomainError("the ellipse body is planar (n = 1)");
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse semi-axes must be positive");
    int N = grid->size();
    Eigen::VectorXd rho(N);
    for (int j = 0; j < N; ++j) {
        double c = grid->nodes(j, 0), s = grid->nodes(j, 1);
        rho[j] = a * b / std::sqrt(b * b * c * c + a * a * s * s);
    }
    return make_radial_body(SpaceformKind::Euclidean,
                            model_origin(SpaceformKind::Euclidean, 2), grid, rho);
}

RadialBody seed_body_from_config(const ExperimentConfig& cfg) {
    SpaceformKind kind = kind_from_name(cfg.kind);
    auto grid = cfg.n == 1 ? SphereGrid::circle(cfg.grid ? cfg.grid : 512)
                           : SphereGrid::icosphere(cfg.grid ? cfg.grid : 5);
    Point origin = model_origin(kind, cfg.n + 1);
    if (cfg.body == "ball") return make_ball(kind, origin, cfg.radius, grid);
    if (cfg.body == "perturbed")
        return make_perturbed_ball(kind, origin, cfg.radius, grid, cfg.mode,
                                   cfg.amplitude);
    if (cfg.body == "ellipse") return make_ellipse_body(cfg.axis_a, cfg.axis_b, grid);
    if (cfg.body == "lens") {
        LambdaClass lc = radius_of_lambda(kind, cfg.lambda);
        std::vector<Vec> frame = tangent_frame(origin);
        Point p = exp_map(make_tangent(origin, -0.5 * cfg.lens_d * frame[0]));
        Point q = exp_map(make_tangent(origin, 0.5 * cfg.lens_d * frame[0]));
        return make_lens_body(make_lens_spec(lc, p, q), grid);
    }
    throw DomainError("unknown body descriptor: " + cfg.body);
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    ExperimentConfig cfg;
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "subcommand") cfg.subcommand = val.get<std::string>();
            else if (key == "kind") cfg.kind = val.get<std::string>();
            else if (key == "n") cfg.n = val.get<int>();
            else if (key == "grid") cfg.grid = val.get<int>();
            else if (key == "lambda") cfg.lambda = val.get<double>();
            else if (key == "body") cfg.body = val.get<std::string>();
            else if (key == "radius") cfg.radius = val.get<double>();
            else if (key == "mode") cfg.mode = val.get<int>();
            else if (key == "amplitude") cfg.amplitude = val.get<double>();
            else if (key == "axis_a") cfg.axis_a = val.get<double>();
            else if (key == "axis_b") cfg.axis_b = val.get<double>();
            else if (key == "lens_d") cfg.lens_d = val.get<double>();
            else if (key == "steps") cfg.steps = val.get<int>();
            else if (key == "t0") cfg.t0 = val.get<double>();
            else if (key == "case_mode") cfg.case_mode = val.get<std::string>();
            else if (key == "max_iters") cfg.max_iters = val.get<int>();
            else if (key == "trials") cfg.trials = val.get<int>();
            else if (key == "rng_seed") cfg.rng_seed = val.get<std::uint64_t>();
            else if (key == "out_dir") cfg.out_dir = val.get<std::string>();
            else if (key == "verbose") cfg.verbose = val.get<bool>();
            else throw DomainError("unknown config key: " + key);
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("config field has the wrong type: ") + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j{{"subcommand", cfg.subcommand},
           {"kind", cfg.kind},
           {"n", cfg.n},
           {"grid", cfg.grid},
           {"lambda", cfg.lambda},
           {"body", cfg.body},
           {"radius", cfg.radius},
           {"mode", cfg.mode},
           {"amplitude", cfg.amplitude},
           {"axis_a", cfg.axis_a},
           {"axis_b", cfg.axis_b},
           {"lens_d", cfg.lens_d},
           {"steps", cfg.steps},
           {"t0", cfg.t0},
           {"case_mode", cfg.case_mode},
           {"max_iters", cfg.max_iters},
           {"trials", cfg.trials},
           {"rng_seed", cfg.rng_seed},
           {"out_dir", cfg.out_dir},
           {"verbose", cfg.verbose}};
    return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& cfg) {
    static const std::vector<std::string> subs{"spaceform-table", "measure",
                                               "check", "variation-verify",
                                               "perturb", "maximize", "lens"};
    if (std::find(subs.begin(), subs.end(), cfg.subcommand) == subs.end())
        throw DomainError("unknown subcommand: " + cfg.subcommand);
    SpaceformKind kind = kind_from_name(cfg.kind);  // throws on bad names
    if (cfg.n != 1 && cfg.n != 2) throw DomainError("n must be 1 or 2");
    if (cfg.grid < 0) throw DomainError("grid must be nonnegative");
    if (!(cfg.lambda > 0.0)) throw DomainError("lambda must be positive");
    static const std::vector<std::string> bodies{"ball", "perturbed", "ellipse", "lens"};
    if (std::find(bodies.begin(), bodies.end(), cfg.body) == bodies.end())
        throw DomainError("unknown body descriptor: " + cfg.body);
    if (cfg.body == "ellipse" && (kind != SpaceformKind::Euclidean || cfg.n != 1))
        throw DomainError("the ellipse body needs the Euclidean plane (n = 1)");
    if (!(cfg.radius > 0.0)) throw DomainError("radius must be positive");
    if (cfg.amplitude < 0.0) throw DomainError("amplitude must be nonnegative");
    if (cfg.steps < 1 || cfg.trials < 1 || cfg.max_iters < 1)
        throw DomainError("steps, trials and max_iters must be positive");
    if (!(cfg.t0 > 0.0)) throw DomainError("t0 must be positive");
    parse_case_mode(cfg.case_mode);
    if (cfg.subcommand == "lens" || cfg.body == "lens") {
        if (!lambda_in_interval(kind, cfg.lambda))
            throw DomainError("lambda admits no supporting radius in this spaceform");
        double R = supporting_radius(kind, cfg.lambda);
        if (!(cfg.lens_d > 0.0) || !(cfg.lens_d < 2.0 * R))
            throw DomainError("lens_d must lie strictly between 0 and 2 R(lambda)");
    }
}

int run_experiment(const ExperimentConfig& cfg) {
    Artifacts art;
    art.dir = cfg.out_dir;
    fs::create_directories(art.dir);

    int status = 1;
    try {
        if (cfg.subcommand == "spaceform-table") status = run_spaceform_table(cfg, art);
        else if (cfg.subcommand == "measure") status = run_measure(cfg, art);
        else if (cfg.subcommand == "check") status = run_check(cfg, art);
        else if (cfg.subcommand == "variation-verify") status = run_variation_verify(cfg, art);
        else if (cfg.subcommand == "perturb") status = run_perturb(cfg, art);
        else if (cfg.subcommand == "maximize") status = run_maximize(cfg, art);
        else if (cfg.subcommand == "lens") status = run_lens(cfg, art);
        else throw DomainError("unknown subcommand: " + cfg.subcommand);
    } catch (const Error& e) {
        art.summary["failure"] = {{"kind", "exception"}, {"detail", e.what()}};
        art.finalize(cfg, false);
        std::cout << "[" << cfg.subcommand << "] error: " << e.what() << " (FAIL)\n";
        return 1;
    }
    art.finalize(cfg, status == 0);
    return status;
}

}  // namespace lclab
