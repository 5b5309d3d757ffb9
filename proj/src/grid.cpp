#include "lclab/grid.hpp"

#include <cmath>
#include <map>
#include <set>

#include "lclab/errors.hpp"

namespace lclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using V3 = Eigen::Vector3d;

struct IcoMesh {
    std::vector<V3> verts;
    std::vector<std::array<int, 3>> faces;
};

IcoMesh base_icosahedron() {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<V3> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : v) p.normalize();
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    return {v, f};
}

IcoMesh subdivide(const IcoMesh& in) {
    IcoMesh out;
    out.verts = in.verts;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        V3 m = (out.verts[a] + out.verts[b]).normalized();
        int id = static_cast<int>(out.verts.size());
        out.verts.push_back(m);
        midpoint.emplace(key, id);
        return id;
    };
    for (const auto& f : in.faces) {
        int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({f[1], bc, ab});
        out.faces.push_back({f[2], ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

// solid angle of a spherical triangle with unit-vector corners (signed,
// positive for outward-oriented faces)
double solid_angle(const V3& a, const V3& b, const V3& c) {
    double det = a.dot(b.cross(c));
    double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(det, denom);
}

void build_icosphere_tables(SphereGrid& g) {
    int N = g.size();
    int F = static_cast<int>(g.faces.size());

    std::vector<std::set<int>> nb(N);
    g.node_faces.assign(N, {});
    for (int fi = 0; fi < F; ++fi) {
        const auto& f = g.faces[fi];
        for (int e = 0; e < 3; ++e) {
            nb[f[e]].insert(f[(e + 1) % 3]);
            nb[f[e]].insert(f[(e + 2) % 3]);
            g.node_faces[f[e]].push_back(fi);
        }
    }
    g.neighbors.resize(N);
    for (int i = 0; i < N; ++i) g.neighbors[i].assign(nb[i].begin(), nb[i].end());

    g.stencils.resize(N);
    for (int i = 0; i < N; ++i) {
        std::set<int> ring(nb[i].begin(), nb[i].end());
        for (int j : nb[i]) ring.insert(nb[j].begin(), nb[j].end());
        ring.erase(i);
        g.stencils[i].push_back(i);
        g.stencils[i].insert(g.stencils[i].end(), ring.begin(), ring.end());
    }

    // lumped node weights from exact spherical face areas: they tile the
    // sphere, so the total is 4 pi to roundoff
    g.weights = Eigen::VectorXd::Zero(N);
    for (const auto& f : g.faces) {
        V3 a = g.nodes.row(f[0]), b = g.nodes.row(f[1]), c = g.nodes.row(f[2]);
        double w = solid_angle(a, b, c) / 3.0;
        if (w <= 0.0) throw NumericalDegeneracy("icosphere face with non-positive area");
        g.weights[f[0]] += w;
        g.weights[f[1]] += w;
        g.weights[f[2]] += w;
    }

    // node frames on the direction sphere
    g.frame1.resize(N, 3);
    g.frame2.resize(N, 3);
    for (int i = 0; i < N; ++i) {
        V3 v = g.nodes.row(i);
        int k = 0;
        for (int j = 1; j < 3; ++j)
            if (std::abs(v[j]) < std::abs(v[k])) k = j;
        V3 e = V3::Zero();
        e[k] = 1.0;
        V3 t1 = (e - e.dot(v) * v).normalized();
        V3 t2 = v.cross(t1);
        g.frame1.row(i) = t1;
        g.frame2.row(i) = t2;
    }

    // per-node pseudoinverse of the quadric design matrix over the 2-ring,
    // in normal coordinates at the node (exact sphere log map)
    g.fit.resize(N);
    double edge_sum = 0.0;
    long edge_count = 0;
    for (int i = 0; i < N; ++i) {
        const auto& st = g.stencils[i];
        int m = static_cast<int>(st.size());
        Eigen::MatrixXd A(m, 6);
        V3 v = g.nodes.row(i);
        V3 t1 = g.frame1.row(i), t2 = g.frame2.row(i);
        for (int r = 0; r < m; ++r) {
            V3 u = g.nodes.row(st[r]);
            double ca = std::min(1.0, std::max(-1.0, u.dot(v)));
            double alpha = std::acos(ca);
            double x = 0.0, y = 0.0;
            if (alpha > 0.0) {
                V3 d = (u - ca * v);
                double dn = d.norm();
                if (dn > 0.0) {
                    d /= dn;
                    x = alpha * d.dot(t1);
                    y = alpha * d.dot(t2);
                }
            }
            A(r, 0) = 1.0;
            A(r, 1) = x;
            A(r, 2) = y;
            A(r, 3) = 0.5 * x * x;
            A(r, 4) = x * y;
            A(r, 5) = 0.5 * y * y;
        }
        g.fit[i] = A.completeOrthogonalDecomposition().pseudoInverse();
    }
    for (int i = 0; i < N; ++i) {
        V3 v = g.nodes.row(i);
        for (int j : g.neighbors[i])
            if (j > i) {
                V3 u = g.nodes.row(j);
                edge_sum += std::acos(std::min(1.0, std::max(-1.0, u.dot(v))));
                ++edge_count;
            }
    }
    g.spacing_ = edge_sum / static_cast<double>(edge_count);
}

}  // namespace

std::shared_ptr<const SphereGrid> SphereGrid::circle(int N) {
    if (N < 8) throw DomainError("circle grid needs at least 8 nodes");
    static std::map<int, std::shared_ptr<const SphereGrid>> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;

    auto g = std::make_shared<SphereGrid>();
    g->n = 1;
    g->type = "circle";
    g->param = N;
    g->nodes.resize(N, 2);
    for (int j = 0; j < N; ++j) {
        double th = 2.0 * kPi * j / N;
        g->nodes(j, 0) = std::cos(th);
        g->nodes(j, 1) = std::sin(th);
    }
    g->weights = Eigen::VectorXd::Constant(N, 2.0 * kPi / N);
    g->neighbors.resize(N);
    for (int j = 0; j < N; ++j) g->neighbors[j] = {(j + N - 1) % N, (j + 1) % N};
    g->spacing_ = 2.0 * kPi / N;
    cache.emplace(N, g);
    return g;
}

std::shared_ptr<const SphereGrid> SphereGrid::icosphere(int level) {
    if (level < 0 || level > 7) throw DomainError("icosphere level out of range");
    static std::map<int, std::shared_ptr<const SphereGrid>> cache;
    auto it = cache.find(level);
    if (it != cache.end()) return it->second;

    IcoMesh mesh = base_icosahedron();
    for (int l = 0; l < level; ++l) mesh = subdivide(mesh);

    auto g = std::make_shared<SphereGrid>();
    g->n = 2;
    g->type = "icosphere";
    g->param = level;
    int N = static_cast<int>(mesh.verts.size());
    g->nodes.resize(N, 3);
    for (int i = 0; i < N; ++i) g->nodes.row(i) = mesh.verts[i];
    g->faces = mesh.faces;
    build_icosphere_tables(*g);
    cache.emplace(level, g);
    return g;
}

}  // namespace lclab
