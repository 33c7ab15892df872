#pragma once
/**
 * @file buildings.hpp
 * @brief Generators: projective-plane incidence graphs, Cayley graphs, and
 *        the fixture complexes used throughout the test suite.
 *
 * PG(2,p) is built from homogeneous coordinates over F_p with the canonical
 * representative convention (first nonzero coordinate equal to 1).  The
 * incidence graph of PG(2,p) is the link of a vertex in a thick building of
 * type A2 with parameter p: a (p+1)-regular bipartite graph on
 * 2(p^2+p+1) vertices with (p+1)(p^2+p+1) edges and girth 6, whose
 * adjacency spectrum is {±(p+1)} ∪ {±sqrt(p) with multiplicity p^2+p}.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "chm/common.hpp"
#include "chm/group_action.hpp"
#include "chm/metric_graph.hpp"
#include "chm/simplicial_complex.hpp"

namespace chm {

inline bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

/// Incidence graph of the projective plane PG(2,p).  Vertices 0..N-1 are
/// points, N..2N-1 are lines (N = p^2+p+1); edges join incident pairs.
/// Edge length defaults to pi/3, the building-link normalization.
inline MetricGraph pg2_incidence_graph(int p) {
    if (!is_prime(p) || p > 101)
        throw validation_error("pg2_incidence_graph requires a prime p <= 101",
                               std::to_string(p));
    // canonical projective triples: (1,a,b), (0,1,b), (0,0,1)
    std::vector<std::array<int, 3>> reps;
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) reps.push_back({1, a, b});
    for (int b = 0; b < p; ++b) reps.push_back({0, 1, b});
    reps.push_back({0, 0, 1});
    const int N = p * p + p + 1;
    if (static_cast<int>(reps.size()) != N)
        throw validation_error("internal: projective point count");

    MetricGraph g;
    g.n = 2 * N;
    g.edge_length = std::acos(-1.0) / 3.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            long dot = 0;
            for (int c = 0; c < 3; ++c) dot += static_cast<long>(reps[i][c]) * reps[j][c];
            if (dot % p == 0) g.edges.push_back({i, N + j});
        }
    std::sort(g.edges.begin(), g.edges.end());
    g.bipartition.assign(g.n, 0);
    for (int j = 0; j < N; ++j) g.bipartition[N + j] = 1;
    g.validate();
    return g;
}

/// Girth via per-vertex BFS; returns -1 for forests.
inline int girth(const MetricGraph& g) {
    auto adj = g.adjacency();
    int best = -1;
    std::vector<int> dist(g.n), parent(g.n);
    for (int src = 0; src < g.n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(parent.begin(), parent.end(), -1);
        std::queue<int> q;
        q.push(src);
        dist[src] = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v]) {
                if (dist[w] == -1) {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    q.push(w);
                } else if (w != parent[v] && dist[w] >= dist[v]) {
                    int cyc = dist[v] + dist[w] + 1;
                    if (best == -1 || cyc < best) best = cyc;
                }
            }
        }
    }
    return best;
}

/// Cayley graph of the group generated by `gens` (vertex set = closure,
/// capped), connecting g to s*g for each generator s.  The generating set is
/// symmetrized; the identity must not be a generator.
inline MetricGraph cayley_graph(const std::vector<Perm>& gens, std::size_t cap = 10000,
                                double edge_length = std::acos(-1.0) / 3.0) {
    if (gens.empty()) throw validation_error("cayley_graph needs at least one generator");
    std::size_t deg = gens.front().size();
    std::vector<Perm> symm = gens;
    for (const Perm& g : gens) {
        if (g.size() != deg) throw validation_error("generator degrees differ");
        Perm inv(deg);
        std::vector<char> hit(deg, 0);
        for (std::size_t v = 0; v < deg; ++v) {
            if (g[v] < 0 || g[v] >= static_cast<int>(deg) || hit[g[v]])
                throw validation_error("generator is not a permutation");
            hit[g[v]] = 1;
            inv[g[v]] = static_cast<int>(v);
        }
        symm.push_back(inv);
    }
    std::sort(symm.begin(), symm.end());
    symm.erase(std::unique(symm.begin(), symm.end()), symm.end());
    Perm id(deg);
    std::iota(id.begin(), id.end(), 0);
    if (std::find(symm.begin(), symm.end(), id) != symm.end())
        throw validation_error("identity in the Cayley generating set");

    std::vector<Perm> elements{id};
    std::unordered_map<Perm, int, PermHash> index{{id, 0}};
    for (std::size_t head = 0; head < elements.size(); ++head)
        for (const Perm& s : symm) {
            Perm next(deg);
            for (std::size_t v = 0; v < deg; ++v) next[v] = s[elements[head][v]];
            if (index.emplace(next, elements.size()).second) {
                elements.push_back(next);
                if (elements.size() > cap)
                    throw validation_error("group closure exceeds cap of " + std::to_string(cap));
            }
        }

    MetricGraph g;
    g.n = static_cast<int>(elements.size());
    g.edge_length = edge_length;
    for (int i = 0; i < g.n; ++i)
        for (const Perm& s : symm) {
            Perm next(deg);
            for (std::size_t v = 0; v < deg; ++v) next[v] = s[elements[i][v]];
            int j = index.at(next);
            if (i < j) g.edges.push_back({i, j});
        }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// adjacency spectrum of incidence graphs

struct SpectrumCheck {
    bool ok = false;
    double max_deviation = 0;     ///< dense path: worst |computed - expected|
    bool structural_ok = false;   ///< regularity + bipartite top pair + A^2 = pI on the complement
    double structural_residual = 0;
    bool dense_checked = false;
};

/// Verifies the adjacency spectrum {±(p+1), ±sqrt(p) x (p^2+p)} of the
/// PG(2,p) incidence graph.  Dense eigensolve for moderate sizes; the
/// structural identity A^2 v = p v on {1, sigma}^perp is checked always.
inline SpectrumCheck adjacency_spectrum_check(const MetricGraph& g, int p,
                                              double tol = kTol.spectra) {
    const int n = g.n;
    const int N = p * p + p + 1;
    if (n != 2 * N) throw validation_error("graph size does not match p");
    SpectrumCheck out;

    auto adj = g.adjacency();
    // structural: regular of degree p+1
    double resid = 0;
    for (int v = 0; v < n; ++v)
        resid = std::max(resid, std::abs(static_cast<double>(adj[v].size()) - (p + 1)));
    // A^2 v = p v for v orthogonal to both the all-ones and the bipartition sign vector
    Rng rng(12345);
    Eigen::VectorXd one = Eigen::VectorXd::Ones(n), sig(n);
    for (int v = 0; v < n; ++v) sig[v] = g.bipartition.empty() ? (v < N ? 1 : -1)
                                                               : (g.bipartition[v] ? -1.0 : 1.0);
    auto apply_A = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        for (int v = 0; v < n; ++v)
            for (int w : adj[v]) y[v] += x[w];
        return y;
    };
    for (int trial = 0; trial < 4; ++trial) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        v -= (v.dot(one) / n) * one;
        v -= (v.dot(sig) / n) * sig;
        v.normalize();
        Eigen::VectorXd w = apply_A(apply_A(v)) - static_cast<double>(p) * v;
        resid = std::max(resid, w.cwiseAbs().maxCoeff());
    }
    Eigen::VectorXd top = apply_A(one) - (p + 1.0) * one;
    Eigen::VectorXd bot = apply_A(sig) + (p + 1.0) * sig;
    resid = std::max({resid, top.cwiseAbs().maxCoeff(), bot.cwiseAbs().maxCoeff()});
    out.structural_residual = resid;
    out.structural_ok = resid <= std::max(tol, 1e-12 * n);

    if (n <= 1600) {
        out.dense_checked = true;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (int v = 0; v < n; ++v)
            for (int w : adj[v]) A(v, w) = 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        std::vector<double> expect;
        expect.push_back(-(p + 1.0));
        for (int i = 0; i < N - 1; ++i) expect.push_back(-std::sqrt(double(p)));
        for (int i = 0; i < N - 1; ++i) expect.push_back(std::sqrt(double(p)));
        expect.push_back(p + 1.0);
        std::sort(expect.begin(), expect.end());
        double dev = 0;
        for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(es.eigenvalues()[i] - expect[i]));
        out.max_deviation = dev;
        out.ok = out.structural_ok && dev <= tol;
    } else {
        out.ok = out.structural_ok;
    }
    return out;
}

// ---------------------------------------------------------------------------
// fixture graphs and complexes

inline MetricGraph cycle_graph(int k, double edge_length = 1.0) {
    if (k < 3) throw validation_error("cycle needs k >= 3");
    MetricGraph g;
    g.n = k;
    g.edge_length = edge_length;
    for (int i = 0; i + 1 < k; ++i) g.edges.push_back({i, i + 1});
    g.edges.push_back({0, k - 1});
    std::sort(g.edges.begin(), g.edges.end());
    g.validate();
    return g;
}

/// Finite ball of the degree-regular tree: root 0, `depth` generations,
/// unit edge lengths.
inline MetricGraph regular_tree_graph(int degree, int depth) {
    if (degree < 2 || depth < 1) throw validation_error("regular tree needs degree >= 2, depth >= 1");
    MetricGraph g;
    g.n = 1;
    std::vector<int> frontier{0};
    for (int d = 0; d < depth; ++d) {
        std::vector<int> next;
        for (int v : frontier) {
            int children = (d == 0) ? degree : degree - 1;
            for (int c = 0; c < children; ++c) {
                int w = g.n++;
                g.edges.push_back({v, w});
                next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    g.validate();
    return g;
}

/// Boundary of the n-simplex on vertices 0..n.
inline WeightedComplex simplex_boundary(int n) {
    if (n < 2) throw validation_error("simplex boundary needs n >= 2");
    std::vector<Simplex> maxs;
    for (int omit = 0; omit <= n; ++omit) {
        Simplex s;
        for (int v = 0; v <= n; ++v)
            if (v != omit) s.push_back(v);
        maxs.push_back(s);
    }
    return build_complex(maxs);
}

/// Octahedron with opposite pairs (0,1), (2,3), (4,5).
inline WeightedComplex octahedron_complex() {
    std::vector<Simplex> tris;
    for (int a : {0, 1})
        for (int b : {2, 3})
            for (int c : {4, 5}) tris.push_back({a, b, c});
    return build_complex(tris);
}

inline Perm octahedron_antipodal() { return {1, 0, 3, 2, 5, 4}; }

/// Icosahedron from the golden-ratio coordinate model; vertex order is the
/// fixed enumeration of the 12 coordinate triples.
inline WeightedComplex icosahedron_complex() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> pts;
    for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
            pts.push_back({0.0, s1, s2 * phi});
            pts.push_back({s1, s2 * phi, 0.0});
            pts.push_back({s2 * phi, 0.0, s1});
        }
    auto d2 = [&](int i, int j) {
        double t = 0;
        for (int c = 0; c < 3; ++c) t += sq(pts[i][c] - pts[j][c]);
        return t;
    };
    std::vector<Simplex> tris;
    for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j)
            for (int k = j + 1; k < 12; ++k)
                if (std::abs(d2(i, j) - 4.0) < 1e-9 && std::abs(d2(i, k) - 4.0) < 1e-9 &&
                    std::abs(d2(j, k) - 4.0) < 1e-9)
                    tris.push_back({i, j, k});
    if (tris.size() != 20) throw validation_error("internal: icosahedron face count");
    return build_complex(tris);
}

/// Cone over a graph: apex vertex g.n, one triangle per edge.
inline WeightedComplex cone_over_graph(const MetricGraph& g) {
    g.validate();
    if (g.edges.empty()) throw validation_error("cone base graph needs edges");
    std::vector<Simplex> tris;
    for (const auto& e : g.edges) tris.push_back({e[0], e[1], g.n});
    return build_complex(tris);
}

/// Double cone (suspension) over a graph: apexes g.n and g.n+1.
inline WeightedComplex double_cone_over_graph(const MetricGraph& g) {
    g.validate();
    if (g.edges.empty()) throw validation_error("cone base graph needs edges");
    std::vector<Simplex> tris;
    for (const auto& e : g.edges) {
        tris.push_back({e[0], e[1], g.n});
        tris.push_back({e[0], e[1], g.n + 1});
    }
    return build_complex(tris);
}

}  // namespace chm
