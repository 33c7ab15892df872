#pragma once

/**
 * Isometries of the model spaces and group actions on targets.
 *
 * An Isometry is a concrete motion of one space: an orthogonal affine map of
 * Euclidean space, a length-preserving graph automorphism acting on a metric
 * tree or on the cone over a graph (fixing the apex), a ray permutation of a
 * pod, or a tuple of factor isometries of a product.  A TargetAction assigns
 * an isometry to every element of a finite group acting on the domain
 * complex, extends generator assignments along generator words, and verifies
 * the homomorphism property on the element table.
 */

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chm/common.hpp"
#include "chm/group_action.hpp"
#include "chm/spaces.hpp"

namespace chm {

struct Isometry {
    SpaceKind kind = SpaceKind::Euclidean;

    Eigen::MatrixXd Q;         ///< Euclidean: y -> Q y + b
    Eigen::VectorXd b;
    std::vector<int> vperm;    ///< tree / graph cone: vertex permutation
    std::vector<int> rperm;    ///< pod: ray permutation
    std::vector<Isometry> parts;

    static Isometry identity(const Space& S) {
        Isometry g;
        g.kind = S.kind;
        switch (S.kind) {
            case SpaceKind::Euclidean:
                g.Q = Eigen::MatrixXd::Identity(S.dim, S.dim);
                g.b = Eigen::VectorXd::Zero(S.dim);
                break;
            case SpaceKind::MetricTree:
            case SpaceKind::GraphCone:
                g.vperm.resize(S.geom->n());
                for (int v = 0; v < S.geom->n(); ++v) g.vperm[v] = v;
                break;
            case SpaceKind::Pod:
                g.rperm.resize(S.rays);
                for (int r = 0; r < S.rays; ++r) g.rperm[r] = r;
                break;
            case SpaceKind::Product:
                for (const Space& f : S.factors) g.parts.push_back(identity(f));
                break;
        }
        return g;
    }

    static Isometry euclidean(Eigen::MatrixXd Q, Eigen::VectorXd b) {
        Isometry g;
        g.kind = SpaceKind::Euclidean;
        g.Q = std::move(Q);
        g.b = std::move(b);
        return g;
    }

    /// Graph automorphism acting on a tree or on a cone (apex fixed).
    static Isometry graph_map(const Space& S, std::vector<int> vperm) {
        Isometry g;
        g.kind = S.kind;
        g.vperm = std::move(vperm);
        return g;
    }

    static Isometry ray_map(std::vector<int> rperm) {
        Isometry g;
        g.kind = SpaceKind::Pod;
        g.rperm = std::move(rperm);
        return g;
    }

    static Isometry product_of(std::vector<Isometry> parts) {
        Isometry g;
        g.kind = SpaceKind::Product;
        g.parts = std::move(parts);
        return g;
    }
};

namespace detail {

inline GraphPoint map_graph_point(const MetricGraphGeometry& g, const std::vector<int>& vperm,
                                  const GraphPoint& p) {
    if (p.at_vertex()) return GraphPoint::at(vperm[p.vertex]);
    const auto& e = g.edge(p.edge);
    int u = vperm[e[0]], v = vperm[e[1]];
    int ie = g.edge_between(u, v);
    if (ie < 0) throw validation_error("vertex map is not a graph automorphism",
                                       join_ints(std::vector<int>{e[0], e[1]}));
    double off = g.edge(ie)[0] == u ? p.offset : g.length(ie) - p.offset;
    return g.canonical(GraphPoint::on(ie, off));
}

}  // namespace detail

inline Point apply_isometry(const Space& S, const Isometry& g, const Point& p) {
    switch (S.kind) {
        case SpaceKind::Euclidean:
            return Point::euclidean(g.Q * p.v + g.b);
        case SpaceKind::MetricTree:
            return Point::tree_at(detail::map_graph_point(*S.geom, g.vperm, p.gp));
        case SpaceKind::Pod:
            if (p.r == 0.0) return Point::pod_at(0, 0.0);
            return Point::pod_at(g.rperm[p.ray], p.r);
        case SpaceKind::GraphCone:
            if (p.is_apex()) return p;
            return Point::cone_at(detail::map_graph_point(*S.geom, g.vperm, p.gp), p.r);
        case SpaceKind::Product: {
            std::vector<Point> parts;
            parts.reserve(p.parts.size());
            for (std::size_t i = 0; i < p.parts.size(); ++i)
                parts.push_back(apply_isometry(S.factors[i], g.parts[i], p.parts[i]));
            return Point::product_of(std::move(parts));
        }
    }
    throw validation_error("unknown space kind");
}

/// Composition a∘b: apply b first, then a.
inline Isometry compose(const Space& S, const Isometry& a, const Isometry& b) {
    Isometry c;
    c.kind = S.kind;
    switch (S.kind) {
        case SpaceKind::Euclidean:
            c.Q = a.Q * b.Q;
            c.b = a.Q * b.b + a.b;
            break;
        case SpaceKind::MetricTree:
        case SpaceKind::GraphCone:
            c.vperm.resize(b.vperm.size());
            for (std::size_t v = 0; v < b.vperm.size(); ++v) c.vperm[v] = a.vperm[b.vperm[v]];
            break;
        case SpaceKind::Pod:
            c.rperm.resize(b.rperm.size());
            for (std::size_t r = 0; r < b.rperm.size(); ++r) c.rperm[r] = a.rperm[b.rperm[r]];
            break;
        case SpaceKind::Product:
            for (std::size_t i = 0; i < a.parts.size(); ++i)
                c.parts.push_back(compose(S.factors[i], a.parts[i], b.parts[i]));
            break;
    }
    return c;
}

inline bool isometry_equal(const Space& S, const Isometry& a, const Isometry& b,
                           double tol = kTol.equivariance) {
    switch (S.kind) {
        case SpaceKind::Euclidean:
            return (a.Q - b.Q).cwiseAbs().maxCoeff() <= tol &&
                   (a.b - b.b).cwiseAbs().maxCoeff() <= tol;
        case SpaceKind::MetricTree:
        case SpaceKind::GraphCone:
            return a.vperm == b.vperm;
        case SpaceKind::Pod:
            return a.rperm == b.rperm;
        case SpaceKind::Product:
            for (std::size_t i = 0; i < a.parts.size(); ++i)
                if (!isometry_equal(S.factors[i], a.parts[i], b.parts[i], tol)) return false;
            return true;
    }
    return false;
}

namespace detail {

inline void check_permutation(const std::vector<int>& p, int n, const char* what) {
    if (static_cast<int>(p.size()) != n)
        throw validation_error(std::string(what) + " has wrong length");
    std::vector<char> hit(n, 0);
    for (int v : p) {
        if (v < 0 || v >= n || hit[v])
            throw validation_error(std::string(what) + " is not a permutation");
        hit[v] = 1;
    }
}

}  // namespace detail

/// Structural checks plus distance preservation on sampled pairs.
inline void validate_isometry(const Space& S, const Isometry& g, Rng& rng,
                              int samples = 32, double tol = kTol.equivariance) {
    if (g.kind != S.kind) throw validation_error("isometry kind does not match the space");
    switch (S.kind) {
        case SpaceKind::Euclidean: {
            if (g.Q.rows() != S.dim || g.Q.cols() != S.dim ||
                g.b.size() != S.dim)
                throw validation_error("isometry dimension mismatch");
            Eigen::MatrixXd R = g.Q.transpose() * g.Q -
                                Eigen::MatrixXd::Identity(S.dim, S.dim);
            if (R.cwiseAbs().maxCoeff() > tol)
                throw validation_error("matrix is not orthogonal");
            break;
        }
        case SpaceKind::MetricTree:
        case SpaceKind::GraphCone: {
            const MetricGraphGeometry& G = *S.geom;
            detail::check_permutation(g.vperm, G.n(), "vertex map");
            for (int e = 0; e < G.num_edges(); ++e) {
                const auto& uv = G.edge(e);
                int ie = G.edge_between(g.vperm[uv[0]], g.vperm[uv[1]]);
                if (ie < 0)
                    throw validation_error("vertex map is not a graph automorphism",
                                           join_ints(std::vector<int>{uv[0], uv[1]}));
                if (std::abs(G.length(ie) - G.length(e)) > tol)
                    throw validation_error("vertex map does not preserve edge lengths",
                                           join_ints(std::vector<int>{uv[0], uv[1]}));
            }
            break;
        }
        case SpaceKind::Pod:
            detail::check_permutation(g.rperm, S.rays, "ray map");
            break;
        case SpaceKind::Product:
            if (g.parts.size() != S.factors.size())
                throw validation_error("isometry factor count mismatch");
            for (std::size_t i = 0; i < S.factors.size(); ++i)
                validate_isometry(S.factors[i], g.parts[i], rng, 0, tol);
            break;
    }
    for (int s = 0; s < samples; ++s) {
        Point p = random_point(S, rng);
        Point q = random_point(S, rng);
        double before = distance(S, p, q);
        double after = distance(S, apply_isometry(S, g, p), apply_isometry(S, g, q));
        if (std::abs(after - before) > tol)
            throw validation_error("map does not preserve distances",
                                   point_str(p) + " , " + point_str(q));
    }
}

/**
 * A homomorphism from a finite group into Isom(Y), given by generator
 * assignments and extended along generator words.
 */
struct TargetAction {
    Space space;
    std::vector<Isometry> gen_iso;   ///< parallel to G.generators()
    std::vector<Isometry> elem_iso;  ///< parallel to G element indices

    static TargetAction trivial(const Space& S, const GroupAction& G) {
        TargetAction rho;
        rho.space = S;
        rho.gen_iso.assign(G.generators().size(), Isometry::identity(S));
        rho.elem_iso.assign(G.size(), Isometry::identity(S));
        return rho;
    }

    static TargetAction from_generators(const Space& S, const GroupAction& G,
                                        std::vector<Isometry> gens, Rng& rng) {
        if (gens.size() != G.generators().size())
            throw validation_error("one isometry per group generator required");
        TargetAction rho;
        rho.space = S;
        for (const Isometry& g : gens) validate_isometry(S, g, rng);
        rho.gen_iso = std::move(gens);
        rho.elem_iso.reserve(G.size());
        for (int e = 0; e < G.size(); ++e) {
            Isometry acc = Isometry::identity(S);
            for (int wi : G.word(e)) acc = compose(S, rho.gen_iso[wi], acc);
            rho.elem_iso.push_back(std::move(acc));
        }
        rho.verify_homomorphism(G, rng);
        return rho;
    }

    const Isometry& of(int e) const { return elem_iso[e]; }

    Point apply(int e, const Point& p) const {
        return apply_isometry(space, elem_iso[e], p);
    }

    /// rho(a b) = rho(a) rho(b) on the element table (sampled when large).
    void verify_homomorphism(const GroupAction& G, Rng& rng, std::size_t pair_cap = 4096) const {
        int n = G.size();
        std::size_t total = static_cast<std::size_t>(n) * n;
        auto check = [&](int a, int b) {
            Isometry ab = compose(space, elem_iso[a], elem_iso[b]);
            if (!isometry_equal(space, elem_iso[G.mul(a, b)], ab))
                throw validation_error("generator assignment is not a homomorphism",
                                       "elements " + std::to_string(a) + ", " + std::to_string(b));
        };
        if (total <= pair_cap) {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) check(a, b);
        } else {
            for (std::size_t s = 0; s < pair_cap; ++s)
                check(unif_int(rng, 0, n - 1), unif_int(rng, 0, n - 1));
        }
    }
};

}  // namespace chm
