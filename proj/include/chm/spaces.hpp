/**
 * @file spaces.hpp
 * @brief Concrete Hadamard (CAT(0)) target spaces.
 *
 * Five kinds are implemented:
 *   - Euclidean(d)
 *   - MetricTree: a finite combinatorial tree with positive edge lengths
 *   - Pod(n, bound): n half-lines (rays) glued at a common origin
 *   - GraphCone: the metric cone over a metric graph whose shortest cycle
 *     has length >= 2*pi (for edge length pi/3 this is girth >= 6)
 *   - Product: a finite product with the l2 combination of distances
 *
 * Points, geodesics, Alexandrov angles, log maps into tangent cones and
 * the associated inner products all have exact per-kind formulas here.
 *
 * Cone geometry conventions: a point is (xi, t) with xi a graph point and
 * t >= 0 the radius; d((xi,t),(xi',t'))^2 = (t-t')^2 + 4tt' sin^2(theta/2)
 * with theta = min(d_graph(xi,xi'), pi).  Geodesics between points whose
 * directions subtend theta < pi are computed by unfolding the sector into
 * the plane; for theta >= pi they pass through the apex.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "chm/common.hpp"
#include "chm/metric_graph.hpp"

namespace chm {

enum class SpaceKind { Euclidean, MetricTree, Pod, GraphCone, Product };

inline const char* kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::Euclidean: return "euclidean";
        case SpaceKind::MetricTree: return "tree";
        case SpaceKind::Pod: return "pod";
        case SpaceKind::GraphCone: return "graph_cone";
        case SpaceKind::Product: return "product";
    }
    return "?";
}

class Space {
  public:
    SpaceKind kind = SpaceKind::Euclidean;
    int dim = 0;                                ///< Euclidean
    std::shared_ptr<MetricGraphGeometry> geom;  ///< MetricTree / GraphCone
    int rays = 0;                               ///< Pod
    double ray_bound = std::numeric_limits<double>::infinity();
    std::vector<Space> factors;                 ///< Product

    static Space euclidean(int d) {
        if (d < 1) throw validation_error("euclidean dimension must be >= 1");
        Space s;
        s.kind = SpaceKind::Euclidean;
        s.dim = d;
        return s;
    }

    static Space tree(std::shared_ptr<MetricGraphGeometry> g) {
        if (!g || !g->connected() || !g->acyclic())
            throw validation_error("metric tree requires a connected acyclic graph");
        Space s;
        s.kind = SpaceKind::MetricTree;
        s.geom = std::move(g);
        return s;
    }

    static Space pod(int n, double bound = std::numeric_limits<double>::infinity()) {
        if (n < 2) throw validation_error("pod needs at least 2 rays");
        if (!(bound > 0)) throw validation_error("pod ray bound must be positive");
        Space s;
        s.kind = SpaceKind::Pod;
        s.rays = n;
        s.ray_bound = bound;
        return s;
    }

    static Space graph_cone(std::shared_ptr<MetricGraphGeometry> g) {
        if (!g || !g->connected())
            throw validation_error("graph cone requires a connected graph");
        double c = shortest_cycle_length(*g);
        if (c >= 0.0 && c < 2.0 * M_PI - 1e-12)
            throw validation_error("graph cone base has a cycle of length " +
                                   std::to_string(c) + " < 2*pi; not CAT(0)");
        Space s;
        s.kind = SpaceKind::GraphCone;
        s.geom = std::move(g);
        return s;
    }

    static Space product(std::vector<Space> fs) {
        if (fs.empty()) throw validation_error("product needs at least one factor");
        Space s;
        s.kind = SpaceKind::Product;
        s.factors = std::move(fs);
        return s;
    }

    /// Shortest metric cycle length, -1 if the graph is a forest.
    static double shortest_cycle_length(const MetricGraphGeometry& g) {
        double best = -1.0;
        for (int e = 0; e < g.num_edges(); ++e) {
            auto [u, v] = std::pair(g.edge(e)[0], g.edge(e)[1]);
            double around = g.vdist_without_edge(u, v, e);
            if (around == std::numeric_limits<double>::infinity()) continue;
            double cyc = around + g.length(e);
            if (best < 0.0 || cyc < best) best = cyc;
        }
        return best;
    }

    std::string name() const {
        std::ostringstream os;
        switch (kind) {
            case SpaceKind::Euclidean: os << "euclidean(" << dim << ")"; break;
            case SpaceKind::MetricTree: os << "tree(" << geom->n() << " vertices)"; break;
            case SpaceKind::Pod:
                os << "pod(" << rays;
                if (std::isfinite(ray_bound)) os << ", bound=" << ray_bound;
                os << ")";
                break;
            case SpaceKind::GraphCone:
                os << "graph_cone(" << geom->n() << " vertices)";
                break;
            case SpaceKind::Product: {
                os << "product(";
                for (std::size_t i = 0; i < factors.size(); ++i)
                    os << (i ? ", " : "") << factors[i].name();
                os << ")";
                break;
            }
        }
        return os.str();
    }
};

// ---------------------------------------------------------------------------

struct Point {
    SpaceKind kind = SpaceKind::Euclidean;
    Eigen::VectorXd v;         ///< Euclidean coordinates
    GraphPoint gp;             ///< tree position / cone direction
    int ray = 0;               ///< pod ray index
    double r = 0.0;            ///< pod or cone radius
    std::vector<Point> parts;  ///< product components

    static Point euclidean(Eigen::VectorXd x) {
        Point p;
        p.kind = SpaceKind::Euclidean;
        p.v = std::move(x);
        return p;
    }
    static Point tree_at(GraphPoint g) {
        Point p;
        p.kind = SpaceKind::MetricTree;
        p.gp = g;
        return p;
    }
    static Point pod_at(int ray, double r) {
        Point p;
        p.kind = SpaceKind::Pod;
        p.ray = r == 0.0 ? 0 : ray;
        p.r = r;
        return p;
    }
    static Point cone_at(GraphPoint g, double r) {
        Point p;
        p.kind = SpaceKind::GraphCone;
        p.gp = r == 0.0 ? GraphPoint::at(0) : g;
        p.r = r;
        return p;
    }
    static Point product_of(std::vector<Point> ps) {
        Point p;
        p.kind = SpaceKind::Product;
        p.parts = std::move(ps);
        return p;
    }
    bool is_apex() const { return r == 0.0; }
};

inline std::string point_str(const Point& p) {
    std::ostringstream os;
    os.precision(12);
    switch (p.kind) {
        case SpaceKind::Euclidean: {
            os << "(";
            for (int i = 0; i < p.v.size(); ++i) os << (i ? ", " : "") << p.v[i];
            os << ")";
            break;
        }
        case SpaceKind::MetricTree:
            if (p.gp.at_vertex())
                os << "vertex " << p.gp.vertex;
            else
                os << "edge " << p.gp.edge << " @ " << p.gp.offset;
            break;
        case SpaceKind::Pod: os << "(ray " << p.ray << ", " << p.r << ")"; break;
        case SpaceKind::GraphCone:
            if (p.is_apex())
                os << "apex";
            else if (p.gp.at_vertex())
                os << "(vertex " << p.gp.vertex << ", t=" << p.r << ")";
            else
                os << "(edge " << p.gp.edge << " @ " << p.gp.offset << ", t=" << p.r << ")";
            break;
        case SpaceKind::Product: {
            os << "[";
            for (std::size_t i = 0; i < p.parts.size(); ++i)
                os << (i ? "; " : "") << point_str(p.parts[i]);
            os << "]";
            break;
        }
    }
    return os.str();
}

/// Range/shape validation of a point against its space; canonicalizes
/// boundary representations (radius 0, offsets at edge ends).
inline Point validate_point(const Space& S, Point p) {
    if (p.kind != S.kind) throw validation_error("point kind does not match space");
    switch (S.kind) {
        case SpaceKind::Euclidean:
            if (p.v.size() != S.dim)
                throw validation_error("euclidean point has wrong dimension");
            break;
        case SpaceKind::MetricTree: p.gp = S.geom->canonical(p.gp); break;
        case SpaceKind::Pod:
            if (p.r < 0.0) throw validation_error("pod radius must be >= 0");
            if (p.r > S.ray_bound + 1e-12)
                throw validation_error("pod radius exceeds the ray bound");
            if (p.r == 0.0)
                p.ray = 0;
            else if (p.ray < 0 || p.ray >= S.rays)
                throw validation_error("pod ray index out of range");
            break;
        case SpaceKind::GraphCone:
            if (p.r < 0.0) throw validation_error("cone radius must be >= 0");
            if (p.r == 0.0)
                p.gp = GraphPoint::at(0);
            else
                p.gp = S.geom->canonical(p.gp);
            break;
        case SpaceKind::Product: {
            if (p.parts.size() != S.factors.size())
                throw validation_error("product point has wrong arity");
            for (std::size_t i = 0; i < p.parts.size(); ++i)
                p.parts[i] = validate_point(S.factors[i], p.parts[i]);
            break;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Distance

inline double distance(const Space& S, const Point& p, const Point& q);

namespace detail {

/// Cone angle between two directions, truncated at pi.
inline double cone_angle(const MetricGraphGeometry& g, const GraphPoint& a,
                         const GraphPoint& b) {
    return std::min(g.dist(a, b), M_PI);
}

inline double cone_dist2(double t, double tp, double theta) {
    double s = std::sin(0.5 * theta);
    return sq(t - tp) + 4.0 * t * tp * s * s;
}

}  // namespace detail

inline double distance(const Space& S, const Point& p, const Point& q) {
    switch (S.kind) {
        case SpaceKind::Euclidean: return (p.v - q.v).norm();
        case SpaceKind::MetricTree: return S.geom->dist(p.gp, q.gp);
        case SpaceKind::Pod:
            if (p.r == 0.0 || q.r == 0.0 || p.ray == q.ray) return std::abs(p.r - q.r);
            return p.r + q.r;
        case SpaceKind::GraphCone: {
            if (p.is_apex() || q.is_apex()) return std::abs(p.r - q.r);
            double th = detail::cone_angle(*S.geom, p.gp, q.gp);
            return std::sqrt(detail::cone_dist2(p.r, q.r, th));
        }
        case SpaceKind::Product: {
            double s = 0.0;
            for (std::size_t i = 0; i < S.factors.size(); ++i)
                s += sq(distance(S.factors[i], p.parts[i], q.parts[i]));
            return std::sqrt(s);
        }
    }
    return 0.0;
}

inline bool same_point(const Space& S, const Point& p, const Point& q,
                       double tol = kTol.point_eq) {
    return distance(S, p, q) <= tol;
}

// ---------------------------------------------------------------------------
// Geodesics

inline Point geodesic_point(const Space& S, const Point& p, const Point& q, double t);

namespace detail {

inline Point cone_geodesic(const Space& S, const Point& p, const Point& q, double t) {
    const MetricGraphGeometry& g = *S.geom;
    if (p.is_apex() || q.is_apex()) {
        // radial segment
        const Point& far = p.is_apex() ? q : p;
        double rr = (1.0 - t) * p.r + t * q.r;
        return Point::cone_at(far.gp, rr);
    }
    double dg = g.dist(p.gp, q.gp);
    if (dg >= M_PI) {
        // through the apex
        double d = p.r + q.r, s = t * d;
        if (s <= p.r) return Point::cone_at(p.gp, p.r - s);
        return Point::cone_at(q.gp, s - p.r);
    }
    if (dg == 0.0) return Point::cone_at(p.gp, (1.0 - t) * p.r + t * q.r);
    // unfold the sector of angle dg into the plane
    Eigen::Vector2d P(p.r, 0.0), Q(q.r * std::cos(dg), q.r * std::sin(dg));
    Eigen::Vector2d Z = (1.0 - t) * P + t * Q;
    double rr = Z.norm();
    if (rr <= 1e-300) return Point::cone_at(p.gp, 0.0);
    double phi = std::atan2(Z.y(), Z.x());
    phi = std::min(std::max(phi, 0.0), dg);
    GraphRoute route = g.route(p.gp, q.gp);
    return Point::cone_at(g.walk(route, phi), rr);
}

}  // namespace detail

inline Point geodesic_point(const Space& S, const Point& p, const Point& q, double t) {
    if (t < -1e-12 || t > 1.0 + 1e-12)
        throw validation_error("geodesic parameter outside [0,1]");
    t = std::min(std::max(t, 0.0), 1.0);
    if (t == 0.0) return p;
    if (t == 1.0) return q;
    switch (S.kind) {
        case SpaceKind::Euclidean: return Point::euclidean((1.0 - t) * p.v + t * q.v);
        case SpaceKind::MetricTree: {
            GraphRoute route = S.geom->route(p.gp, q.gp);
            return Point::tree_at(S.geom->walk(route, t * route.length));
        }
        case SpaceKind::Pod: {
            if (p.r == 0.0 || q.r == 0.0 || p.ray == q.ray) {
                double rr = (1.0 - t) * p.r + t * q.r;
                return Point::pod_at(p.r == 0.0 ? q.ray : p.ray, rr);
            }
            double d = p.r + q.r, s = t * d;
            if (s <= p.r) return Point::pod_at(p.ray, p.r - s);
            return Point::pod_at(q.ray, s - p.r);
        }
        case SpaceKind::GraphCone: return detail::cone_geodesic(S, p, q, t);
        case SpaceKind::Product: {
            std::vector<Point> parts;
            parts.reserve(S.factors.size());
            for (std::size_t i = 0; i < S.factors.size(); ++i)
                parts.push_back(geodesic_point(S.factors[i], p.parts[i], q.parts[i], t));
            return Point::product_of(std::move(parts));
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Angles, log maps and tangent cones

namespace detail {

/// Initial direction at a non-apex cone point p toward q != p:
/// the angle beta in [0, pi] from the outward radial direction, together
/// with the branch (first graph edge and sign) when the direction is not
/// purely radial.
struct ConeDirection {
    double beta = 0.0;
    int branch_edge = -1;  ///< -1 = purely radial (beta in {0, pi})
    int branch_sign = 0;
};

inline ConeDirection cone_direction(const MetricGraphGeometry& g, const Point& p,
                                    const Point& q) {
    ConeDirection d;
    if (q.is_apex()) {
        d.beta = M_PI;
        return d;
    }
    double theta = g.dist(p.gp, q.gp);
    if (theta == 0.0) {
        d.beta = q.r > p.r ? 0.0 : M_PI;
        return d;
    }
    if (theta >= M_PI) {
        d.beta = M_PI;  // geodesic leaves toward the apex
        return d;
    }
    Eigen::Vector2d P(p.r, 0.0), Q(q.r * std::cos(theta), q.r * std::sin(theta));
    Eigen::Vector2d D = Q - P;
    d.beta = std::atan2(D.y(), D.x());
    GraphDirection fd = g.first_direction(p.gp, q.gp);
    d.branch_edge = fd.edge;
    d.branch_sign = fd.sign;
    return d;
}

/// Angle between two directions at a non-apex cone point.
inline double cone_base_angle(const MetricGraphGeometry& g, const Point& p,
                              const ConeDirection& a, const ConeDirection& b) {
    if (p.gp.at_vertex()) {
        // spine point: directions live on arcs (one per incident edge)
        // joining the outward radial point to the inward one
        bool same = a.branch_edge < 0 || b.branch_edge < 0 || a.branch_edge == b.branch_edge;
        if (same) return std::abs(a.beta - b.beta);
        double via_out = a.beta + b.beta;
        double via_in = (M_PI - a.beta) + (M_PI - b.beta);
        return std::min(via_out, via_in);
    }
    // chamber interior: the space of directions is a circle of length 2*pi
    auto signed_angle = [](const ConeDirection& d) {
        if (d.branch_edge < 0) return d.beta;  // 0 or pi; sign irrelevant
        return d.branch_sign > 0 ? d.beta : -d.beta;
    };
    double diff = std::abs(signed_angle(a) - signed_angle(b));
    return std::min(diff, 2.0 * M_PI - diff);
}

}  // namespace detail

/// Alexandrov angle at p between the geodesics [p,q] and [p,q'].
inline double angle(const Space& S, const Point& p, const Point& q, const Point& qp);

/// <log_p q, log_p q'> = d(p,q) d(p,q') cos angle_p(q,q').
inline double log_inner(const Space& S, const Point& p, const Point& q, const Point& qp) {
    if (S.kind == SpaceKind::Euclidean) return (q.v - p.v).dot(qp.v - p.v);
    if (S.kind == SpaceKind::Product) {
        double s = 0.0;
        for (std::size_t i = 0; i < S.factors.size(); ++i)
            s += log_inner(S.factors[i], p.parts[i], q.parts[i], qp.parts[i]);
        return s;
    }
    double a = distance(S, p, q), b = distance(S, p, qp);
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b * std::cos(angle(S, p, q, qp));
}

inline double angle(const Space& S, const Point& p, const Point& q, const Point& qp) {
    double dq = distance(S, p, q), dqp = distance(S, p, qp);
    if (dq <= 0.0 || dqp <= 0.0)
        throw validation_error("angle needs both endpoints distinct from the vertex");
    switch (S.kind) {
        case SpaceKind::Euclidean: {
            double c = (q.v - p.v).dot(qp.v - p.v) / (dq * dqp);
            return std::acos(std::min(std::max(c, -1.0), 1.0));
        }
        case SpaceKind::MetricTree: {
            GraphDirection a = S.geom->first_direction(p.gp, q.gp);
            GraphDirection b = S.geom->first_direction(p.gp, qp.gp);
            return (a.edge == b.edge && a.sign == b.sign) ? 0.0 : M_PI;
        }
        case SpaceKind::Pod: {
            auto dir = [&](const Point& x) {
                // +ray outward, -1 inward/through the origin
                if (p.r == 0.0) return std::pair(x.ray, +1);
                if (x.r == 0.0 || x.ray != p.ray) return std::pair(p.ray, -1);
                return std::pair(p.ray, x.r > p.r ? +1 : -1);
            };
            return dir(q) == dir(qp) ? 0.0 : M_PI;
        }
        case SpaceKind::GraphCone: {
            if (p.is_apex()) return detail::cone_angle(*S.geom, q.gp, qp.gp);
            detail::ConeDirection a = detail::cone_direction(*S.geom, p, q);
            detail::ConeDirection b = detail::cone_direction(*S.geom, p, qp);
            return detail::cone_base_angle(*S.geom, p, a, b);
        }
        case SpaceKind::Product: {
            double c = log_inner(S, p, q, qp) / (dq * dqp);
            return std::acos(std::min(std::max(c, -1.0), 1.0));
        }
    }
    return 0.0;
}

/// A tangent vector at `base`, represented by the geodesic footpoint it
/// points toward; length 0 is the cone origin.
struct TangentVector {
    Point base;
    Point foot;
    double length = 0.0;
};

/// log_p q: the distance-non-increasing projection to the tangent cone.
inline TangentVector log_map(const Space& S, const Point& p, const Point& q) {
    TangentVector v;
    v.base = p;
    v.foot = q;
    v.length = distance(S, p, q);
    return v;
}

inline double inner(const Space& S, const TangentVector& a, const TangentVector& b) {
    if (a.length == 0.0 || b.length == 0.0) return 0.0;
    return log_inner(S, a.base, a.foot, b.foot);
}

/// Tangent-cone distance d(v,w)^2 = |v|^2 + |w|^2 - 2<v,w>; works at every
/// base point (no chart needed).
inline double tc_distance(const Space& S, const TangentVector& a, const TangentVector& b) {
    double d2 = sq(a.length) + sq(b.length) - 2.0 * inner(S, a, b);
    return std::sqrt(std::max(d2, 0.0));
}

// ---------------------------------------------------------------------------
// Tangent cone as an explicit space, with the log-map embedding

namespace detail {

inline std::vector<int> incident_edges(const MetricGraphGeometry& g, int v) {
    std::vector<int> out;
    for (int e = 0; e < g.num_edges(); ++e)
        if (g.edge(e)[0] == v || g.edge(e)[1] == v) out.push_back(e);
    return out;
}

}  // namespace detail

/// The tangent cone at p as a space of its own.  Supported base points:
/// any Euclidean point, any tree point, any pod point, the cone apex and
/// cone chamber-interior points, products of supported points.
inline Space tangent_cone(const Space& S, const Point& p) {
    switch (S.kind) {
        case SpaceKind::Euclidean: return Space::euclidean(S.dim);
        case SpaceKind::MetricTree: {
            if (p.gp.at_vertex()) {
                int deg = static_cast<int>(detail::incident_edges(*S.geom, p.gp.vertex).size());
                return Space::pod(std::max(deg, 2));
            }
            return Space::pod(2);
        }
        case SpaceKind::Pod:
            if (p.r == 0.0) return Space::pod(S.rays);
            return Space::pod(2);
        case SpaceKind::GraphCone: {
            if (p.is_apex()) {
                Space c;
                c.kind = SpaceKind::GraphCone;
                c.geom = S.geom;
                return c;
            }
            if (p.gp.at_vertex())
                throw unsupported_error(
                    "tangent cone at a cone spine point (graph vertex, radius > 0) "
                    "is not supported");
            return Space::euclidean(2);
        }
        case SpaceKind::Product: {
            std::vector<Space> fs;
            fs.reserve(S.factors.size());
            for (std::size_t i = 0; i < S.factors.size(); ++i)
                fs.push_back(tangent_cone(S.factors[i], p.parts[i]));
            return Space::product(std::move(fs));
        }
    }
    throw unsupported_error("tangent cone unsupported here");
}

/// Embeds log_p(q) as a point of tangent_cone(S, p).
inline Point log_embed(const Space& S, const Point& p, const Point& q) {
    switch (S.kind) {
        case SpaceKind::Euclidean: return Point::euclidean(q.v - p.v);
        case SpaceKind::MetricTree: {
            double d = distance(S, p, q);
            if (d == 0.0) return Point::pod_at(0, 0.0);
            GraphDirection fd = S.geom->first_direction(p.gp, q.gp);
            if (p.gp.at_vertex()) {
                std::vector<int> inc = detail::incident_edges(*S.geom, p.gp.vertex);
                int ray = -1;
                for (std::size_t i = 0; i < inc.size(); ++i)
                    if (inc[i] == fd.edge) ray = static_cast<int>(i);
                if (ray < 0) throw std::runtime_error("direction edge not incident");
                return Point::pod_at(ray, d);
            }
            return Point::pod_at(fd.sign > 0 ? 1 : 0, d);
        }
        case SpaceKind::Pod: {
            double d = distance(S, p, q);
            if (d == 0.0) return Point::pod_at(0, 0.0);
            if (p.r == 0.0) return Point::pod_at(q.ray, d);
            bool outward = q.r > p.r && q.ray == p.ray;
            return Point::pod_at(outward ? 1 : 0, d);
        }
        case SpaceKind::GraphCone: {
            if (p.is_apex()) return q;  // the cone is its own tangent cone at the apex
            if (p.gp.at_vertex())
                throw unsupported_error("log embedding at a cone spine point");
            double d = distance(S, p, q);
            if (d == 0.0) return Point::euclidean(Eigen::Vector2d::Zero());
            detail::ConeDirection cd = detail::cone_direction(*S.geom, p, q);
            double a = cd.branch_edge < 0 ? cd.beta
                                          : (cd.branch_sign > 0 ? cd.beta : -cd.beta);
            return Point::euclidean(Eigen::Vector2d(d * std::cos(a), d * std::sin(a)));
        }
        case SpaceKind::Product: {
            std::vector<Point> parts;
            parts.reserve(S.factors.size());
            for (std::size_t i = 0; i < S.factors.size(); ++i)
                parts.push_back(log_embed(S.factors[i], p.parts[i], q.parts[i]));
            return Point::product_of(std::move(parts));
        }
    }
    throw unsupported_error("log embedding unsupported here");
}

// ---------------------------------------------------------------------------
// Verification helpers

/// d(z,m)^2 - [ d(z,p)^2/2 + d(z,q)^2/2 - d(p,q)^2/4 ] for the midpoint m;
/// <= 0 (up to tolerance) in every CAT(0) space.
inline double cat0_midpoint_check(const Space& S, const Point& p, const Point& q,
                                  const Point& z) {
    Point m = geodesic_point(S, p, q, 0.5);
    return sq(distance(S, z, m)) -
           (0.5 * sq(distance(S, z, p)) + 0.5 * sq(distance(S, z, q)) -
            0.25 * sq(distance(S, p, q)));
}

/// Comparison angle at p of the triangle (p, q, q') in the Euclidean plane.
inline double comparison_angle(const Space& S, const Point& p, const Point& q,
                               const Point& qp) {
    double a = distance(S, p, q), b = distance(S, p, qp), c = distance(S, q, qp);
    if (a == 0.0 || b == 0.0)
        throw validation_error("comparison angle needs distinct points");
    double cosv = (a * a + b * b - c * c) / (2.0 * a * b);
    return std::acos(std::min(std::max(cosv, -1.0), 1.0));
}

/// Uniform-ish random point; `scale` controls typical coordinate size.
inline Point random_point(const Space& S, Rng& rng, double scale = 1.0) {
    switch (S.kind) {
        case SpaceKind::Euclidean: {
            Eigen::VectorXd x(S.dim);
            for (int i = 0; i < S.dim; ++i) x[i] = gauss(rng, scale);
            return Point::euclidean(std::move(x));
        }
        case SpaceKind::MetricTree: {
            int e = unif_int(rng, 0, S.geom->num_edges() - 1);
            return Point::tree_at(GraphPoint::on(e, unif(rng, 0.0, S.geom->length(e))));
        }
        case SpaceKind::Pod: {
            double cap = std::isfinite(S.ray_bound) ? S.ray_bound : 2.5 * scale;
            return Point::pod_at(unif_int(rng, 0, S.rays - 1), unif(rng, 0.0, cap));
        }
        case SpaceKind::GraphCone: {
            int e = unif_int(rng, 0, S.geom->num_edges() - 1);
            GraphPoint g = GraphPoint::on(e, unif(rng, 0.0, S.geom->length(e)));
            double t = std::abs(gauss(rng, scale));
            if (unif(rng) < 0.05) t = 0.0;  // occasionally the apex
            return Point::cone_at(g, t);
        }
        case SpaceKind::Product: {
            std::vector<Point> parts;
            parts.reserve(S.factors.size());
            for (const Space& F : S.factors) parts.push_back(random_point(F, rng, scale));
            return Point::product_of(std::move(parts));
        }
    }
    throw std::runtime_error("unreachable");
}

}  // namespace chm
