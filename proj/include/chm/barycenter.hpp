/**
 * @file barycenter.hpp
 * @brief Weighted barycenters (Frechet means) in the implemented spaces.
 *
 * Strategy per kind:
 *   - Euclidean / Product: exact (weighted mean, componentwise recursion).
 *   - MetricTree: exact per-edge minimization.  On a fixed edge the squared
 *     distance to each sample is piecewise quadratic in the offset with at
 *     most one breakpoint, so the objective restricted to the edge is
 *     piecewise quadratic and is minimized in closed form on each piece.
 *   - Pod: exact ray scan.  On a fixed ray the objective is one quadratic.
 *   - GraphCone: for a fixed direction xi the optimal radius is
 *     rho = max(h(xi), 0) / W with h(xi) = sum w_i t_i cos(theta_i(xi)),
 *     so minimizing reduces to maximizing h over the base graph; we scan
 *     every edge with dense samples plus golden-section refinement and
 *     compare with every vertex and the apex.
 *
 * Every output can be validated with the first-variation sweep
 * barycenter_stationarity: at a minimizer, sum_i w_i <u, log_q p_i> <= 0
 * for all unit directions u.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chm/spaces.hpp"

namespace chm {

inline double barycenter_objective(const Space& S, const std::vector<Point>& pts,
                                   const std::vector<double>& w, const Point& q) {
    double F = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) F += w[i] * sq(distance(S, pts[i], q));
    return F;
}

namespace detail {

inline void check_weights(const std::vector<Point>& pts, const std::vector<double>& w) {
    if (pts.empty()) throw validation_error("barycenter of an empty point set");
    if (pts.size() != w.size()) throw validation_error("points/weights size mismatch");
    double s = 0.0;
    for (double x : w) {
        if (x < 0.0) throw validation_error("barycenter weights must be >= 0");
        s += x;
    }
    if (!(s > 0.0)) throw validation_error("barycenter weights sum to zero");
}

inline Point tree_barycenter(const Space& S, const std::vector<Point>& pts,
                             const std::vector<double>& w) {
    const MetricGraphGeometry& g = *S.geom;
    double W = 0.0;
    for (double x : w) W += x;

    Point best = pts[0];
    double bestF = barycenter_objective(S, pts, w, best);
    auto consider = [&](const Point& q) {
        double F = barycenter_objective(S, pts, w, q);
        if (F < bestF - 1e-15) {
            bestF = F;
            best = q;
        }
    };
    for (int v = 0; v < g.n(); ++v) consider(Point::tree_at(GraphPoint::at(v)));

    for (int e = 0; e < g.num_edges(); ++e) {
        double L = g.length(e);
        int u = g.edge(e)[0], v = g.edge(e)[1];
        std::vector<double> brk{0.0, L};
        std::vector<double> Au(pts.size()), Bv(pts.size()), on_off(pts.size(), -1.0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const GraphPoint& p = pts[i].gp;
            if (!p.at_vertex() && p.edge == e) {
                on_off[i] = p.offset;
                brk.push_back(p.offset);
            } else {
                Au[i] = g.dist(p, GraphPoint::at(u));
                Bv[i] = g.dist(p, GraphPoint::at(v));
                double s = 0.5 * (Bv[i] + L - Au[i]);
                if (s > 0.0 && s < L) brk.push_back(s);
            }
        }
        std::sort(brk.begin(), brk.end());
        for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
            double a = brk[k], b = brk[k + 1];
            if (b - a < 1e-15) continue;
            double sm = 0.5 * (a + b);
            // d_i(s) = a_i + eps_i * s on this piece
            double lin = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                double eps, ai;
                if (on_off[i] >= 0.0) {
                    eps = sm >= on_off[i] ? 1.0 : -1.0;
                    ai = -eps * on_off[i];
                } else if (Au[i] + sm <= Bv[i] + (L - sm)) {
                    eps = 1.0;
                    ai = Au[i];
                } else {
                    eps = -1.0;
                    ai = Bv[i] + L;
                }
                lin += w[i] * eps * ai;
            }
            double sbar = std::clamp(-lin / W, a, b);
            consider(Point::tree_at(g.canonical(GraphPoint::on(e, sbar))));
        }
    }
    return best;
}

inline Point pod_barycenter(const Space& S, const std::vector<Point>& pts,
                            const std::vector<double>& w) {
    double W = 0.0;
    for (double x : w) W += x;
    int best_ray = 0;
    double best_s = 0.0;
    double bestF = std::numeric_limits<double>::infinity();
    for (int r = 0; r < S.rays; ++r) {
        double lin = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            lin += w[i] * (pts[i].ray == r && pts[i].r > 0.0 ? pts[i].r : -pts[i].r);
        double s = std::clamp(lin / W, 0.0,
                              std::isfinite(S.ray_bound) ? S.ray_bound
                                                         : std::numeric_limits<double>::max());
        double F = barycenter_objective(S, pts, w, Point::pod_at(r, s));
        if (F < bestF - 1e-15) {
            bestF = F;
            best_ray = r;
            best_s = s;
        }
    }
    return Point::pod_at(best_ray, best_s);
}

inline Point cone_barycenter(const Space& S, const std::vector<Point>& pts,
                             const std::vector<double>& w) {
    const MetricGraphGeometry& g = *S.geom;
    double W = 0.0;
    for (double x : w) W += x;

    auto h = [&](const GraphPoint& xi) {
        double s = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (pts[i].is_apex()) continue;
            s += w[i] * pts[i].r * std::cos(cone_angle(g, xi, pts[i].gp));
        }
        return s;
    };

    GraphPoint best_xi = GraphPoint::at(0);
    double best_h = h(best_xi);
    auto consider = [&](const GraphPoint& xi) {
        double val = h(xi);
        if (val > best_h + 1e-15) {
            best_h = val;
            best_xi = xi;
        }
    };
    for (int v = 1; v < g.n(); ++v) consider(GraphPoint::at(v));

    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int e = 0; e < g.num_edges(); ++e) {
        double L = g.length(e);
        const int K = 48;
        double sbest = 0.0, hbest = -std::numeric_limits<double>::infinity();
        for (int j = 0; j <= K; ++j) {
            double s = L * j / K;
            double val = h(g.canonical(GraphPoint::on(e, s)));
            if (val > hbest) {
                hbest = val;
                sbest = s;
            }
        }
        double lo = std::max(0.0, sbest - L / K), hi = std::min(L, sbest + L / K);
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        double f1 = h(g.canonical(GraphPoint::on(e, x1)));
        double f2 = h(g.canonical(GraphPoint::on(e, x2)));
        while (hi - lo > 1e-13 * std::max(L, 1.0)) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = h(g.canonical(GraphPoint::on(e, x2)));
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = h(g.canonical(GraphPoint::on(e, x1)));
            }
        }
        double s0 = 0.5 * (lo + hi);
        // parabolic polish: golden-section alone locates a smooth maximum
        // only to ~sqrt(machine eps)
        double dlt = 1e-5 * std::max(L, 1.0);
        if (s0 - dlt > 0.0 && s0 + dlt < L) {
            double hm = h(g.canonical(GraphPoint::on(e, s0 - dlt)));
            double h0 = h(g.canonical(GraphPoint::on(e, s0)));
            double hp = h(g.canonical(GraphPoint::on(e, s0 + dlt)));
            double denom = hp - 2.0 * h0 + hm;
            if (denom < 0.0) {
                double sp = s0 - 0.5 * dlt * (hp - hm) / denom;
                sp = std::clamp(sp, s0 - dlt, s0 + dlt);
                if (h(g.canonical(GraphPoint::on(e, sp))) >= h0) s0 = sp;
            }
        }
        consider(g.canonical(GraphPoint::on(e, s0)));
    }

    double scale = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) scale += w[i] * pts[i].r;
    if (best_h <= 1e-12 * scale) return Point::cone_at(GraphPoint::at(0), 0.0);  // apex
    return Point::cone_at(best_xi, best_h / W);
}

}  // namespace detail

/// Weighted barycenter; weights must be nonnegative with positive sum
/// (normalized internally).
inline Point barycenter(const Space& S, const std::vector<Point>& pts,
                        const std::vector<double>& w) {
    detail::check_weights(pts, w);
    switch (S.kind) {
        case SpaceKind::Euclidean: {
            Eigen::VectorXd m = Eigen::VectorXd::Zero(S.dim);
            double W = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                m += w[i] * pts[i].v;
                W += w[i];
            }
            return Point::euclidean(m / W);
        }
        case SpaceKind::MetricTree: return detail::tree_barycenter(S, pts, w);
        case SpaceKind::Pod: return detail::pod_barycenter(S, pts, w);
        case SpaceKind::GraphCone: return detail::cone_barycenter(S, pts, w);
        case SpaceKind::Product: {
            std::vector<Point> parts;
            parts.reserve(S.factors.size());
            for (std::size_t f = 0; f < S.factors.size(); ++f) {
                std::vector<Point> comp;
                comp.reserve(pts.size());
                for (const Point& p : pts) comp.push_back(p.parts[f]);
                parts.push_back(barycenter(S.factors[f], comp, w));
            }
            return Point::product_of(std::move(parts));
        }
    }
    throw std::runtime_error("unreachable");
}

/// Max over sampled unit directions u of sum_i w_i <u, log_q p_i>;
/// <= 0 (up to tolerance) iff q is the barycenter.  Directions are the
/// normalized logs toward the samples themselves and toward random points.
inline double barycenter_stationarity(const Space& S, const std::vector<Point>& pts,
                                      const std::vector<double>& w, const Point& q,
                                      Rng& rng, int random_dirs = 32) {
    std::vector<Point> dirs = pts;
    for (int i = 0; i < random_dirs; ++i) dirs.push_back(random_point(S, rng));
    double worst = -std::numeric_limits<double>::infinity();
    for (const Point& x : dirs) {
        double dx = distance(S, q, x);
        if (dx <= 1e-14) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double di = distance(S, q, pts[i]);
            if (di <= 1e-14) continue;
            s += w[i] * di * std::cos(angle(S, q, x, pts[i]));
        }
        worst = std::max(worst, s);
    }
    return worst;
}

}  // namespace chm
