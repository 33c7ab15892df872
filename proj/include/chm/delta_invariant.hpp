/**
 * @file delta_invariant.hpp
 * @brief The delta-invariant of weighted point configurations in Hadamard
 *        spaces.
 *
 * For a configuration (points v_i, weights t_i, barycenter c) the invariant
 * is the least value of ||sum t_i x_i||^2 / sum t_i ||x_i||^2 over Euclidean
 * vector families with |x_i| = d(c, v_i) and |x_i - x_j| <= d(v_i, v_j).
 * Such families are captured exactly by their Gram matrices, so the
 * computation is a small semidefinite program:
 *
 *     minimize  t' G t
 *     subject to G >= 0 (PSD),  G_ii = r_i^2,
 *                G_ii + G_jj - 2 G_ij <= d_ij^2.
 *
 * The solver alternates projections onto the PSD cone (eigenvalue clipping)
 * and the linear constraint polyhedron; the objective enters as a penalty
 * shift ahead of the polyhedron projection and a running dual correction
 * makes the pair of projections converge to the constrained optimum.  A
 * weak-duality certificate (diagonal multipliers plus clipped off-diagonal
 * multipliers, repaired by an eigenvalue shift) provides a lower bound on
 * the optimal value, so results are bracketed from both sides.
 *
 * On top of the generic solver the header provides the structure results
 * that make the invariant computable in closed form for special targets:
 * planar closed-polygon realizations for pods, the max rule for products,
 * and the explicit Gram-form family on the cone over an incidence graph
 * PG(2, r) together with the optimal embedding and the r = 2 upper-bound
 * pipeline for the building tangent cone.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chm/barycenter.hpp"
#include "chm/buildings.hpp"
#include "chm/common.hpp"
#include "chm/metric_graph.hpp"
#include "chm/spaces.hpp"

namespace chm {

// ---------------------------------------------------------------------------
// configurations

/// Weighted point family in a Hadamard space, together with its barycenter,
/// the radii measured from the barycenter and the pairwise distance matrix.
struct Configuration {
    Space space;
    std::vector<Point> points;
    std::vector<double> weights;  ///< positive, normalized to sum 1
    Point center;                 ///< weighted barycenter of the points
    std::vector<double> radii;    ///< d(center, points[i])
    Eigen::MatrixXd dist;         ///< pairwise distances
    double stationarity = 0.0;    ///< first-variation residual at the center
};

inline Configuration make_configuration(const Space& S, std::vector<Point> pts,
                                        std::vector<double> w, std::uint64_t seed = 7) {
    if (pts.empty()) throw validation_error("configuration needs at least one point");
    if (w.size() != pts.size())
        throw validation_error("configuration weight count mismatch");
    double total = 0.0;
    for (double wi : w) {
        if (!(wi > 0.0)) throw validation_error("configuration weights must be positive");
        total += wi;
    }
    Configuration cfg;
    cfg.space = S;
    cfg.points = std::move(pts);
    for (Point& p : cfg.points) p = validate_point(S, p);
    cfg.weights = std::move(w);
    for (double& wi : cfg.weights) wi /= total;
    cfg.center = barycenter(S, cfg.points, cfg.weights);

    const int m = static_cast<int>(cfg.points.size());
    cfg.radii.resize(m);
    double rmax = 0.0;
    for (int i = 0; i < m; ++i) {
        cfg.radii[i] = distance(S, cfg.center, cfg.points[i]);
        rmax = std::max(rmax, cfg.radii[i]);
    }
    const double scale = std::max(1.0, rmax);

    Rng rng(seed);
    cfg.stationarity =
        barycenter_stationarity(S, cfg.points, cfg.weights, cfg.center, rng);
    if (cfg.stationarity > kTol.stationarity * scale)
        throw validation_error("configuration barycenter fails the stationarity check",
                               "residual " + std::to_string(cfg.stationarity));

    cfg.dist = Eigen::MatrixXd::Zero(m, m);
    const double slack = kTol.gram_feasibility * scale;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double d = distance(S, cfg.points[i], cfg.points[j]);
            cfg.dist(i, j) = cfg.dist(j, i) = d;
            if (d > cfg.radii[i] + cfg.radii[j] + slack ||
                std::abs(cfg.radii[i] - cfg.radii[j]) > d + slack)
                throw validation_error("configuration distances violate the triangle bounds",
                                       "pair " + std::to_string(i) + "," + std::to_string(j));
        }
    return cfg;
}

/// Log-image of a configuration in the tangent cone at its barycenter.
/// Radii are preserved and pairwise distances never increase, so the
/// invariant of the image dominates the invariant of the original.
inline Configuration pushforward_configuration(const Configuration& cfg) {
    Space tc = tangent_cone(cfg.space, cfg.center);
    std::vector<Point> logs;
    logs.reserve(cfg.points.size());
    for (const Point& p : cfg.points) logs.push_back(log_embed(cfg.space, cfg.center, p));
    return make_configuration(tc, std::move(logs), cfg.weights);
}

// ---------------------------------------------------------------------------
// the Gram relaxation

/// Data of the semidefinite program: weights, radii and distance bounds.
struct GramProblem {
    Eigen::VectorXd t;
    Eigen::VectorXd r;
    Eigen::MatrixXd d;
};

inline GramProblem gram_problem(const Configuration& cfg) {
    const int m = static_cast<int>(cfg.points.size());
    GramProblem P;
    P.t.resize(m);
    P.r.resize(m);
    for (int i = 0; i < m; ++i) {
        P.t[i] = cfg.weights[i];
        P.r[i] = cfg.radii[i];
    }
    P.d = cfg.dist;
    return P;
}

struct SolverOptions {
    int max_iterations = 20000;
    double penalty = 0.0;      ///< projection penalty weight; 0 picks a default
    double tolerance = 1e-11;  ///< residual threshold, relative to iterate norm
};

struct RealizationResult {
    Eigen::MatrixXd gram;     ///< feasible PSD Gram matrix
    Eigen::MatrixXd vectors;  ///< rows realize the Gram matrix
    double value = 0.0;       ///< t' G t
    double denom = 0.0;       ///< sum t_i r_i^2
    double ratio = 0.0;       ///< value / denom (0 when denom is 0)
    double dual_value = 0.0;  ///< certified lower bound on the optimal value
    double dual_ratio = 0.0;  ///< dual_value / denom, clamped at 0
    double min_eigenvalue = 0.0;
    double diag_residual = 0.0;
    double offdiag_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

inline RealizationResult solve_gram(const GramProblem& P, SolverOptions opt = {}) {
    const int m = static_cast<int>(P.r.size());
    if (m < 1) throw validation_error("gram problem needs at least one point");
    if (P.t.size() != m || P.d.rows() != m || P.d.cols() != m)
        throw validation_error("gram problem dimensions disagree");

    double rmax = 0.0;
    for (int i = 0; i < m; ++i) {
        if (!(P.r[i] >= 0.0)) throw validation_error("gram radii must be nonnegative");
        if (!(P.t[i] > 0.0)) throw validation_error("gram weights must be positive");
        rmax = std::max(rmax, P.r[i]);
    }
    const double scale = std::max(1.0, rmax);
    const double slack = kTol.gram_feasibility * scale;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double d = P.d(i, j);
            if (d > P.r[i] + P.r[j] + slack ||
                std::abs(P.r[i] - P.r[j]) > d + slack)
                throw validation_error("gram distance bounds are infeasible",
                                       "pair " + std::to_string(i) + "," + std::to_string(j));
        }

    RealizationResult res;
    res.denom = 0.0;
    for (int i = 0; i < m; ++i) res.denom += P.t[i] * P.r[i] * P.r[i];
    if (rmax == 0.0) {
        res.gram = Eigen::MatrixXd::Zero(m, m);
        res.vectors = Eigen::MatrixXd::Zero(m, m);
        res.converged = true;
        return res;
    }

    // Off-diagonal lower bounds from the law of cosines.  The Cauchy-Schwarz
    // cap r_i r_j only trims numerical overshoot of genuinely collinear pairs
    // and keeps the rank-one matrix r r' feasible.
    const double kNegInf = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd lo(m, m);
    Eigen::VectorXd rsq(m);
    for (int i = 0; i < m; ++i) rsq[i] = P.r[i] * P.r[i];
    for (int i = 0; i < m; ++i) {
        lo(i, i) = kNegInf;
        for (int j = i + 1; j < m; ++j) {
            double raw = 0.5 * (rsq[i] + rsq[j] - P.d(i, j) * P.d(i, j));
            lo(i, j) = lo(j, i) = std::min(raw, P.r[i] * P.r[j]);
        }
    }

    const Eigen::MatrixXd C = P.t * P.t.transpose();
    const Eigen::MatrixXd anchor = P.r * P.r.transpose();
    Eigen::MatrixXd X = anchor, Z = anchor;
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(m, m);
    double sigma = opt.penalty > 0.0 ? opt.penalty : std::max(1e-3, C.norm());

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        X = Z - U - C / sigma;
        X = 0.5 * (X + X.transpose());
        X = X.cwiseMax(lo);
        for (int i = 0; i < m; ++i) X(i, i) = rsq[i];
        Eigen::MatrixXd Zn = detail::project_psd(X + U);
        double pri = (X - Zn).norm();
        double dua = sigma * (Zn - Z).norm();
        Z = Zn;
        U += X - Z;
        double eps = opt.tolerance * std::max(1.0, Z.norm());
        if (pri <= eps && dua <= eps) {
            res.converged = true;
            ++it;
            break;
        }
        if ((it + 1) % 64 == 0) {
            if (pri > 10.0 * dua) {
                sigma *= 2.0;
                U *= 0.5;
            } else if (dua > 10.0 * pri) {
                sigma *= 0.5;
                U *= 2.0;
            }
        }
    }
    res.iterations = it;

    // Primal polish: rescale onto the exact diagonal, then pull toward the
    // rank-one anchor only if a lower bound is still measurably violated.
    Eigen::MatrixXd G = Z;
    Eigen::VectorXd sc(m);
    for (int i = 0; i < m; ++i)
        sc[i] = P.r[i] > 0.0 ? P.r[i] / std::sqrt(std::max(G(i, i), 1e-300)) : 0.0;
    G = sc.asDiagonal() * G * sc.asDiagonal();
    for (int i = 0; i < m; ++i) G(i, i) = rsq[i];
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) worst = std::max(worst, lo(i, j) - G(i, j));
    if (worst > 0.5 * kTol.gram_feasibility * scale * scale) {
        double theta = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                double gap = lo(i, j) - G(i, j);
                double den = anchor(i, j) - G(i, j);
                if (gap > 0.0 && den > 0.0) theta = std::max(theta, gap / den);
            }
        theta = std::min(1.0, theta);
        G = (1.0 - theta) * G + theta * anchor;
        for (int i = 0; i < m; ++i) G(i, i) = rsq[i];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    res.gram = G;
    res.min_eigenvalue = es.eigenvalues().minCoeff();
    res.diag_residual = 0.0;
    res.offdiag_residual = 0.0;
    for (int i = 0; i < m; ++i) {
        res.diag_residual = std::max(res.diag_residual, std::abs(G(i, i) - rsq[i]));
        for (int j = i + 1; j < m; ++j) {
            double raw = 0.5 * (rsq[i] + rsq[j] - P.d(i, j) * P.d(i, j));
            res.offdiag_residual = std::max(res.offdiag_residual, raw - G(i, j));
        }
    }
    res.offdiag_residual = std::max(0.0, res.offdiag_residual);

    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    res.vectors = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

    res.value = P.t.dot(G * P.t);
    res.ratio = res.denom > 0.0
                    ? std::min(1.0, std::max(0.0, res.value / res.denom))
                    : 0.0;

    // Dual certificate: multipliers read off the scaled correction term,
    // off-diagonal ones clipped to be nonnegative, then an eigenvalue shift
    // restores positive semidefiniteness of the slack matrix.  Weak duality
    // makes the resulting value a lower bound regardless of solver state.
    Eigen::MatrixXd Sd = -sigma * 0.5 * (U + U.transpose());
    Eigen::VectorXd y(m);
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) y[i] = C(i, i) - Sd(i, i);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            lambda(i, j) = std::max(0.0, 2.0 * (C(i, j) - Sd(i, j)));
            lambda(j, i) = lambda(i, j);
        }
    Eigen::MatrixXd Scert = C;
    for (int i = 0; i < m; ++i) {
        Scert(i, i) -= y[i];
        for (int j = 0; j < m; ++j)
            if (j != i) Scert(i, j) -= 0.5 * lambda(i, j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esd(0.5 * (Scert + Scert.transpose()));
    double shift = std::max(0.0, -esd.eigenvalues().minCoeff());
    res.dual_value = 0.0;
    for (int i = 0; i < m; ++i) res.dual_value += (y[i] - shift) * rsq[i];
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) res.dual_value += lambda(i, j) * lo(i, j);
    res.dual_ratio =
        res.denom > 0.0 ? std::max(0.0, res.dual_value / res.denom) : 0.0;
    return res;
}

inline RealizationResult delta_config(const Configuration& cfg, SolverOptions opt = {}) {
    return solve_gram(gram_problem(cfg), opt);
}

// ---------------------------------------------------------------------------
// pods: constructive planar realizations

/// Planar realization of a pod configuration whose barycenter is the origin:
/// unit directions per ray closing up as a polygon with side lengths equal to
/// the per-ray masses A_s = sum of t_i r_i.
struct PodRealization {
    std::vector<Eigen::Vector2d> directions;  ///< unit direction per ray
    std::vector<Eigen::Vector2d> vectors;     ///< r_i * direction of the point's ray
    std::vector<double> masses;               ///< A_s per ray
    double closure_error = 0.0;               ///< |sum_s A_s e_s|
};

namespace detail {

/// Central angle subtended by a chord of length c on a circle of radius R.
inline double chord_angle(double c, double R) {
    return 2.0 * std::asin(std::clamp(c / (2.0 * R), -1.0, 1.0));
}

}  // namespace detail

inline PodRealization pod_realization(const Configuration& cfg) {
    if (cfg.space.kind != SpaceKind::Pod)
        throw validation_error("pod_realization needs a configuration on a pod");
    const int n = cfg.space.rays;
    PodRealization out;
    out.masses.assign(n, 0.0);
    for (std::size_t i = 0; i < cfg.points.size(); ++i)
        out.masses[cfg.points[i].ray] += cfg.weights[i] * cfg.points[i].r;

    double total = 0.0, amax = 0.0;
    int heavy = 0;
    for (int s = 0; s < n; ++s) {
        total += out.masses[s];
        if (out.masses[s] > amax) {
            amax = out.masses[s];
            heavy = s;
        }
    }
    const double eps = 1e-12 * std::max(1.0, total);
    if (amax > total - amax + eps)
        throw validation_error("barycenter not at origin",
                               "ray mass " + std::to_string(amax) + " exceeds the rest");

    out.directions.assign(n, Eigen::Vector2d(1.0, 0.0));
    if (amax > 0.0 && amax >= total - amax - eps) {
        // Degenerate closed polygon: the heaviest side against all others.
        for (int s = 0; s < n; ++s)
            if (s != heavy && out.masses[s] > 0.0)
                out.directions[s] = Eigen::Vector2d(-1.0, 0.0);
    } else if (amax > 0.0) {
        std::vector<int> sides;
        for (int s = 0; s < n; ++s)
            if (out.masses[s] > 0.0) sides.push_back(s);

        // Inscribe the polygon in a circle.  When the angle sum at the
        // tightest radius already falls short of a full turn, the center
        // lies outside and the heaviest chord spans the other arcs instead.
        auto angle_sum = [&](double R) {
            double sum = 0.0;
            for (int s : sides)
                if (s != heavy) sum += detail::chord_angle(out.masses[s], R);
            return sum;
        };
        double R0 = amax / 2.0;
        bool inside = detail::chord_angle(amax, R0) + angle_sum(R0) >= 2.0 * M_PI;
        auto gap = [&](double R) {
            return inside ? detail::chord_angle(amax, R) + angle_sum(R) - 2.0 * M_PI
                          : detail::chord_angle(amax, R) - angle_sum(R);
        };
        double lo_R = R0, hi_R = R0;
        do {
            hi_R *= 2.0;
        } while (gap(hi_R) > 0.0 && hi_R < 1e12 * R0);
        for (int k = 0; k < 300 && hi_R - lo_R > 1e-16 * hi_R; ++k) {
            double mid = 0.5 * (lo_R + hi_R);
            (gap(mid) > 0.0 ? lo_R : hi_R) = mid;
        }
        const double R = 0.5 * (lo_R + hi_R);

        double phi = 0.0;
        for (std::size_t k = 0; k < sides.size(); ++k) {
            int s = sides[k];
            double th = s == heavy ? 2.0 * M_PI - angle_sum(R)
                                   : detail::chord_angle(out.masses[s], R);
            Eigen::Vector2d p0(R * std::cos(phi), R * std::sin(phi));
            Eigen::Vector2d p1(R * std::cos(phi + th), R * std::sin(phi + th));
            out.directions[s] = (p1 - p0).normalized();
            phi += th;
        }
    }

    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (int s = 0; s < n; ++s) sum += out.masses[s] * out.directions[s];
    out.closure_error = sum.norm();

    out.vectors.reserve(cfg.points.size());
    for (const Point& p : cfg.points)
        out.vectors.push_back(p.r * out.directions[p.ray]);
    return out;
}

// ---------------------------------------------------------------------------
// products

/// Upper bound for the invariant of a product from factor bounds: realizing
/// each factor configuration independently gives the worse of the two ratios.
inline double product_combine(double ub1, double ub2) {
    if (!(ub1 >= 0.0 && ub1 <= 1.0 && ub2 >= 0.0 && ub2 <= 1.0))
        throw validation_error("delta upper bounds must lie in [0, 1]");
    return std::max(ub1, ub2);
}

// ---------------------------------------------------------------------------
// the cone over PG(2, r): Gram family, spectrum, optimal embedding

namespace detail {

inline std::vector<std::vector<int>> graph_distances(const MetricGraph& g) {
    auto adj = g.adjacency();
    std::vector<std::vector<int>> dist(g.n, std::vector<int>(g.n, -1));
    for (int s = 0; s < g.n; ++s) {
        std::vector<int> queue{s};
        dist[s][s] = 0;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            int u = queue[h];
            for (int v : adj[u])
                if (dist[s][v] < 0) {
                    dist[s][v] = dist[s][u] + 1;
                    queue.push_back(v);
                }
        }
    }
    return dist;
}

}  // namespace detail

/// Gram matrix of the bilinear form on the cone vertex vectors with value
/// 1/2 across an edge, a at graph distance two and b at graph distance three.
inline Eigen::MatrixXd cone_gram_family(int r, double a, double b) {
    if (!(a >= -1.0 && a <= 1.0 && b >= -1.0 && b <= 1.0))
        throw validation_error("cone gram parameters must lie in [-1, 1]");
    MetricGraph g = pg2_incidence_graph(r);
    auto dist = detail::graph_distances(g);
    Eigen::MatrixXd G(g.n, g.n);
    for (int s = 0; s < g.n; ++s)
        for (int u = 0; u < g.n; ++u) {
            switch (dist[s][u]) {
                case 0: G(s, u) = 1.0; break;
                case 1: G(s, u) = 0.5; break;
                case 2: G(s, u) = a; break;
                case 3: G(s, u) = b; break;
                default:
                    throw validation_error("incidence graph diameter exceeds 3");
            }
        }
    return G;
}

struct EigenBranch {
    double value = 0.0;
    int multiplicity = 0;
};

/// Closed-form spectrum of the cone Gram family: two simple branches carried
/// by the all-ones and the bipartition-signed vectors, and two branches of
/// multiplicity r^2+r carried by the +-sqrt(r) adjacency eigenspaces.
inline std::array<EigenBranch, 4> cone_gram_eigen(int r, double a, double b) {
    if (!(a >= -1.0 && a <= 1.0 && b >= -1.0 && b <= 1.0))
        throw validation_error("cone gram parameters must lie in [-1, 1]");
    pg2_incidence_graph(r);
    const int N = r * r + r + 1;
    const double s = std::sqrt(static_cast<double>(r));
    return {{{N * (a + b) + (1.0 - a) + (0.5 - b) * (r + 1), 1},
             {N * (a - b) + (1.0 - a) - (0.5 - b) * (r + 1), 1},
             {(1.0 - a) + (0.5 - b) * s, N - 1},
             {(1.0 - a) - (0.5 - b) * s, N - 1}}};
}

/// Parameters, minimal barycenter norm and embedded vertex vectors of the
/// form that pushes the vertex barycenter closest to the origin while staying
/// positive semidefinite.  Rows of `vectors` are the embedded unit vertices;
/// the embedding is checked to preserve the form and, sampled chamber by
/// chamber, the cone distance.
struct ConeEmbedding {
    double a = 0.0;
    double b = 0.0;
    double min_value = 0.0;       ///< <sum e_s, sum e_s> at the optimum
    Eigen::MatrixXd vectors;      ///< 2(r^2+r+1) rows, r^2+r+1 columns
    double gram_defect = 0.0;     ///< max |<e'_s, e'_u> - G*(s, u)|
    double chamber_defect = 0.0;  ///< max sampled in-chamber distance error
};

inline ConeEmbedding cone_optimal_embedding(int r, int chamber_samples = 8,
                                            std::uint64_t seed = 11) {
    const double s = std::sqrt(static_cast<double>(r));
    const int N = r * r + r + 1;
    ConeEmbedding out;
    out.a = (r - 1.0 - s) / (2.0 * r);
    out.b = (r * r - r - (r + 1.0) * s) / (2.0 * r * r);
    out.min_value = 2.0 * N * (r * r + 1.0 - (r + 1.0) * s);

    MetricGraph g = pg2_incidence_graph(r);
    Eigen::MatrixXd G = cone_gram_family(r, out.a, out.b);
    if (std::abs(G.sum() - out.min_value) > kTol.spectra * std::max(1.0, std::abs(out.min_value)))
        throw validation_error("optimal cone form: barycenter norm mismatch");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.eigenvalues().minCoeff() < kTol.psd_floor)
        throw validation_error("optimal cone form is not positive semidefinite");
    // Ascending eigenvalues: the kernel of dimension N first, then the
    // positive branches spanning the N-dimensional embedding space.
    Eigen::VectorXd lam = es.eigenvalues().tail(N).cwiseMax(0.0);
    out.vectors = es.eigenvectors().rightCols(N) * lam.cwiseSqrt().asDiagonal();
    out.gram_defect = (out.vectors * out.vectors.transpose() - G).cwiseAbs().maxCoeff();

    Space cone = Space::graph_cone(
        std::make_shared<MetricGraphGeometry>(MetricGraphGeometry::uniform(g)));
    Rng rng(seed);
    const double sector = g.edge_length;
    auto embed = [&](int e, double radius, double angle) {
        int u = g.edges[e][0], v = g.edges[e][1];
        Eigen::VectorXd dir = (std::sin(sector - angle) * out.vectors.row(u) +
                               std::sin(angle) * out.vectors.row(v))
                                  .transpose() /
                              std::sin(sector);
        return Eigen::VectorXd(radius * dir);
    };
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        for (int k = 0; k < chamber_samples; ++k) {
            double a1 = unif(rng, 0.0, sector), a2 = unif(rng, 0.0, sector);
            double r1 = unif(rng, 0.0, 2.0), r2 = unif(rng, 0.0, 2.0);
            Point p = Point::cone_at(GraphPoint::on(e, a1), r1);
            Point q = Point::cone_at(GraphPoint::on(e, a2), r2);
            double dc = distance(cone, p, q);
            double de = (embed(e, r1, a1) - embed(e, r2, a2)).norm();
            out.chamber_defect = std::max(out.chamber_defect, std::abs(dc - de));
        }
    return out;
}

// ---------------------------------------------------------------------------
// the r = 2 upper-bound pipeline

/// Verified upper bound for the invariant of the building tangent cone at a
/// vertex, r = 2, together with the list of checked identities.
struct A2Certificate {
    double bound = 0.0;
    double max_error = 0.0;
    std::vector<std::pair<std::string, double>> checks;  ///< identity -> error
};

namespace detail {

/// Orthogonal projector onto the eigenspace of the given eigenvalue.
inline Eigen::MatrixXd eigen_projector(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                                       double value, int expected_mult) {
    const Eigen::VectorXd& lam = es.eigenvalues();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(lam.size(), lam.size());
    int mult = 0;
    for (int k = 0; k < lam.size(); ++k)
        if (std::abs(lam[k] - value) < 1e-6) {
            P += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
            ++mult;
        }
    if (mult != expected_mult)
        throw validation_error("eigenvalue multiplicity mismatch",
                               std::to_string(value));
    return P;
}

}  // namespace detail

inline A2Certificate a2_upper_bound_r2() {
    const double rt2 = std::sqrt(2.0);
    A2Certificate cert;
    auto push = [&](const std::string& name, double err) {
        cert.checks.emplace_back(name, err);
        cert.max_error = std::max(cert.max_error, err);
        if (!(err <= kTol.spectra))
            throw validation_error("upper bound pipeline check failed: " + name,
                                   "error " + std::to_string(err));
    };

    MetricGraph g = pg2_incidence_graph(2);
    auto dist = detail::graph_distances(g);

    // Distance classes (3, 6, 4) from every vertex.
    {
        double err = 0.0;
        for (int s = 0; s < g.n; ++s) {
            std::array<int, 4> count{0, 0, 0, 0};
            for (int u = 0; u < g.n; ++u) ++count[dist[s][u]];
            err = std::max({err, std::abs(count[1] - 3.0), std::abs(count[2] - 6.0),
                            std::abs(count[3] - 4.0)});
        }
        push("distance classes (3, 6, 4) from every vertex", err);
    }

    // Spectrum of the comparison form at (a, b) = (-1/2, -1).
    Eigen::MatrixXd Gbar = cone_gram_family(2, -0.5, -1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gbar);
    const double mu_w1 = -4.5;
    const double mu_w6 = 1.5 * (1.0 + rt2);
    const double mu_z1 = 0.5;
    const double mu_z6 = 1.5 * (1.0 - rt2);
    {
        std::vector<double> expect{mu_w1};
        expect.insert(expect.end(), 6, mu_z6);
        expect.push_back(mu_z1);
        expect.insert(expect.end(), 6, mu_w6);
        double err = 0.0;
        for (int k = 0; k < 14; ++k) err = std::max(err, std::abs(es.eigenvalues()[k] - expect[k]));
        push("comparison form spectrum {-9/2, 3(1-sqrt2)/2 x6, 1/2, 3(1+sqrt2)/2 x6}", err);
    }

    // Projection formulas.  The projection of a vertex vector onto the
    // simple -9/2 branch is the constant vector 1/14; onto the 3(1-sqrt2)/2
    // branch the coefficients depend only on the graph distance and are
    // (3/7, -sqrt2/7, -1/14, 3sqrt2/28).  The odd-distance classes enter with
    // the sign that makes the vector an actual eigenvector of this branch;
    // their magnitudes agree with the classical display.
    Eigen::MatrixXd Pw1 = detail::eigen_projector(es, mu_w1, 1);
    Eigen::MatrixXd Pz6 = detail::eigen_projector(es, mu_z6, 6);
    {
        double err = (Pw1 - Eigen::MatrixXd::Constant(14, 14, 1.0 / 14.0)).cwiseAbs().maxCoeff();
        push("projection onto the -9/2 branch is (1/14) sum e_u", err);
    }
    {
        const std::array<double, 4> coeff{3.0 / 7.0, -rt2 / 7.0, -1.0 / 14.0,
                                          3.0 * rt2 / 28.0};
        double err = 0.0;
        for (int s = 0; s < 14; ++s)
            for (int u = 0; u < 14; ++u)
                err = std::max(err, std::abs(Pz6(s, u) - coeff[dist[s][u]]));
        push("projection onto the 3(1-sqrt2)/2 branch has class coefficients "
             "(3/7, -sqrt2/7, -1/14, 3sqrt2/28)",
             err);
    }

    // Per-chamber quadratic forms for v = a e_s + b e_t across an edge (s,t):
    // the squared norm a^2+ab+b^2, the -9/2 component -(9/28)(a+b)^2 and the
    // 3(1-sqrt2)/2 component -((3sqrt2-3)/14)(3a^2 - 2sqrt2 ab + 3b^2).
    Eigen::MatrixXd Bw = Pw1 * Gbar * Pw1;
    Eigen::MatrixXd Bz = Pz6 * Gbar * Pz6;
    {
        Eigen::Matrix2d expect_v, expect_w, expect_z;
        expect_v << 1.0, 0.5, 0.5, 1.0;
        expect_w << 1.0, 1.0, 1.0, 1.0;
        expect_w *= -9.0 / 28.0;
        expect_z << 3.0, -rt2, -rt2, 3.0;
        expect_z *= -(3.0 * rt2 - 3.0) / 14.0;
        double err_v = 0.0, err_w = 0.0, err_z = 0.0;
        for (const auto& e : g.edges) {
            int si = e[0], ti = e[1];
            Eigen::Matrix2d mv, mw, mz;
            mv << Gbar(si, si), Gbar(si, ti), Gbar(ti, si), Gbar(ti, ti);
            mw << Bw(si, si), Bw(si, ti), Bw(ti, si), Bw(ti, ti);
            mz << Bz(si, si), Bz(si, ti), Bz(ti, si), Bz(ti, ti);
            err_v = std::max(err_v, (mv - expect_v).cwiseAbs().maxCoeff());
            err_w = std::max(err_w, (mw - expect_w).cwiseAbs().maxCoeff());
            err_z = std::max(err_z, (mz - expect_z).cwiseAbs().maxCoeff());
        }
        push("chamber form of the squared norm is a^2 + ab + b^2", err_v);
        push("chamber form of the -9/2 component is -(9/28)(a+b)^2", err_w);
        push("chamber form of the 3(1-sqrt2)/2 component is "
             "-((3sqrt2-3)/14)(3a^2 - 2sqrt2 ab + 3b^2)",
             err_z);
        push("unit vertex self inner product in the 3(1-sqrt2)/2 branch is 9(1-sqrt2)/14",
             std::abs(Bz(g.edges[0][0], g.edges[0][0]) - 9.0 * (1.0 - rt2) / 14.0));
    }

    // Maximize the combined chamber ratio over the closed positive quadrant.
    const double expected = (37.0 - 18.0 * rt2) / 28.0;
    {
        Eigen::Matrix2d ones2, zform, num, den;
        ones2 << 1.0, 1.0, 1.0, 1.0;
        zform << 3.0, -rt2, -rt2, 3.0;
        num = (2.0 * rt2 - 1.0) / 3.0 *
              ((2.0 * rt2 + 1.0) / 3.0 * (9.0 / 28.0) * ones2 +
               (3.0 * rt2 - 3.0) / 14.0 * zform);
        den << 1.0, 0.5, 0.5, 1.0;
        double best = std::max(num(0, 0) / den(0, 0), num(1, 1) / den(1, 1));
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> ges(num, den);
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector2d v = ges.eigenvectors().col(k);
            if (v[0] * v[1] > 0.0) best = std::max(best, ges.eigenvalues()[k]);
        }
        push("maximal chamber ratio equals (37 - 18 sqrt2)/28", std::abs(best - expected));

        double over = 0.0;
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                if (i == 0 && j == 0) continue;
                Eigen::Vector2d x(i / 20.0, j / 20.0);
                over = std::max(over, x.dot(num * x) / x.dot(den * x) - expected);
            }
        push("quadrant grid never exceeds the bound", std::max(0.0, over));
    }

    cert.bound = expected;
    return cert;
}

// ---------------------------------------------------------------------------
// spectral-gap consequences

/// Interval certified to contain the nonlinear spectral gap, given the
/// linear gap and an upper bound for the target invariant.
struct WangInterval {
    double lower = 0.0;
    double upper = 0.0;
};

inline WangInterval wang_bounds(double mu1, double delta_ub) {
    if (!(delta_ub >= 0.0 && delta_ub <= 1.0))
        throw validation_error("delta upper bound must lie in [0, 1]");
    return {(1.0 - delta_ub) * mu1, mu1};
}

struct FixedPointCriterion {
    bool satisfied = false;
    double threshold = std::numeric_limits<double>::infinity();
    std::string note;
};

/// True when every link gap exceeds 1/(2(1 - delta_ub)), the threshold that
/// forces the equivariant energy minimizer to be constant.
inline FixedPointCriterion fixed_point_criterion(double mu1_min, double delta_ub) {
    if (!(delta_ub >= 0.0 && delta_ub <= 1.0))
        throw validation_error("delta upper bound must lie in [0, 1]");
    FixedPointCriterion c;
    if (delta_ub >= 1.0) {
        c.note = "vacuous bound";
        return c;
    }
    c.threshold = 0.5 / (1.0 - delta_ub);
    c.satisfied = mu1_min > c.threshold;
    return c;
}

// ---------------------------------------------------------------------------
// empirical lower bounds

/// Equal-weight unit vectors at the cone base vertices; for the incidence
/// cones their barycenter is the apex.
inline Configuration cone_vertex_configuration(const Space& S) {
    if (S.kind != SpaceKind::GraphCone)
        throw validation_error("vertex configuration needs a graph cone");
    const int n = S.geom->n();
    std::vector<Point> pts;
    pts.reserve(n);
    for (int s = 0; s < n; ++s) pts.push_back(Point::cone_at(GraphPoint::at(s), 1.0));
    return make_configuration(S, std::move(pts), std::vector<double>(n, 1.0));
}

/// Random configuration with points drawn at the given scale.
inline Configuration random_configuration(const Space& S, Rng& rng, int m,
                                          double scale = 1.0) {
    std::vector<Point> pts;
    std::vector<double> w;
    pts.reserve(m);
    w.reserve(m);
    for (int i = 0; i < m; ++i) {
        pts.push_back(random_point(S, rng, scale));
        w.push_back(unif(rng, 0.25, 1.0));
    }
    return make_configuration(S, std::move(pts), std::move(w));
}

struct SamplerReport {
    double best_ratio = 0.0;
    int evaluated = 0;
    Configuration best;
};

/// Best invariant value over seeded and sampled configurations; every value
/// found is a valid lower bound for the supremum over all configurations.
template <class Fn>
inline SamplerReport delta_lower_sampler(const Space& S, Fn&& sample, std::uint64_t seed,
                                         int budget,
                                         const std::vector<Configuration>& seeds = {}) {
    std::vector<Configuration> cfgs = seeds;
    cfgs.reserve(seeds.size() + budget);
    for (int k = 0; k < budget; ++k) {
        Rng rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(k + 1));
        cfgs.push_back(sample(S, rng));
    }
    std::vector<double> ratio(cfgs.size(), 0.0);
    parallel_for(static_cast<int>(cfgs.size()),
                 [&](int i) { ratio[i] = delta_config(cfgs[i]).ratio; });
    SamplerReport rep;
    rep.evaluated = static_cast<int>(cfgs.size());
    std::size_t arg = 0;
    for (std::size_t i = 1; i < cfgs.size(); ++i)
        if (ratio[i] > ratio[arg]) arg = i;
    if (!cfgs.empty()) {
        rep.best_ratio = ratio[arg];
        rep.best = cfgs[arg];
    }
    return rep;
}

}  // namespace chm
