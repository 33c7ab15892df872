#pragma once

/**
 * Equivariant maps, the energy functional, harmonicity residuals, and the
 * Bochner-type identities.
 *
 * A map is stored by its values on vertex-orbit representatives and extended
 * to the whole vertex set through the group action on the target.  The energy
 * is computed in two independent forms (the weighted sum over ordered edge
 * representatives, and the sum of vertex energy densities) and both are
 * required to agree; the discrete tension field -Delta f(x) is the barycenter
 * of the pushed-forward neighbor values in the tangent cone at f(x).
 */

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chm/barycenter.hpp"
#include "chm/common.hpp"
#include "chm/group_action.hpp"
#include "chm/isometry.hpp"
#include "chm/link_spectra.hpp"
#include "chm/simplicial_complex.hpp"
#include "chm/spaces.hpp"

namespace chm {

// ---------------------------------------------------------------------------
// Equivariant maps

struct EquivariantMap {
    std::vector<Point> values;      ///< per vertex id
    std::vector<int> rep_vertices;  ///< orbit representative vertex ids
    std::vector<Point> rep_values;  ///< parallel to rep_vertices

    const Point& at(int v) const { return values[v]; }
};

/**
 * Builds the map from values on vertex-orbit representatives.  Each value must
 * be fixed by the stabilizer of its representative (otherwise the extension
 * f(g x) = rho(g) f(x) would depend on the coset representative).
 */
inline EquivariantMap equivariant_map(const WeightedComplex& X, const GroupAction& G,
                                      const TargetAction& rho, std::vector<Point> rep_values) {
    if (!X.has_dense_ids())
        throw validation_error("equivariant maps require vertex ids 0..n-1");
    OrbitData O = orbit_data(X, G, 0);
    if (rep_values.size() != O.reps.size())
        throw validation_error("expected one value per vertex orbit: " +
                               std::to_string(O.reps.size()) + " orbits, " +
                               std::to_string(rep_values.size()) + " values");
    const Space& Y = rho.space;
    EquivariantMap f;
    f.rep_values.reserve(O.reps.size());
    for (std::size_t i = 0; i < O.reps.size(); ++i) {
        int v = X.simplices(0)[O.reps[i]][0];
        Point p = validate_point(Y, rep_values[i]);
        for (int g : G.vertex_stabilizer(v)) {
            double move = distance(Y, p, rho.apply(g, p));
            if (move > kTol.equivariance)
                throw validation_error("value at vertex " + std::to_string(v) +
                                           " is not fixed by its stabilizer",
                                       "moved by " + std::to_string(move));
        }
        f.rep_vertices.push_back(v);
        f.rep_values.push_back(std::move(p));
    }
    f.values.resize(X.simplices(0).size());
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        int v = X.simplices(0)[j][0];
        f.values[v] = rho.apply(O.transversal[j], f.rep_values[O.orbit_of[j]]);
    }
    return f;
}

/// Constant map (requires the value to be a global fixed point of the action).
inline EquivariantMap constant_map(const WeightedComplex& X, const GroupAction& G,
                                   const TargetAction& rho, const Point& p) {
    OrbitData O = orbit_data(X, G, 0);
    return equivariant_map(X, G, rho, std::vector<Point>(O.reps.size(), p));
}

/// max over group elements g and vertices v of d(f(g v), rho(g) f(v)).
inline double equivariance_defect(const WeightedComplex& X, const GroupAction& G,
                                  const TargetAction& rho, const EquivariantMap& f) {
    double worst = 0.0;
    for (int e = 0; e < G.size(); ++e)
        for (const Simplex& s : X.simplices(0)) {
            int v = s[0];
            double d = distance(rho.space, f.at(G.apply_vertex(e, v)), rho.apply(e, f.at(v)));
            worst = std::max(worst, d);
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Energy

struct EnergyBreakdown {
    double edge_form = 0.0;     ///< 1/2 sum over ordered edge reps of m/|G_u| d^2
    double density_form = 0.0;  ///< sum over vertex reps of the energy density
};

inline EnergyBreakdown energy_breakdown(const WeightedComplex& X, const GroupAction& G,
                                        const TargetAction& rho, const EquivariantMap& f) {
    const Space& Y = rho.space;
    EnergyBreakdown E;
    OrderedOrbitData Ord = ordered_orbit_data(X, G, 1);
    for (std::size_t i = 0; i < Ord.reps.size(); ++i) {
        const auto& u = Ord.tuples[Ord.reps[i]];
        double d = distance(Y, f.at(u[0]), f.at(u[1]));
        E.edge_form += 0.5 * X.weightd({std::min(u[0], u[1]), std::max(u[0], u[1])}) /
                       Ord.stab_order[i] * sq(d);
    }
    OrbitData V = orbit_data(X, G, 0);
    for (std::size_t i = 0; i < V.reps.size(); ++i) {
        int x = X.simplices(0)[V.reps[i]][0];
        const LinkView& L = X.vertex_link(x);
        double dens = 0.0;
        for (std::size_t j = 0; j < L.vertices.size(); ++j)
            dens += L.vertex_weight[j] * sq(distance(Y, f.at(x), f.at(L.vertices[j])));
        E.density_form += dens / (2.0 * V.stab_order[i]);
    }
    return E;
}

/// Total energy; both computation forms are required to agree.
inline double energy(const WeightedComplex& X, const GroupAction& G, const TargetAction& rho,
                     const EquivariantMap& f) {
    EnergyBreakdown E = energy_breakdown(X, G, rho, f);
    double scale = std::max({1.0, std::abs(E.edge_form), std::abs(E.density_form)});
    if (std::abs(E.edge_form - E.density_form) > 1e-12 * scale)
        throw validation_error("energy forms disagree",
                               std::to_string(E.edge_form) + " vs " +
                                   std::to_string(E.density_form));
    return E.edge_form;
}

// ---------------------------------------------------------------------------
// Pushforward and the tension field

/// Origin of a tangent-cone space (the zero vector).
inline Point tangent_origin(const Space& T) {
    switch (T.kind) {
        case SpaceKind::Euclidean: return Point::euclidean(Eigen::VectorXd::Zero(T.dim));
        case SpaceKind::Pod: return Point::pod_at(0, 0.0);
        case SpaceKind::GraphCone: return Point::cone_at(GraphPoint::at(0), 0.0);
        case SpaceKind::Product: {
            std::vector<Point> parts;
            for (const Space& f : T.factors) parts.push_back(tangent_origin(f));
            return Point::product_of(std::move(parts));
        }
        case SpaceKind::MetricTree: break;
    }
    throw validation_error("space has no distinguished origin");
}

/**
 * F_x(y) = pi_{f(x)}(f(y)) for all link vertices y, as points of the tangent
 * cone at f(x).  Throws unsupported_error where the tangent cone has no
 * realization (cone spine points).
 */
struct Pushforward {
    Space cone;                  ///< tangent cone at f(x)
    std::vector<int> vertices;   ///< link vertex ids
    std::vector<Point> vectors;  ///< F_x(y), parallel to vertices
    std::vector<double> weight;  ///< m(x,y)/m(x)
    double mx = 0.0;             ///< m(x)
};

inline Pushforward pushforward(const WeightedComplex& X, const TargetAction& rho,
                               const EquivariantMap& f, int x) {
    const Space& Y = rho.space;
    const LinkView& L = X.vertex_link(x);
    Pushforward P;
    P.cone = tangent_cone(Y, f.at(x));
    P.vertices = L.vertices;
    P.mx = X.weightd({x});
    P.vectors.reserve(L.vertices.size());
    P.weight.reserve(L.vertices.size());
    for (std::size_t j = 0; j < L.vertices.size(); ++j) {
        P.vectors.push_back(validate_point(P.cone, log_embed(Y, f.at(x), f.at(L.vertices[j]))));
        P.weight.push_back(L.vertex_weight[j] / P.mx);
    }
    return P;
}

/// -Delta f(x): barycenter of the pushforward with weights m(x,y)/m(x).
struct TensionVector {
    Space cone;
    Point value;
    double norm = 0.0;
    double lemma27_gap = 0.0;  ///< | |b|^2 - sum w <b, F_y> |
};

inline TensionVector minus_delta(const WeightedComplex& X, const TargetAction& rho,
                                 const EquivariantMap& f, int x) {
    Pushforward P = pushforward(X, rho, f, x);
    TensionVector t;
    t.cone = P.cone;
    t.value = barycenter(P.cone, P.vectors, P.weight);
    Point origin = tangent_origin(P.cone);
    t.norm = distance(P.cone, origin, t.value);
    TangentVector b = log_map(P.cone, origin, t.value);
    double ip = 0.0;
    for (std::size_t j = 0; j < P.vectors.size(); ++j)
        ip += P.weight[j] * inner(P.cone, b, log_map(P.cone, origin, P.vectors[j]));
    t.lemma27_gap = std::abs(sq(t.norm) - ip);
    return t;
}

/**
 * |-Delta f(x)|, or the proxy d(f(x), barycenter of neighbor values) where the
 * tangent cone is unsupported.  The Lemma 2.7 inner-product formula is cross
 * checked whenever the true residual is computed.
 */
struct Residual {
    double value = 0.0;
    bool proxy = false;
};

inline Residual residual_norm(const WeightedComplex& X, const TargetAction& rho,
                              const EquivariantMap& f, int x,
                              double lemma_tol = kTol.lemma27) {
    Residual r;
    try {
        TensionVector t = minus_delta(X, rho, f, x);
        if (t.lemma27_gap > lemma_tol * std::max(1.0, sq(t.norm)))
            throw validation_error("barycenter norm fails the inner-product cross-check",
                                   std::to_string(t.lemma27_gap));
        r.value = t.norm;
        return r;
    } catch (const unsupported_error&) {
        const Space& Y = rho.space;
        const LinkView& L = X.vertex_link(x);
        std::vector<Point> pts;
        std::vector<double> w;
        double mx = X.weightd({x});
        for (std::size_t j = 0; j < L.vertices.size(); ++j) {
            pts.push_back(f.at(L.vertices[j]));
            w.push_back(L.vertex_weight[j] / mx);
        }
        r.value = distance(Y, f.at(x), barycenter(Y, pts, w));
        r.proxy = true;
        return r;
    }
}

// ---------------------------------------------------------------------------
// Bochner-type identities

/**
 * Both sides of the two identities, plus the curvature ("third") terms.
 * Identity 1:   lhs1 = rhs1   with
 *   lhs1 = sum_x 1/|G_x| [ sum_{(y,y')} m(x,y,y') d_TC(F_x y, F_x y')^2 + third_x ]
 *   rhs1 = sum_x 1/|G_x|   sum_y m(x,y) |F_x y|^2
 * Identity 2:   lhs2 = rhs2   with
 *   lhs2 = sum_x m(x)/|G_x| |-Delta f(x)|^2
 *   rhs2 = sum_x 1/|G_x| [ sum_{(y,y')} m d_TC^2 - sum_y m(x,y) d_TC(-Delta f(x), F_x y)^2 + third_x ]
 * where third_x = sum_{(y,y')} m(x,y,y') { d_Y(f y, f y')^2 - d_TC(F_x y, F_x y')^2 },
 * every summand of which is nonnegative because the projection to the tangent
 * cone does not increase distances.
 */
struct BochnerReport {
    double lhs1 = 0.0, rhs1 = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0;
    double third_total = 0.0;
    double third_min = 0.0;  ///< smallest single curvature term (ordered pair)
    double rel_gap1 = 0.0, rel_gap2 = 0.0;
};

inline BochnerReport bochner_check(const WeightedComplex& X, const GroupAction& G,
                                   const TargetAction& rho, const EquivariantMap& f) {
    const Space& Y = rho.space;
    BochnerReport R;
    OrbitData V = orbit_data(X, G, 0);
    for (std::size_t i = 0; i < V.reps.size(); ++i) {
        int x = X.simplices(0)[V.reps[i]][0];
        double invg = 1.0 / V.stab_order[i];
        const LinkView& L = X.vertex_link(x);
        Pushforward P = pushforward(X, rho, f, x);
        Point origin = tangent_origin(P.cone);

        double quad = 0.0, third = 0.0;
        for (std::size_t e = 0; e < L.edges.size(); ++e) {
            auto [a, b] = L.edges[e];
            double m = L.edge_weight[e];
            double dtc2 = sq(distance(P.cone, P.vectors[a], P.vectors[b]));
            double dy2 = sq(distance(Y, f.at(L.vertices[a]), f.at(L.vertices[b])));
            quad += 2.0 * m * dtc2;
            third += 2.0 * m * (dy2 - dtc2);
            R.third_min = std::min(R.third_min, m * (dy2 - dtc2));
        }
        double norms = 0.0;
        for (std::size_t j = 0; j < P.vectors.size(); ++j)
            norms += L.vertex_weight[j] * sq(distance(P.cone, origin, P.vectors[j]));

        Point delta = barycenter(P.cone, P.vectors, P.weight);
        double spread = 0.0;
        for (std::size_t j = 0; j < P.vectors.size(); ++j)
            spread += L.vertex_weight[j] * sq(distance(P.cone, delta, P.vectors[j]));

        R.lhs1 += invg * (quad + third);
        R.rhs1 += invg * norms;
        R.lhs2 += P.mx * invg * sq(distance(P.cone, origin, delta));
        R.rhs2 += invg * (quad - spread + third);
        R.third_total += invg * third;
    }
    R.rel_gap1 = std::abs(R.lhs1 - R.rhs1) / std::max({1.0, std::abs(R.lhs1), std::abs(R.rhs1)});
    R.rel_gap2 = std::abs(R.lhs2 - R.rhs2) / std::max({1.0, std::abs(R.lhs2), std::abs(R.rhs2)});
    return R;
}

// ---------------------------------------------------------------------------
// Gradient lower bound

/// lhs = sum_x m(x)/|G_x| |2(-Delta f(x))|^2, rhs = 4 C E(f); lhs >= rhs when
/// C is a valid lower bound for lambda_1 over all links and target points.
struct GradientCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline GradientCheck gradient_estimate_check(const WeightedComplex& X, const GroupAction& G,
                                             const TargetAction& rho, const EquivariantMap& f,
                                             double C) {
    GradientCheck out;
    OrbitData V = orbit_data(X, G, 0);
    for (std::size_t i = 0; i < V.reps.size(); ++i) {
        int x = X.simplices(0)[V.reps[i]][0];
        TensionVector t = minus_delta(X, rho, f, x);
        out.lhs += X.weightd({x}) / V.stab_order[i] * sq(2.0 * t.norm);
    }
    out.rhs = 4.0 * C * energy(X, G, rho, f);
    return out;
}

// ---------------------------------------------------------------------------
// Rayleigh estimation of Wang's invariant

struct WangEstimate {
    double value = 0.0;  ///< best Rayleigh value found (upper bound for lambda_1)
    double mu1 = 0.0;    ///< spectral gap of the link
    double lower = 0.0;  ///< (1 - delta_upper) * mu1
    double upper = 0.0;  ///< mu1
};

namespace detail {

struct WangObjective {
    const Space& T;
    const LinkView& L;
    std::vector<double> w;  ///< m(x,y)/m(x)

    double operator()(const std::vector<Point>& phi) const {
        double num = 0.0;
        for (std::size_t e = 0; e < L.edges.size(); ++e)
            num += L.edge_weight[e] *
                   sq(distance(T, phi[L.edges[e][0]], phi[L.edges[e][1]]));
        Point c = barycenter(T, phi, w);
        double den = 0.0;
        for (std::size_t j = 0; j < phi.size(); ++j)
            den += L.vertex_weight[j] * sq(distance(T, c, phi[j]));
        if (den <= 1e-30) return std::numeric_limits<double>::infinity();
        return num / den;
    }
};

/// A point at signed coordinate s on a geodesic through the origin (bent
/// through the origin when no straight line exists).
struct ConeLine {
    Space T;
    Point plus, minus;  ///< unit points in the two directions

    Point at(double s) const {
        if (s == 0.0) return tangent_origin(T);
        return geodesic_point(T, tangent_origin(T), s > 0 ? plus : minus, std::abs(s));
    }
};

inline ConeLine cone_line(const Space& T) {
    ConeLine l;
    l.T = T;
    switch (T.kind) {
        case SpaceKind::Euclidean: {
            Eigen::VectorXd e1 = Eigen::VectorXd::Zero(T.dim);
            e1[0] = 1.0;
            l.plus = Point::euclidean(e1);
            l.minus = Point::euclidean(-e1);
            return l;
        }
        case SpaceKind::Pod:
            l.plus = Point::pod_at(0, std::min(1.0, T.ray_bound));
            l.minus = Point::pod_at(1, std::min(1.0, T.ray_bound));
            return l;
        case SpaceKind::GraphCone: {
            const MetricGraphGeometry& g = *T.geom;
            int best_a = 0, best_b = std::min(1, g.n() - 1);
            double best = -1.0;
            for (int a = 0; a < g.n(); ++a)
                for (int b = a + 1; b < g.n(); ++b)
                    if (g.vdist(a, b) > best) {
                        best = g.vdist(a, b);
                        best_a = a;
                        best_b = b;
                    }
            l.plus = Point::cone_at(GraphPoint::at(best_a), 1.0);
            l.minus = Point::cone_at(GraphPoint::at(best_b), 1.0);
            return l;
        }
        case SpaceKind::Product: {
            ConeLine f0 = cone_line(T.factors[0]);
            std::vector<Point> plus, minus;
            plus.push_back(f0.plus);
            minus.push_back(f0.minus);
            for (std::size_t i = 1; i < T.factors.size(); ++i) {
                plus.push_back(tangent_origin(T.factors[i]));
                minus.push_back(tangent_origin(T.factors[i]));
            }
            l.plus = Point::product_of(std::move(plus));
            l.minus = Point::product_of(std::move(minus));
            return l;
        }
        case SpaceKind::MetricTree: break;
    }
    throw validation_error("no line seed available");
}

}  // namespace detail

/**
 * Upper estimate of Wang's lambda_1(Lk x, TC_p Y) by minimizing the Rayleigh
 * quotient over maps phi: link vertices -> tangent cone at p.  Restart 0 is
 * seeded with the mu_1 eigenvector embedded on a geodesic through the origin;
 * the remaining restarts are random.  `delta_upper` is an upper bound for the
 * distortion invariant of the tangent cone and certifies the interval
 * [(1 - delta_upper) mu_1, mu_1].
 */
inline WangEstimate wang_lambda1_estimate(const LinkView& L, const Space& S, const Point& p,
                                          int restarts = 8, std::uint64_t seed = 1,
                                          double delta_upper = 1.0) {
    if (L.vertices.size() < 2) throw validation_error("link too small");
    Space T = tangent_cone(S, p);
    double mx = 0.0;
    for (double m : L.vertex_weight) mx += m;
    std::vector<double> w;
    for (double m : L.vertex_weight) w.push_back(m / mx);
    detail::WangObjective R{T, L, w};

    int n = static_cast<int>(L.vertices.size());
    Eigen::MatrixXd Sym = link_laplacian(L);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sym);
    Eigen::VectorXd u = es.eigenvectors().col(1);
    for (int j = 0; j < n; ++j) u[j] /= std::sqrt(L.vertex_weight[j]);
    u /= u.cwiseAbs().maxCoeff();
    detail::ConeLine line = detail::cone_line(T);

    auto local_num = [&](const std::vector<Point>& phi, int y, const Point& c) {
        double s = 0.0;
        for (auto [z, m] : L.adj[y]) s += m * sq(distance(T, c, phi[z]));
        return s;
    };
    auto descend = [&](std::vector<Point> phi, Rng& rng) {
        double cur = R(phi);
        for (int sweep = 0; sweep < 60; ++sweep) {
            bool improved = false;
            for (int y = 0; y < n; ++y) {
                std::vector<Point> nbr;
                std::vector<double> nw;
                for (auto [z, m] : L.adj[y]) {
                    nbr.push_back(phi[z]);
                    nw.push_back(m);
                }
                std::vector<Point> cands;
                if (!nbr.empty()) {
                    Point b = barycenter(T, nbr, nw);
                    for (double t : {1.0, 0.5, 0.25})
                        cands.push_back(geodesic_point(T, phi[y], b, t));
                }
                for (int k = 0; k < 2; ++k)
                    cands.push_back(geodesic_point(T, phi[y], random_point(T, rng), 0.2));
                // cheap prefilter on the numerator terms at y, then one full
                // Rayleigh evaluation of the most promising candidate
                double best_num = local_num(phi, y, phi[y]);
                int best = -1;
                for (std::size_t c = 0; c < cands.size(); ++c) {
                    double s = local_num(phi, y, cands[c]);
                    if (s < best_num - 1e-14) {
                        best_num = s;
                        best = static_cast<int>(c);
                    }
                }
                if (best < 0) continue;
                Point old = phi[y];
                phi[y] = cands[best];
                double val = R(phi);
                if (val < cur - 1e-14) {
                    cur = val;
                    improved = true;
                } else {
                    phi[y] = old;
                }
            }
            if (!improved) break;
        }
        return cur;
    };

    std::vector<double> results(std::max(restarts, 1));
    parallel_for(static_cast<int>(results.size()), [&](int r) {
        Rng rng(seed + 0x9e3779b97f4a7c15ull * (r + 1));
        std::vector<Point> phi;
        phi.reserve(n);
        if (r == 0) {
            for (int j = 0; j < n; ++j) phi.push_back(line.at(u[j]));
        } else {
            for (int j = 0; j < n; ++j) phi.push_back(random_point(T, rng));
        }
        results[r] = descend(std::move(phi), rng);
    });

    WangEstimate out;
    out.value = *std::min_element(results.begin(), results.end());
    out.mu1 = mu1(L);
    out.upper = out.mu1;
    out.lower = std::max(0.0, 1.0 - delta_upper) * out.mu1;
    return out;
}

}  // namespace chm
