#pragma once

/**
 * Discrete gradient flow: damped barycenter relaxation over vertex orbits.
 *
 * One step replaces the value at each orbit representative by a point on the
 * geodesic toward the barycenter of its neighbor values (projected back to
 * the stabilizer fixed-point set by orbit averaging).  The step size is
 * halved, restarting the whole sweep from the incoming map, until the global
 * energy does not increase; the flow therefore never ascends.  Gauss-Seidel
 * order is the default, Jacobi is available for experiments.
 */

#include <cmath>
#include <limits>
#include <vector>

#include "chm/harmonic.hpp"

namespace chm {

struct FlowConfig {
    double theta = 1.0;  ///< initial damping in (0, 1]
    bool jacobi = false;
};

struct FlowStep {
    EquivariantMap f;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double theta_used = 0.0;
    bool stalled = false;
};

namespace detail {

inline std::vector<Point> sweep_rep_values(const WeightedComplex& X, const GroupAction& G,
                                           const TargetAction& rho, const OrbitData& V,
                                           const EquivariantMap& f, double theta, bool jacobi) {
    const Space& Y = rho.space;
    std::vector<Point> rep_values = f.rep_values;
    EquivariantMap cur = f;
    for (std::size_t i = 0; i < V.reps.size(); ++i) {
        int x = X.simplices(0)[V.reps[i]][0];
        const LinkView& L = X.vertex_link(x);
        if (L.vertices.empty()) continue;
        const EquivariantMap& src = jacobi ? f : cur;
        std::vector<Point> pts;
        std::vector<double> w;
        double mx = X.weightd({x});
        pts.reserve(L.vertices.size());
        for (std::size_t j = 0; j < L.vertices.size(); ++j) {
            pts.push_back(src.at(L.vertices[j]));
            w.push_back(L.vertex_weight[j] / mx);
        }
        Point b = barycenter(Y, pts, w);
        std::vector<int> stab = G.vertex_stabilizer(x);
        if (stab.size() > 1) {
            std::vector<Point> orbit;
            orbit.reserve(stab.size());
            for (int g : stab) orbit.push_back(rho.apply(g, b));
            b = barycenter(Y, orbit, std::vector<double>(orbit.size(), 1.0));
        }
        rep_values[i] = geodesic_point(Y, src.at(x), b, theta);
        if (!jacobi) cur = equivariant_map(X, G, rho, rep_values);
    }
    return rep_values;
}

}  // namespace detail

/// One flow step with step-halving; the returned energy never exceeds the
/// incoming energy (on stall the map is returned unchanged).
inline FlowStep flow_step(const WeightedComplex& X, const GroupAction& G, const TargetAction& rho,
                          const EquivariantMap& f, const FlowConfig& cfg = {}) {
    OrbitData V = orbit_data(X, G, 0);
    FlowStep out;
    out.energy_before = energy(X, G, rho, f);
    double theta = cfg.theta;
    while (theta >= kTol.theta_min) {
        EquivariantMap next = equivariant_map(
            X, G, rho, detail::sweep_rep_values(X, G, rho, V, f, theta, cfg.jacobi));
        double e = energy(X, G, rho, next);
        if (e <= out.energy_before) {
            out.f = std::move(next);
            out.energy_after = e;
            out.theta_used = theta;
            return out;
        }
        theta *= 0.5;
    }
    out.f = f;
    out.energy_after = out.energy_before;
    out.stalled = true;
    return out;
}

struct RunConfig {
    int max_steps = 500;
    double theta = 1.0;
    bool jacobi = false;
    double energy_tol = kTol.flow_energy;
    double residual_tol = kTol.flow_residual;
};

struct FlowReport {
    std::vector<double> energies;   ///< E(f_k), one entry per visited map
    std::vector<double> residuals;  ///< max vertex residual of f_k
    std::vector<double> thetas;     ///< accepted step size per step taken
    EquivariantMap final_map;
    bool converged = false;
    bool stalled = false;
    bool residual_proxy = false;  ///< some residual used the proxy fallback
    int steps = 0;
    double decay_ratio = std::numeric_limits<double>::quiet_NaN();
    Point witness;               ///< final value at the first vertex
    double witness_move = 0.0;   ///< max displacement of the witness under rho(generators)
};

namespace detail {

inline double fitted_decay_ratio(const std::vector<double>& E, int tail = 10) {
    double logsum = 0.0;
    int count = 0;
    bool hit_zero = false;
    std::size_t lo = E.size() > static_cast<std::size_t>(tail) + 1 ? E.size() - tail - 1 : 0;
    for (std::size_t k = lo; k + 1 < E.size(); ++k) {
        if (E[k] <= 0.0) continue;
        if (E[k + 1] <= 0.0) {
            hit_zero = true;
            continue;
        }
        logsum += std::log(E[k + 1] / E[k]);
        ++count;
    }
    if (hit_zero) return 0.0;
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::exp(logsum / count);
}

}  // namespace detail

inline FlowReport run_flow(const WeightedComplex& X, const GroupAction& G, const TargetAction& rho,
                           const EquivariantMap& f0, const RunConfig& cfg = {}) {
    FlowReport rep;
    EquivariantMap f = f0;
    OrbitData V = orbit_data(X, G, 0);
    auto max_residual = [&](const EquivariantMap& m) {
        double worst = 0.0;
        for (std::size_t i = 0; i < V.reps.size(); ++i) {
            int x = X.simplices(0)[V.reps[i]][0];
            if (X.vertex_link(x).vertices.empty()) continue;
            Residual r = residual_norm(X, rho, m, x);
            rep.residual_proxy = rep.residual_proxy || r.proxy;
            worst = std::max(worst, r.value);
        }
        return worst;
    };
    for (int k = 0; k <= cfg.max_steps; ++k) {
        rep.energies.push_back(energy(X, G, rho, f));
        rep.residuals.push_back(max_residual(f));
        if (rep.energies.back() <= cfg.energy_tol || rep.residuals.back() <= cfg.residual_tol) {
            rep.converged = true;
            break;
        }
        if (k == cfg.max_steps) break;
        FlowStep st = flow_step(X, G, rho, f, FlowConfig{cfg.theta, cfg.jacobi});
        if (st.stalled) {
            rep.stalled = true;
            break;
        }
        f = std::move(st.f);
        rep.thetas.push_back(st.theta_used);
        ++rep.steps;
    }
    rep.decay_ratio = detail::fitted_decay_ratio(rep.energies);
    rep.witness = f.at(X.simplices(0)[0][0]);
    for (const Isometry& g : rho.gen_iso)
        rep.witness_move = std::max(
            rep.witness_move, distance(rho.space, apply_isometry(rho.space, g, rep.witness),
                                       rep.witness));
    rep.final_map = std::move(f);
    return rep;
}

}  // namespace chm
