/**
 * Command line front end.
 *
 * Every run prints a single JSON object to stdout: {"manifest": ..., "result":
 * ...}.  The manifest records the command, input digests, seed, tolerances
 * and tool version, so identical manifests reproduce bit-identical output.
 * Wall-clock time is only added under --timing to keep default output stable.
 *
 * Exit codes: 0 success, 1 failed condition under --strict (and any
 * verify-paper failure), 2 malformed JSON input, 3 semantic validation
 * failure.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chm/json_io.hpp"

namespace {

using namespace chm;

constexpr const char* kVersion = "0.3.0";

struct CmdOut {
    int rc = 0;
    Json result;
};

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw validation_error("cannot write file", path);
    os << j.dump(2) << "\n";
}

Condition parse_condition(const std::string& s) {
    auto cut = s.find(':');
    std::string head = s.substr(0, cut);
    std::string tail = cut == std::string::npos ? std::string() : s.substr(cut + 1);
    auto need_int = [&]() {
        try {
            return std::stoi(tail);
        } catch (const std::exception&) {
            throw validation_error("condition needs an integer degree", s);
        }
    };
    auto need_num = [&]() {
        try {
            return std::stod(tail);
        } catch (const std::exception&) {
            throw validation_error("condition needs a numeric bound", s);
        }
    };
    if (s == "wang-half") return {ConditionKind::WangHalf, 0, 0.0, true};
    if (head == "garland") return {ConditionKind::Garland, need_int(), 0.0, true};
    if (head == "zuk") return {ConditionKind::Zuk, need_int(), 0.0, true};
    if (head == "pairwise") return {ConditionKind::Pairwise, 0, need_num(), true};
    if (head == "threshold") return {ConditionKind::Threshold, 0, need_num(), true};
    throw validation_error(
        "unknown condition (expected wang-half|garland:k|zuk:k|pairwise:C|threshold:c)", s);
}

/// Random equivariant starting map: one random target point per vertex orbit,
/// averaged over the stabilizer so the extension is well defined.
EquivariantMap random_start_map(const WeightedComplex& X, const GroupAction& G,
                                const TargetAction& rho, Rng& rng) {
    OrbitData V = orbit_data(X, G, 0);
    std::vector<Point> vals;
    vals.reserve(V.reps.size());
    for (std::size_t i = 0; i < V.reps.size(); ++i) {
        int v = X.simplices(0)[V.reps[i]][0];
        Point p = random_point(rho.space, rng);
        std::vector<int> stab = G.vertex_stabilizer(v);
        if (stab.size() > 1) {
            std::vector<Point> orbit;
            orbit.reserve(stab.size());
            for (int e : stab) orbit.push_back(rho.apply(e, p));
            p = barycenter(rho.space, orbit, std::vector<double>(orbit.size(), 1.0));
        }
        vals.push_back(std::move(p));
    }
    return equivariant_map(X, G, rho, std::move(vals));
}

// ---------------------------------------------------------------------------
// analyze

CmdOut cmd_analyze(RunManifest& manifest, const std::string& complex_path,
                   const std::string& condition, bool strict) {
    manifest.add_input(complex_path);
    ComplexBundle bundle = load_complex(complex_path);
    SpectralReport rep = check_condition(bundle.complex, bundle.action,
                                         parse_condition(condition));
    Json result = spectral_report_to_json(rep);
    result["vertices"] = static_cast<int>(bundle.complex.simplices(0).size());
    result["dim"] = bundle.complex.dim();
    result["group_order"] = bundle.action.size();
    return {strict && !rep.pass ? 1 : 0, std::move(result)};
}

// ---------------------------------------------------------------------------
// flow

CmdOut cmd_flow(RunManifest& manifest, const std::string& complex_path,
                const std::string& target_path, const std::string& rho_path,
                std::uint64_t seed, int steps, double theta, bool jacobi) {
    manifest.add_input(complex_path);
    manifest.add_input(target_path);
    ComplexBundle bundle = load_complex(complex_path);
    Space Y = load_target(target_path);
    Rng rng(seed);
    TargetAction rho = TargetAction::trivial(Y, bundle.action);
    if (!rho_path.empty()) {
        manifest.add_input(rho_path);
        rho = action_from_json(Y, bundle.action, parse_json_file(rho_path), rng, rho_path);
    }

    EquivariantMap f0 = random_start_map(bundle.complex, bundle.action, rho, rng);
    RunConfig rc;
    rc.max_steps = steps;
    rc.theta = theta;
    rc.jacobi = jacobi;
    FlowReport rep = run_flow(bundle.complex, bundle.action, rho, f0, rc);

    Json result = flow_report_to_json(rep, Y);
    result["target"] = Y.name();
    result["equivariance_defect"] =
        equivariance_defect(bundle.complex, bundle.action, rho, rep.final_map);
    return {0, std::move(result)};
}

// ---------------------------------------------------------------------------
// delta

CmdOut cmd_delta(RunManifest& manifest, const std::string& target_path,
                 const std::string& config_path, int sample, std::uint64_t seed,
                 int sample_points) {
    manifest.add_input(target_path);
    Space S = load_target(target_path);
    Json result;
    if (!config_path.empty()) {
        manifest.add_input(config_path);
        Configuration cfg = load_config(S, config_path);
        RealizationResult res = delta_config(cfg);
        result["configuration"] = config_to_json(cfg);
        result["realization"] = realization_to_json(res);
    } else {
        if (sample <= 0)
            throw validation_error("delta needs --config <points.json> or --sample N");
        SamplerReport rep = delta_lower_sampler(
            S,
            [&](const Space& sp, Rng& r) {
                return random_configuration(sp, r, sample_points);
            },
            seed, sample);
        result["best_ratio"] = rep.best_ratio;
        result["evaluated"] = rep.evaluated;
        result["best_configuration"] = config_to_json(rep.best);
        result["best_realization"] = realization_to_json(delta_config(rep.best), false);
    }
    return {0, std::move(result)};
}

// ---------------------------------------------------------------------------
// building

CmdOut cmd_building(RunManifest& manifest, int p, const std::string& emit_path) {
    (void)manifest;
    MetricGraph g = pg2_incidence_graph(p);
    SpectrumCheck sc = adjacency_spectrum_check(g, p);

    Json result;
    result["p"] = p;
    result["vertices"] = g.n;
    result["edges"] = static_cast<int>(g.edges.size());
    result["degree"] = p + 1;
    result["girth"] = girth(g);
    result["edge_length"] = g.edge_length;
    Json spec;
    spec["ok"] = sc.ok;
    spec["max_deviation"] = sc.max_deviation;
    spec["structural_ok"] = sc.structural_ok;
    spec["structural_residual"] = sc.structural_residual;
    spec["dense_checked"] = sc.dense_checked;
    result["adjacency_spectrum"] = std::move(spec);

    if (!emit_path.empty()) {
        std::size_t cut = emit_path.find_last_of('/');
        std::string base =
            cut == std::string::npos ? emit_path : emit_path.substr(cut + 1);
        Json artifact;
        std::string kind;
        if (base == "graph.json") {
            kind = "graph";
            artifact = graph_to_json(g);
        } else if (base == "cone-target.json") {
            kind = "cone-target";
            artifact["kind"] = "graph_cone";
            artifact["graph"] = graph_to_json(g);
        } else if (base == "cone-complex.json") {
            kind = "cone-complex";
            artifact = complex_to_json(cone_over_graph(g));
        } else {
            throw validation_error(
                "--emit filename must be graph.json, cone-target.json or cone-complex.json",
                emit_path);
        }
        write_json_file(emit_path, artifact);
        Json emitted;
        emitted["path"] = emit_path;
        emitted["kind"] = kind;
        emitted["digest"] = content_digest(artifact.dump(2) + "\n");
        result["emitted"] = std::move(emitted);
    }
    return {0, std::move(result)};
}

// ---------------------------------------------------------------------------
// cochain-check

CmdOut cmd_cochain_check(RunManifest& manifest, const std::string& complex_path, int k,
                         const std::string& rep_path, std::uint64_t seed, int samples,
                         bool strict) {
    manifest.add_input(complex_path);
    ComplexBundle bundle = load_complex(complex_path);
    const WeightedComplex& X = bundle.complex;
    const GroupAction& G = bundle.action;
    Representation rho = Representation::trivial(G, 1);
    if (!rep_path.empty()) {
        manifest.add_input(rep_path);
        rho = rep_from_json(G, parse_json_file(rep_path), rep_path);
    }
    if (k < 0 || k > X.dim())
        throw validation_error("cochain degree out of range", std::to_string(k));

    CochainBasis B = cochain_basis(X, G, rho, k);
    CochainBasis Bup = k + 1 <= X.dim() ? cochain_basis(X, G, rho, k + 1)
                                        : CochainBasis{k + 1, rho.dim, {}};
    Rng rng(seed);

    double dd = 0.0, adjoint = 0.0, equiv = 0.0, antisym = 0.0, sampled = 0.0;
    for (int t = 0; t < samples; ++t) {
        EquivariantCochain a = B.dim() > 0 ? random_cochain(X, B, rng)
                                           : zero_cochain(X, k, rho.dim);
        EquivariantCochain da = coboundary(X, a);
        dd = std::max(dd, norm(X, G, coboundary(X, da)));
        equiv = std::max(equiv, cochain_equivariance_defect(X, G, rho, a));
        antisym = std::max(antisym, cochain_antisymmetry_defect(X, a));
        if (Bup.dim() > 0) {
            EquivariantCochain b = random_cochain(X, Bup, rng);
            double lhs = inner_product(X, G, da, b);
            double rhs = inner_product(X, G, a, coboundary_adjoint(X, b));
            adjoint = std::max(adjoint, std::abs(lhs - rhs) /
                                            std::max({1.0, std::abs(lhs), std::abs(rhs)}));
            double full = inner_product(X, G, a, a);
            double samp = inner_product_sampled(X, G, a, a, rng);
            sampled = std::max(sampled,
                               std::abs(full - samp) / std::max(1.0, std::abs(full)));
        }
    }

    Json identities;
    identities["dd_norm"] = dd;
    identities["adjoint_rel"] = adjoint;
    identities["equivariance_defect"] = equiv;
    identities["antisymmetry_defect"] = antisym;
    identities["sampled_inner_product_rel"] = sampled;

    Json bochner;
    double bochner_rel = 0.0;
    try {
        for (int t = 0; t < std::max(1, samples / 2); ++t) {
            EquivariantCochain a = B.dim() > 0 ? random_cochain(X, B, rng)
                                               : zero_cochain(X, k, rho.dim);
            BochnerSides s = bochner_identity_check(X, G, a);
            bochner_rel = std::max(bochner_rel,
                                   std::abs(s.lhs - s.rhs) /
                                       std::max({1.0, std::abs(s.lhs), std::abs(s.rhs)}));
            if (t == 0) {
                bochner["lhs"] = s.lhs;
                bochner["rhs"] = s.rhs;
            }
        }
        bochner["max_rel_residual"] = bochner_rel;
    } catch (const validation_error& e) {
        bochner = Json::object();
        bochner["skipped"] = e.what();
    }

    VanishingReport v = vanishing_certificate(X, G, rho, k);
    LaplacianOperator L = laplacian_matrix(X, G, rho, k);
    Json lap;
    lap["dim"] = B.dim();
    lap["eigenvalues"] = L.eigenvalues.size() ? vector_to_json(L.eigenvalues) : Json::array();
    lap["kernel_dim"] = L.kernel_dim();
    if (L.eigenvalues.size()) lap["min_eigenvalue"] = L.min_eigenvalue();
    Json gap;  // smallest eigenvalue above the kernel tolerance, null when none
    for (long i = 0; i < L.eigenvalues.size(); ++i)
        if (L.eigenvalues[i] > 1e-8) {
            gap = L.eigenvalues[i];
            break;
        }
    lap["gap"] = gap;

    Json vanishing;
    vanishing["garland"] = spectral_report_to_json(v.garland);
    vanishing["zuk"] = spectral_report_to_json(v.zuk);
    vanishing["certified"] = v.certified;
    vanishing["kernel_dim"] = v.kernel_dim;
    vanishing["gap"] = std::isfinite(v.gap) ? Json(v.gap) : Json();
    if (!v.note.empty()) vanishing["note"] = v.note;

    bool pass = dd <= 1e-10 && adjoint <= 1e-8 && equiv <= kTol.equivariance &&
                antisym <= 1e-10 &&
                (!bochner.contains("max_rel_residual") ||
                 bochner_rel <= kTol.bochner_cochain_rel * 100);

    Json result;
    result["degree"] = k;
    result["coefficient_dim"] = rho.dim;
    result["space_dim"] = B.dim();
    result["identities"] = std::move(identities);
    result["bochner"] = std::move(bochner);
    result["laplacian"] = std::move(lap);
    result["vanishing"] = std::move(vanishing);
    result["pass"] = pass;
    return {strict && !pass ? 1 : 0, std::move(result)};
}

// ---------------------------------------------------------------------------
// verify-paper

struct CheckTable {
    Json rows = Json::array();
    bool pass = true;

    void closed_form(const std::string& name, double expected, double computed,
                     double tol) {
        double err = std::abs(computed - expected);
        Json r;
        r["name"] = name;
        r["expected"] = expected;
        r["computed"] = computed;
        r["error"] = err;
        r["tolerance"] = tol;
        r["pass"] = err <= tol;
        pass = pass && err <= tol;
        rows.push_back(std::move(r));
    }

    void bound(const std::string& name, double slack, double tol) {
        // `slack` is how far the quantity sits past its allowed bound; 0 is ideal.
        Json r;
        r["name"] = name;
        r["expected"] = 0.0;
        r["computed"] = slack;
        r["error"] = std::max(0.0, slack);
        r["tolerance"] = tol;
        r["pass"] = slack <= tol;
        pass = pass && slack <= tol;
        rows.push_back(std::move(r));
    }

    void verdict(const std::string& name, bool ok) {
        Json r;
        r["name"] = name;
        r["expected"] = true;
        r["computed"] = ok;
        r["pass"] = ok;
        pass = pass && ok;
        rows.push_back(std::move(r));
    }
};

double cert_error(const A2Certificate& cert, const std::string& needle) {
    for (const auto& [name, err] : cert.checks)
        if (name.find(needle) != std::string::npos) return err;
    throw validation_error("certificate check not found", needle);
}

WeightedComplex edge_join_hexagon() {
    std::vector<Simplex> tets;
    for (int c = 0; c < 6; ++c)
        tets.push_back({0, 1, 2 + c, 2 + (c + 1) % 6});
    return build_complex(tets);
}

CheckTable section_headline() {
    CheckTable t;
    const double rt2 = std::sqrt(2.0);
    double mu = mu1(link_view_of_graph(pg2_incidence_graph(2)));
    t.closed_form("mu1 of the Heawood link equals 1 - sqrt2/3", 1.0 - rt2 / 3.0, mu,
                  kTol.spectra);
    A2Certificate cert = a2_upper_bound_r2();
    t.closed_form("delta bound for the r = 2 cone equals (37 - 18 sqrt2)/28",
                  (37.0 - 18.0 * rt2) / 28.0, cert.bound, 1e-12);
    FixedPointCriterion fc = fixed_point_criterion(1.0, cert.bound);
    t.closed_form("fixed point threshold equals (4 sqrt2 + 2)/9",
                  (4.0 * rt2 + 2.0) / 9.0, fc.threshold, 1e-12);
    double mu43 = mu1(link_view_of_graph(pg2_incidence_graph(43)));
    t.verdict("links of PG(2,43) clear the threshold",
              fixed_point_criterion(mu43, cert.bound).satisfied);
    return t;
}

CheckTable section_links() {
    CheckTable t;
    for (int p : {2, 3, 5, 7}) {
        std::string tag = "PG(2," + std::to_string(p) + "): ";
        MetricGraph g = pg2_incidence_graph(p);
        int N = p * p + p + 1;
        t.closed_form(tag + "2(p^2+p+1) vertices", 2.0 * N, g.n, 0.0);
        int worst = 0;
        for (int v = 0; v < g.n; ++v) worst = std::max(worst, std::abs(g.degree(v) - (p + 1)));
        t.closed_form(tag + "(p+1)-regular", 0.0, worst, 0.0);
        t.closed_form(tag + "girth 6", 6.0, girth(g), 0.0);
        SpectrumCheck sc = adjacency_spectrum_check(g, p);
        t.verdict(tag + "adjacency spectrum {+-(p+1), +-sqrt(p) x (p^2+p)}", sc.ok);
        t.closed_form(tag + "mu1 = 1 - sqrt(p)/(p+1)",
                      1.0 - std::sqrt(static_cast<double>(p)) / (p + 1),
                      mu1(link_view_of_graph(g)), kTol.spectra);
    }
    return t;
}

CheckTable section_bochner_maps() {
    CheckTable t;
    WeightedComplex oct = octahedron_complex();
    GroupAction Goct = GroupAction::trivial(oct);
    Space R3 = Space::euclidean(3);
    TargetAction flat = TargetAction::trivial(R3, Goct);

    Rng rng(41);
    double gap1 = 0.0, gap2 = 0.0, third_flat = 0.0;
    for (int i = 0; i < 5; ++i) {
        EquivariantMap f = random_start_map(oct, Goct, flat, rng);
        BochnerReport r = bochner_check(oct, Goct, flat, f);
        gap1 = std::max(gap1, r.rel_gap1);
        gap2 = std::max(gap2, r.rel_gap2);
        third_flat = std::max(third_flat, std::abs(r.third_total));
    }
    t.bound("(3.1) on the octahedron into R^3, relative gap", gap1, kTol.bochner_map_rel);
    t.bound("(3.2) on the octahedron into R^3, relative gap", gap2, kTol.bochner_map_rel);
    t.bound("flat targets have vanishing third term", third_flat, 1e-8);

    Space tree = Space::tree(std::make_shared<MetricGraphGeometry>(
        MetricGraphGeometry::uniform(regular_tree_graph(3, 2))));
    TargetAction tact = TargetAction::trivial(tree, Goct);
    double tgap = 0.0, third_min = 0.0;
    for (int i = 0; i < 5; ++i) {
        EquivariantMap f = random_start_map(oct, Goct, tact, rng);
        BochnerReport r = bochner_check(oct, Goct, tact, f);
        tgap = std::max(tgap, std::max(r.rel_gap1, r.rel_gap2));
        third_min = std::min(third_min, r.third_min);
    }
    t.bound("(3.1)+(3.2) on the octahedron into a tree, relative gap", tgap,
            kTol.bochner_map_rel);
    t.bound("tree targets keep the third term nonnegative", -third_min,
            -kTol.third_term_floor);

    WeightedComplex cone = cone_over_graph(pg2_incidence_graph(2));
    GroupAction Gc = GroupAction::trivial(cone);
    Space R2 = Space::euclidean(2);
    TargetAction flat2 = TargetAction::trivial(R2, Gc);
    double cgap = 0.0;
    for (int i = 0; i < 3; ++i) {
        EquivariantMap f = random_start_map(cone, Gc, flat2, rng);
        BochnerReport r = bochner_check(cone, Gc, flat2, f);
        cgap = std::max(cgap, std::max(r.rel_gap1, r.rel_gap2));
    }
    t.bound("(3.1)+(3.2) on the Heawood cone complex into R^2, relative gap", cgap,
            kTol.bochner_map_rel);
    t.verdict("garland:1 passes on the octahedron",
              check_condition(oct, Goct, {ConditionKind::Garland, 1, 0.0, true}).pass);
    return t;
}

CheckTable section_flow() {
    CheckTable t;
    WeightedComplex cone = cone_over_graph(pg2_incidence_graph(2));
    GroupAction G = GroupAction::trivial(cone);
    Space tripod = Space::pod(3);
    TargetAction rho = TargetAction::trivial(tripod, G);

    Rng rng(7);
    FlowReport rep = run_flow(cone, G, rho, random_start_map(cone, G, rho, rng), {});
    t.verdict("flow on the Heawood cone into the tripod converges (seed 7)",
              rep.converged);
    t.bound("final energy below 1e-12", rep.energies.back(), 1e-12);
    double increase = 0.0;
    for (std::size_t i = 1; i < rep.energies.size(); ++i)
        increase = std::max(increase, rep.energies[i] - rep.energies[i - 1]);
    t.bound("energy trace is monotone", increase, 1e-12);
    t.verdict("tail decay ratio q < 1",
              std::isfinite(rep.decay_ratio) ? rep.decay_ratio < 1.0 : true);

    Space tree = Space::tree(std::make_shared<MetricGraphGeometry>(
        MetricGraphGeometry::uniform(regular_tree_graph(3, 2))));
    TargetAction tact = TargetAction::trivial(tree, G);
    Rng rng3(3);
    FlowReport rt = run_flow(cone, G, tact, random_start_map(cone, G, tact, rng3), {});
    t.verdict("flow into the 3-regular tree converges (seed 3)",
              rt.converged && rt.energies.back() <= 1e-12);

    WeightedComplex oct = octahedron_complex();
    GroupAction Go = GroupAction::trivial(oct);
    Space R3 = Space::euclidean(3);
    TargetAction flat = TargetAction::trivial(R3, Go);
    Rng rng4(11);
    double slack = 0.0;  // octahedron links are C4, mu1 = 1, valid C for flat targets
    for (int i = 0; i < 5; ++i) {
        EquivariantMap f = random_start_map(oct, Go, flat, rng4);
        GradientCheck gc = gradient_estimate_check(oct, Go, flat, f, 1.0);
        slack = std::min(slack, gc.lhs - gc.rhs);
    }
    t.bound("Lemma 4.2 slack nonnegative on random octahedron maps", -slack,
            kTol.gradient_slack);
    return t;
}

CheckTable section_delta() {
    CheckTable t;
    const double rt2 = std::sqrt(2.0);

    Space pod5 = Space::pod(5);
    Rng rng(17);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        worst = std::max(worst, delta_config(random_configuration(pod5, rng, 6)).ratio);
    t.bound("random pod configurations are flexible (ratio <= 1e-6)", worst, 1e-6);

    Space tripod = Space::pod(3);
    std::vector<Point> pts;
    for (int s = 0; s < 3; ++s) pts.push_back(Point::pod_at(s, 1.0));
    double vertex_ratio =
        delta_config(make_configuration(tripod, pts, {1.0, 1.0, 1.0})).ratio;
    t.bound("tripod unit configuration is flexible", vertex_ratio, 1e-6);

    Space prod = Space::product({Space::euclidean(2), Space::pod(3)});
    double pworst = 0.0;
    for (int i = 0; i < 10; ++i)
        pworst = std::max(pworst, delta_config(random_configuration(prod, rng, 5)).ratio);
    t.bound("flat x tripod products stay at the component bound 0", pworst, 1e-6);

    Space cone = Space::graph_cone(std::make_shared<MetricGraphGeometry>(
        MetricGraphGeometry::uniform(pg2_incidence_graph(2))));
    Configuration cfg = cone_vertex_configuration(cone);
    Configuration pushed = pushforward_configuration(cfg);
    double drop = delta_config(cfg).ratio - delta_config(pushed).ratio;
    t.bound("pushforward to the tangent cone does not decrease the ratio", drop, 1e-6);

    A2Certificate cert = a2_upper_bound_r2();
    t.closed_form("threshold 1/(2(1 - delta)) equals (4 sqrt2 + 2)/9",
                  (4.0 * rt2 + 2.0) / 9.0,
                  fixed_point_criterion(1.0, cert.bound).threshold, 1e-12);
    double mu43 = mu1(link_view_of_graph(pg2_incidence_graph(43)));
    double mu41 = mu1(link_view_of_graph(pg2_incidence_graph(41)));
    t.verdict("PG(2,43) satisfies the fixed point criterion",
              fixed_point_criterion(mu43, cert.bound).satisfied);
    t.verdict("PG(2,41) fails the fixed point criterion",
              !fixed_point_criterion(mu41, cert.bound).satisfied);
    return t;
}

CheckTable section_cone_pipeline() {
    CheckTable t;
    const double rt2 = std::sqrt(2.0);

    {
        double a = 0.3, b = -0.2;
        auto branches = cone_gram_eigen(2, a, b);
        std::vector<double> expect;
        for (const EigenBranch& br : branches)
            expect.insert(expect.end(), br.multiplicity, br.value);
        std::sort(expect.begin(), expect.end());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cone_gram_family(2, a, b));
        double err = 0.0;
        for (int i = 0; i < 14; ++i)
            err = std::max(err, std::abs(es.eigenvalues()[i] - expect[i]));
        t.closed_form("closed-form spectrum of G_{a,b} matches a dense solve", 0.0, err,
                      kTol.spectra);
    }

    ConeEmbedding emb = cone_optimal_embedding(2);
    double astar = (2.0 - 1.0 - rt2) / 4.0;
    double bstar = (4.0 - 2.0 - 3.0 * rt2) / 8.0;
    t.bound("optimal parameters (a*, b*) = ((r-1-sqrt r)/2r, (r^2-r-(r+1) sqrt r)/2r^2)",
            std::max(std::abs(emb.a - astar), std::abs(emb.b - bstar)), 1e-12);
    t.closed_form("minimal barycenter form value 14(5 - 3 sqrt2)",
                  14.0 * (5.0 - 3.0 * rt2), emb.min_value, kTol.spectra);
    t.bound("embedding realizes the form and the chamber metric",
            std::max(emb.gram_defect, emb.chamber_defect), kTol.spectra);

    A2Certificate cert = a2_upper_bound_r2();
    t.bound("comparison spectrum {-9/2, 3(1+-sqrt2)/2 x6, 1/2}",
            cert_error(cert, "comparison form spectrum"), kTol.spectra);
    t.bound("projection coefficients (3/7, sqrt2/7, 1/14, 3 sqrt2/28) by distance class",
            cert_error(cert, "projection onto the 3(1-sqrt2)/2 branch"), kTol.spectra);
    t.bound("chamber components -(9/28)(a+b)^2 and -((3 sqrt2-3)/14)(3a^2-2 sqrt2 ab+3b^2)",
            std::max(cert_error(cert, "chamber form of the -9/2 component"),
                     cert_error(cert, "chamber form of the 3(1-sqrt2)/2 component")),
            kTol.spectra);
    t.closed_form("combined chamber ratio maximum (37 - 18 sqrt2)/28",
                  (37.0 - 18.0 * rt2) / 28.0, cert.bound, 1e-12);

    Space cone = Space::graph_cone(std::make_shared<MetricGraphGeometry>(
        MetricGraphGeometry::uniform(pg2_incidence_graph(2))));
    double ratio = delta_config(cone_vertex_configuration(cone)).ratio;
    t.closed_form("vertex configuration SDP ratio (5 - 3 sqrt2)/14",
                  (5.0 - 3.0 * rt2) / 14.0, ratio, kTol.delta_config_abs);
    return t;
}

CheckTable section_cochains() {
    CheckTable t;
    WeightedComplex sphere = simplex_boundary(4);
    GroupAction Gs = GroupAction::trivial(sphere);
    Representation triv = Representation::trivial(Gs, 1);
    Rng rng(23);

    CochainBasis B1 = cochain_basis(sphere, Gs, triv, 1);
    CochainBasis B2 = cochain_basis(sphere, Gs, triv, 2);
    double dd = 0.0, adjoint = 0.0;
    for (int i = 0; i < 5; ++i) {
        EquivariantCochain a = random_cochain(sphere, B1, rng);
        EquivariantCochain b = random_cochain(sphere, B2, rng);
        dd = std::max(dd, norm(sphere, Gs, coboundary(sphere, coboundary(sphere, a))));
        double lhs = inner_product(sphere, Gs, coboundary(sphere, a), b);
        double rhs = inner_product(sphere, Gs, a, coboundary_adjoint(sphere, b));
        adjoint = std::max(adjoint, std::abs(lhs - rhs) /
                                        std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
    t.bound("d after d vanishes on the 4-simplex boundary", dd, 1e-10);
    t.bound("<d a, b> = <a, delta b> on the 4-simplex boundary", adjoint, 1e-10);

    WeightedComplex join = edge_join_hexagon();
    GroupAction Gj = GroupAction::trivial(join);
    Representation trivj = Representation::trivial(Gj, 1);
    double brel = 0.0;
    for (int k : {1, 2}) {
        CochainBasis Bk = cochain_basis(join, Gj, trivj, k);
        for (int i = 0; i < 5; ++i) {
            EquivariantCochain a = random_cochain(join, Bk, rng);
            BochnerSides s = bochner_identity_check(join, Gj, a);
            brel = std::max(brel, std::abs(s.lhs - s.rhs) /
                                      std::max({1.0, std::abs(s.lhs), std::abs(s.rhs)}));
        }
    }
    t.bound("Bochner identity at degrees 1 and 2 on the join complex", brel,
            kTol.bochner_cochain_rel);

    WeightedComplex cone = cone_over_graph(pg2_incidence_graph(2));
    GroupAction Gc = GroupAction::trivial(cone);
    VanishingReport vg = vanishing_certificate(cone, Gc, Representation::trivial(Gc, 1), 1);
    t.verdict("Garland certificate on the Heawood cone at degree 1",
              vg.garland.pass && vg.certified && vg.kernel_dim == 0);
    VanishingReport vz = vanishing_certificate(join, Gj, trivj, 2);
    t.verdict("Zuk certificate on the join complex at degree 2",
              !vz.garland.pass && vz.zuk.pass && vz.certified && vz.kernel_dim == 0);

    WeightedComplex oct = octahedron_complex();
    GroupAction Go = GroupAction::from_generators(oct, {{2, 3, 1, 0, 4, 5},
                                                        {0, 1, 4, 5, 3, 2}});
    Eigen::Matrix3d Rz, Rx;
    Rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    Rx << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    Representation geo = make_representation(Go, {Rz, Rx});
    CochainBasis Bg = cochain_basis(oct, Go, geo, 1);
    double basis_err = 0.0;
    for (int i = 0; i < Bg.dim(); ++i) {
        const EquivariantCochain& bi = Bg.vectors[i];
        basis_err = std::max(basis_err,
                             cochain_equivariance_defect(oct, Go, geo, bi));
        for (int j = 0; j <= i; ++j) {
            double ip = inner_product(oct, Go, bi, Bg.vectors[j]);
            basis_err = std::max(basis_err, std::abs(ip - (i == j ? 1.0 : 0.0)));
        }
    }
    t.bound("equivariant basis is orthonormal and equivariant (octahedron)", basis_err,
            1e-10);
    return t;
}

CmdOut cmd_verify_paper(RunManifest& manifest, std::vector<std::string> sections) {
    (void)manifest;
    const std::vector<std::string> all = {"1", "2", "3", "4", "5", "6", "A"};
    if (sections.empty()) sections = all;
    Json secs = Json::array();
    bool pass = true;
    int total = 0, failures = 0;
    for (const std::string& s : sections) {
        CheckTable t;
        if (s == "1")
            t = section_headline();
        else if (s == "2")
            t = section_links();
        else if (s == "3")
            t = section_bochner_maps();
        else if (s == "4")
            t = section_flow();
        else if (s == "5")
            t = section_delta();
        else if (s == "6")
            t = section_cone_pipeline();
        else if (s == "A")
            t = section_cochains();
        else
            throw validation_error("unknown section (expected 1..6 or A)", s);
        Json sj;
        sj["section"] = s;
        sj["checks"] = t.rows;
        sj["pass"] = t.pass;
        total += static_cast<int>(t.rows.size());
        for (const Json& r : t.rows)
            if (!r["pass"].get<bool>()) ++failures;
        pass = pass && t.pass;
        secs.push_back(std::move(sj));
    }
    Json result;
    result["sections"] = std::move(secs);
    result["checks_total"] = total;
    result["failures"] = failures;
    result["pass"] = pass;
    return {pass ? 0 : 1, std::move(result)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combinatorial harmonic map toolkit"};
    app.set_version_flag("--version", std::string("chm ") + kVersion);
    app.require_subcommand(1);
    bool timing = false;
    app.add_flag("--timing", timing, "record wall-clock time in the manifest");

    std::string complex_path, target_path, rho_path, config_path, rep_path;
    std::string condition = "wang-half", emit_path;
    std::vector<std::string> sections;
    std::uint64_t seed = 0;
    int steps = 500, sample = 0, sample_points = 6, k = 1, p = 2, samples = 8;
    double theta = 1.0;
    bool strict = false, jacobi = false;

    CLI::App* analyze = app.add_subcommand("analyze", "spectral link conditions");
    analyze->add_option("complex", complex_path, "complex JSON file")->required();
    analyze->add_option("--condition", condition,
                        "wang-half|garland:k|zuk:k|pairwise:C|threshold:c");
    analyze->add_flag("--strict", strict, "exit nonzero when the condition fails");

    CLI::App* flow = app.add_subcommand("flow", "discrete harmonic map flow");
    flow->add_option("complex", complex_path, "complex JSON file")->required();
    flow->add_option("target", target_path, "target space JSON file")->required();
    flow->add_option("--rho", rho_path, "target action JSON file");
    flow->add_option("--seed", seed, "starting map seed");
    flow->add_option("--steps", steps, "maximum flow steps");
    flow->add_option("--theta", theta, "initial damping in (0, 1]");
    flow->add_flag("--jacobi", jacobi, "simultaneous vertex updates");

    CLI::App* delta = app.add_subcommand("delta", "configuration invariant");
    delta->add_option("target", target_path, "target space JSON file")->required();
    delta->add_option("--config", config_path, "points JSON file");
    delta->add_option("--sample", sample, "number of random configurations");
    delta->add_option("--seed", seed, "sampler seed");
    delta->add_option("--points", sample_points, "points per sampled configuration");

    CLI::App* building = app.add_subcommand("building", "incidence graph artifacts");
    building->add_option("--p", p, "prime order of the plane");
    building->add_option("--emit", emit_path,
                         "graph.json | cone-target.json | cone-complex.json");

    CLI::App* cochain = app.add_subcommand("cochain-check", "cochain identities and gaps");
    cochain->add_option("complex", complex_path, "complex JSON file")->required();
    cochain->add_option("--k", k, "cochain degree");
    cochain->add_option("--rep", rep_path, "representation JSON file");
    cochain->add_option("--seed", seed, "random cochain seed");
    cochain->add_option("--samples", samples, "random cochains per identity");
    cochain->add_flag("--strict", strict, "exit nonzero when identities fail");

    CLI::App* verify = app.add_subcommand("verify-paper", "expected-value check tables");
    verify->add_option("--section", sections, "subset of 1 2 3 4 5 6 A");

    for (CLI::App* sub : {analyze, flow, delta, building, cochain, verify})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    auto t0 = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.version = kVersion;
    for (int i = 1; i < argc; ++i) manifest.arguments.push_back(argv[i]);

    try {
        CmdOut out;
        if (*analyze) {
            manifest.command = "analyze";
            out = cmd_analyze(manifest, complex_path, condition, strict);
        } else if (*flow) {
            manifest.command = "flow";
            manifest.seed = seed;
            out = cmd_flow(manifest, complex_path, target_path, rho_path, seed, steps,
                           theta, jacobi);
        } else if (*delta) {
            manifest.command = "delta";
            if (config_path.empty()) manifest.seed = seed;
            out = cmd_delta(manifest, target_path, config_path, sample, seed,
                            sample_points);
        } else if (*building) {
            manifest.command = "building";
            out = cmd_building(manifest, p, emit_path);
        } else if (*cochain) {
            manifest.command = "cochain-check";
            manifest.seed = seed;
            out = cmd_cochain_check(manifest, complex_path, k, rep_path, seed, samples,
                                    strict);
        } else if (*verify) {
            manifest.command = "verify-paper";
            out = cmd_verify_paper(manifest, sections);
        }
        if (timing)
            manifest.wall_clock_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
        Json shell;
        shell["manifest"] = manifest_to_json(manifest);
        shell["result"] = std::move(out.result);
        std::cout << shell.dump(2) << "\n";
        return out.rc;
    } catch (const malformed_json& e) {
        std::cerr << "malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return 3;
    }
}
