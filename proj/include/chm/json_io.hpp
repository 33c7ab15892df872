#pragma once
/**
 * @file json_io.hpp
 * @brief JSON file formats for the command line tool: complexes, metric
 *        graphs, target spaces, point configurations, representations and
 *        target actions, plus serializers for the report structures.
 *
 * Loaders attach the file path and the offending object to every
 * validation_error so the tool can echo them at exit code 3.  Syntactically
 * malformed JSON surfaces as nlohmann's parse_error (byte position included)
 * and maps to exit code 2.
 */

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chm/buildings.hpp"
#include "chm/cochain_calculus.hpp"
#include "chm/common.hpp"
#include "chm/delta_invariant.hpp"
#include "chm/flow.hpp"
#include "chm/group_action.hpp"
#include "chm/harmonic.hpp"
#include "chm/isometry.hpp"
#include "chm/link_spectra.hpp"
#include "chm/metric_graph.hpp"
#include "chm/rational.hpp"
#include "chm/simplicial_complex.hpp"
#include "chm/spaces.hpp"

namespace chm {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// primitive field access with location context

namespace jio {

inline std::string at(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object())
        throw validation_error("expected an object", where);
    auto it = j.find(key);
    if (it == j.end())
        throw validation_error("missing field '" + std::string(key) + "'", where);
    return *it;
}

inline const Json* opt_field(const Json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline long as_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw validation_error("expected an integer", where);
    return j.get<long>();
}

inline double as_number(const Json& j, const std::string& where) {
    if (!j.is_number())
        throw validation_error("expected a number", where);
    return j.get<double>();
}

inline const Json& as_array(const Json& j, const std::string& where) {
    if (!j.is_array())
        throw validation_error("expected an array", where);
    return j;
}

inline std::vector<int> as_int_vector(const Json& j, const std::string& where) {
    as_array(j, where);
    std::vector<int> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(static_cast<int>(as_int(j[i], where + "[" + std::to_string(i) + "]")));
    return out;
}

inline std::vector<double> as_number_vector(const Json& j, const std::string& where) {
    as_array(j, where);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline Eigen::VectorXd as_vector(const Json& j, const std::string& where) {
    std::vector<double> v = as_number_vector(j, where);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

inline Eigen::MatrixXd as_matrix(const Json& j, const std::string& where) {
    as_array(j, where);
    if (j.empty()) throw validation_error("empty matrix", where);
    const std::size_t cols = as_array(j[0], where + "[0]").size();
    Eigen::MatrixXd M(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        std::string rw = where + "[" + std::to_string(r) + "]";
        const Json& row = as_array(j[r], rw);
        if (row.size() != cols) throw validation_error("ragged matrix rows", rw);
        for (std::size_t c = 0; c < cols; ++c) M(r, c) = as_number(row[c], rw);
    }
    return M;
}

inline std::string dir_of(const std::string& path) {
    std::size_t cut = path.find_last_of('/');
    return cut == std::string::npos ? std::string(".") : path.substr(0, cut);
}

}  // namespace jio

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file", path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Syntactically malformed input; the message carries the file path and the
/// parser's byte position.  The tool maps this to exit code 2.
class malformed_json : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Json parse_json_file(const std::string& path) {
    std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw malformed_json(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// serialization helpers

inline Json vector_to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json matrix_to_json(const Eigen::MatrixXd& M) {
    Json rows = Json::array();
    for (long r = 0; r < M.rows(); ++r) rows.push_back(vector_to_json(M.row(r).transpose()));
    return rows;
}

// ---------------------------------------------------------------------------
// complexes

struct ComplexBundle {
    WeightedComplex complex;
    GroupAction action;  ///< trivial when the file carries no generators
    std::vector<Perm> generators;
    bool has_action = false;
};

inline ComplexBundle complex_from_json(const Json& j, const std::string& where) {
    const Json& maxs = jio::as_array(jio::field(j, "maximal_simplices", where),
                                     jio::at(where, "maximal_simplices"));
    std::vector<Simplex> maximal;
    maximal.reserve(maxs.size());
    for (std::size_t i = 0; i < maxs.size(); ++i)
        maximal.push_back(jio::as_int_vector(
            maxs[i], jio::at(where, "maximal_simplices[" + std::to_string(i) + "]")));

    std::map<Simplex, Rational> weights;
    if (const Json* w = jio::opt_field(j, "weights")) {
        std::string ww = jio::at(where, "weights");
        if (!w->is_object()) throw validation_error("expected an object", ww);
        for (auto it = w->begin(); it != w->end(); ++it) {
            Simplex s;
            std::istringstream is(it.key());
            std::string tok;
            while (std::getline(is, tok, ','))
                try {
                    s.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    throw validation_error("weight key is not a comma-separated vertex list",
                                           jio::at(ww, it.key()));
                }
            std::sort(s.begin(), s.end());
            double v = jio::as_number(it.value(), jio::at(ww, it.key()));
            weights[s] = rational_from_double(v);
        }
    }

    ComplexBundle out;
    out.complex = build_complex(maximal, weights);
    if (const Json* g = jio::opt_field(j, "action_generators")) {
        std::string gw = jio::at(where, "action_generators");
        jio::as_array(*g, gw);
        for (std::size_t i = 0; i < g->size(); ++i)
            out.generators.push_back(
                jio::as_int_vector((*g)[i], gw + "[" + std::to_string(i) + "]"));
        out.action = GroupAction::from_generators(out.complex, out.generators);
        out.has_action = true;
    } else {
        out.action = GroupAction::trivial(out.complex);
    }
    return out;
}

inline ComplexBundle load_complex(const std::string& path) {
    return complex_from_json(parse_json_file(path), path);
}

inline Json complex_to_json(const WeightedComplex& X) {
    Json j;
    Json maxs = Json::array();
    int top = X.dim();
    for (int k = 0; k <= top; ++k)
        for (const Simplex& s : X.simplices(k))
            if (X.is_maximal(s)) maxs.push_back(s);
    j["maximal_simplices"] = std::move(maxs);
    return j;
}

// ---------------------------------------------------------------------------
// metric graphs

inline MetricGraph graph_from_json(const Json& j, const std::string& where) {
    MetricGraph g;
    g.n = static_cast<int>(jio::as_int(jio::field(j, "vertices", where),
                                       jio::at(where, "vertices")));
    const Json& edges = jio::as_array(jio::field(j, "edges", where), jio::at(where, "edges"));
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string ew = jio::at(where, "edges[" + std::to_string(i) + "]");
        std::vector<int> e = jio::as_int_vector(edges[i], ew);
        if (e.size() != 2) throw validation_error("edge needs exactly two endpoints", ew);
        g.edges.push_back({e[0], e[1]});
    }
    if (const Json* L = jio::opt_field(j, "edge_length"))
        g.edge_length = jio::as_number(*L, jio::at(where, "edge_length"));
    if (const Json* b = jio::opt_field(j, "bipartition"))
        g.bipartition = jio::as_int_vector(*b, jio::at(where, "bipartition"));
    g.validate();
    return g;
}

inline Json graph_to_json(const MetricGraph& g) {
    Json j;
    j["vertices"] = g.n;
    Json edges = Json::array();
    for (const auto& e : g.edges) edges.push_back(Json::array({e[0], e[1]}));
    j["edges"] = std::move(edges);
    j["edge_length"] = g.edge_length;
    if (!g.bipartition.empty()) j["bipartition"] = g.bipartition;
    return j;
}

// ---------------------------------------------------------------------------
// target spaces

/// The "graph" field may be an inline object or a path to a graph file,
/// resolved relative to the referencing file's directory.
inline std::shared_ptr<MetricGraphGeometry> geometry_from_json(const Json& j,
                                                               const std::string& where,
                                                               const std::string& base_dir) {
    if (j.is_string()) {
        std::string ref = j.get<std::string>();
        std::string path = (ref.empty() || ref[0] == '/') ? ref : base_dir + "/" + ref;
        MetricGraph g = graph_from_json(parse_json_file(path), path);
        return std::make_shared<MetricGraphGeometry>(MetricGraphGeometry::uniform(g));
    }
    if (const Json* lens = jio::opt_field(j, "edge_lengths")) {
        int n = static_cast<int>(jio::as_int(jio::field(j, "vertices", where),
                                             jio::at(where, "vertices")));
        const Json& ejs = jio::as_array(jio::field(j, "edges", where), jio::at(where, "edges"));
        std::vector<std::array<int, 2>> edges;
        for (std::size_t i = 0; i < ejs.size(); ++i) {
            std::string ew = jio::at(where, "edges[" + std::to_string(i) + "]");
            std::vector<int> e = jio::as_int_vector(ejs[i], ew);
            if (e.size() != 2) throw validation_error("edge needs exactly two endpoints", ew);
            if (e[0] > e[1]) std::swap(e[0], e[1]);
            edges.push_back({e[0], e[1]});
        }
        std::vector<double> L = jio::as_number_vector(*lens, jio::at(where, "edge_lengths"));
        return std::make_shared<MetricGraphGeometry>(n, std::move(edges), std::move(L));
    }
    MetricGraph g = graph_from_json(j, where);
    return std::make_shared<MetricGraphGeometry>(MetricGraphGeometry::uniform(g));
}

inline Space space_from_json(const Json& j, const std::string& where,
                             const std::string& base_dir) {
    const Json& kj = jio::field(j, "kind", where);
    if (!kj.is_string()) throw validation_error("expected a string", jio::at(where, "kind"));
    std::string kind = kj.get<std::string>();
    if (kind == "euclidean")
        return Space::euclidean(
            static_cast<int>(jio::as_int(jio::field(j, "dim", where), jio::at(where, "dim"))));
    if (kind == "pod") {
        int rays = static_cast<int>(
            jio::as_int(jio::field(j, "rays", where), jio::at(where, "rays")));
        if (const Json* b = jio::opt_field(j, "bound"))
            return Space::pod(rays, jio::as_number(*b, jio::at(where, "bound")));
        return Space::pod(rays);
    }
    if (kind == "tree")
        return Space::tree(geometry_from_json(jio::field(j, "graph", where),
                                              jio::at(where, "graph"), base_dir));
    if (kind == "graph_cone")
        return Space::graph_cone(geometry_from_json(jio::field(j, "graph", where),
                                                    jio::at(where, "graph"), base_dir));
    if (kind == "product") {
        const Json& fj = jio::as_array(jio::field(j, "factors", where),
                                       jio::at(where, "factors"));
        std::vector<Space> fs;
        for (std::size_t i = 0; i < fj.size(); ++i)
            fs.push_back(space_from_json(
                fj[i], jio::at(where, "factors[" + std::to_string(i) + "]"), base_dir));
        return Space::product(std::move(fs));
    }
    throw validation_error(
        "unknown target kind (expected euclidean|tree|pod|graph_cone|product)",
        jio::at(where, kind));
}

inline Space load_target(const std::string& path) {
    return space_from_json(parse_json_file(path), path, jio::dir_of(path));
}

// ---------------------------------------------------------------------------
// points and configurations

inline GraphPoint graph_point_from_json(const Json& j, const std::string& where) {
    if (const Json* v = jio::opt_field(j, "vertex"))
        return GraphPoint::at(static_cast<int>(jio::as_int(*v, jio::at(where, "vertex"))));
    if (const Json* e = jio::opt_field(j, "edge"))
        return GraphPoint::on(static_cast<int>(jio::as_int(*e, jio::at(where, "edge"))),
                              jio::as_number(jio::field(j, "offset", where),
                                             jio::at(where, "offset")));
    throw validation_error("graph point needs 'vertex' or 'edge'+'offset'", where);
}

inline Point point_from_json(const Space& S, const Json& j, const std::string& where) {
    switch (S.kind) {
        case SpaceKind::Euclidean:
            if (j.is_array()) return Point::euclidean(jio::as_vector(j, where));
            return Point::euclidean(
                jio::as_vector(jio::field(j, "x", where), jio::at(where, "x")));
        case SpaceKind::Pod:
            return Point::pod_at(
                static_cast<int>(jio::as_int(jio::field(j, "ray", where),
                                             jio::at(where, "ray"))),
                jio::as_number(jio::field(j, "r", where), jio::at(where, "r")));
        case SpaceKind::MetricTree:
            return Point::tree_at(graph_point_from_json(j, where));
        case SpaceKind::GraphCone: {
            double r = jio::as_number(jio::field(j, "r", where), jio::at(where, "r"));
            if (r == 0.0 && !jio::opt_field(j, "vertex") && !jio::opt_field(j, "edge"))
                return Point::cone_at(GraphPoint::at(0), 0.0);
            return Point::cone_at(graph_point_from_json(j, where), r);
        }
        case SpaceKind::Product: {
            const Json& pj = jio::as_array(jio::field(j, "parts", where),
                                           jio::at(where, "parts"));
            if (pj.size() != S.factors.size())
                throw validation_error("expected one part per product factor",
                                       jio::at(where, "parts"));
            std::vector<Point> parts;
            for (std::size_t i = 0; i < pj.size(); ++i)
                parts.push_back(point_from_json(
                    S.factors[i], pj[i],
                    jio::at(where, "parts[" + std::to_string(i) + "]")));
            return Point::product_of(std::move(parts));
        }
    }
    throw validation_error("unsupported space kind", where);
}

inline Json graph_point_to_json(const GraphPoint& g) {
    Json j;
    if (g.at_vertex())
        j["vertex"] = g.vertex;
    else {
        j["edge"] = g.edge;
        j["offset"] = g.offset;
    }
    return j;
}

inline Json point_to_json(const Space& S, const Point& p) {
    switch (S.kind) {
        case SpaceKind::Euclidean: {
            Json j;
            j["x"] = vector_to_json(p.v);
            return j;
        }
        case SpaceKind::Pod: {
            Json j;
            j["ray"] = p.ray;
            j["r"] = p.r;
            return j;
        }
        case SpaceKind::MetricTree:
            return graph_point_to_json(p.gp);
        case SpaceKind::GraphCone: {
            Json j = p.is_apex() ? Json::object() : graph_point_to_json(p.gp);
            j["r"] = p.r;
            return j;
        }
        case SpaceKind::Product: {
            Json parts = Json::array();
            for (std::size_t i = 0; i < S.factors.size(); ++i)
                parts.push_back(point_to_json(S.factors[i], p.parts[i]));
            Json j;
            j["parts"] = std::move(parts);
            return j;
        }
    }
    throw validation_error("unsupported space kind");
}

/// {"points": [...], "weights": optional [...]} on the given target space.
inline Configuration config_from_json(const Space& S, const Json& j,
                                      const std::string& where) {
    const Json& pj = jio::as_array(jio::field(j, "points", where), jio::at(where, "points"));
    std::vector<Point> pts;
    for (std::size_t i = 0; i < pj.size(); ++i)
        pts.push_back(point_from_json(
            S, pj[i], jio::at(where, "points[" + std::to_string(i) + "]")));
    std::vector<double> w(pts.size(), 1.0);
    if (const Json* wj = jio::opt_field(j, "weights")) {
        w = jio::as_number_vector(*wj, jio::at(where, "weights"));
        if (w.size() != pts.size())
            throw validation_error("expected one weight per point", jio::at(where, "weights"));
    }
    return make_configuration(S, std::move(pts), std::move(w));
}

inline Configuration load_config(const Space& S, const std::string& path) {
    return config_from_json(S, parse_json_file(path), path);
}

// ---------------------------------------------------------------------------
// representations and target actions

/// {"dim": d, "generators": [matrix, ...]} with one orthogonal d x d matrix
/// per complex action generator; omitting "generators" gives the trivial
/// representation of the stated dimension.
inline Representation rep_from_json(const GroupAction& G, const Json& j,
                                    const std::string& where) {
    int dim = static_cast<int>(jio::as_int(jio::field(j, "dim", where), jio::at(where, "dim")));
    if (dim <= 0) throw validation_error("representation dimension must be positive",
                                         jio::at(where, "dim"));
    const Json* mats = jio::opt_field(j, "generators");
    if (mats == nullptr) return Representation::trivial(G, dim);
    std::string mw = jio::at(where, "generators");
    jio::as_array(*mats, mw);
    if (mats->size() != G.generators().size())
        throw validation_error("expected one matrix per action generator", mw);
    std::vector<Eigen::MatrixXd> gen_mats;
    for (std::size_t i = 0; i < mats->size(); ++i) {
        Eigen::MatrixXd M = jio::as_matrix((*mats)[i], mw + "[" + std::to_string(i) + "]");
        if (M.rows() != dim || M.cols() != dim)
            throw validation_error("generator matrix does not match 'dim'",
                                   mw + "[" + std::to_string(i) + "]");
        gen_mats.push_back(std::move(M));
    }
    return make_representation(G, gen_mats);
}

inline Isometry isometry_from_json(const Space& S, const Json& j, const std::string& where) {
    switch (S.kind) {
        case SpaceKind::Euclidean: {
            Eigen::MatrixXd Q = jio::as_matrix(jio::field(j, "Q", where), jio::at(where, "Q"));
            Eigen::VectorXd b = Eigen::VectorXd::Zero(S.dim);
            if (const Json* bj = jio::opt_field(j, "b"))
                b = jio::as_vector(*bj, jio::at(where, "b"));
            return Isometry::euclidean(std::move(Q), std::move(b));
        }
        case SpaceKind::MetricTree:
        case SpaceKind::GraphCone:
            return Isometry::graph_map(S, jio::as_int_vector(
                                              jio::field(j, "vertex_map", where),
                                              jio::at(where, "vertex_map")));
        case SpaceKind::Pod:
            return Isometry::ray_map(jio::as_int_vector(jio::field(j, "ray_map", where),
                                                        jio::at(where, "ray_map")));
        case SpaceKind::Product: {
            const Json& pj = jio::as_array(jio::field(j, "parts", where),
                                           jio::at(where, "parts"));
            if (pj.size() != S.factors.size())
                throw validation_error("expected one part per product factor",
                                       jio::at(where, "parts"));
            std::vector<Isometry> parts;
            for (std::size_t i = 0; i < pj.size(); ++i)
                parts.push_back(isometry_from_json(
                    S.factors[i], pj[i],
                    jio::at(where, "parts[" + std::to_string(i) + "]")));
            return Isometry::product_of(std::move(parts));
        }
    }
    throw validation_error("unsupported space kind", where);
}

/// {"generators": [isometry, ...]} parallel to the complex action generators.
inline TargetAction action_from_json(const Space& S, const GroupAction& G, const Json& j,
                                     Rng& rng, const std::string& where) {
    const Json& gj = jio::as_array(jio::field(j, "generators", where),
                                   jio::at(where, "generators"));
    std::vector<Isometry> gens;
    for (std::size_t i = 0; i < gj.size(); ++i)
        gens.push_back(isometry_from_json(
            S, gj[i], jio::at(where, "generators[" + std::to_string(i) + "]")));
    return TargetAction::from_generators(S, G, std::move(gens), rng);
}

// ---------------------------------------------------------------------------
// report serialization

inline Json spectral_report_to_json(const SpectralReport& rep) {
    Json j;
    j["condition"] = rep.condition;
    j["eigen_tolerance"] = rep.eigen_tolerance;
    Json entries = Json::array();
    for (const ConditionEntry& e : rep.entries) {
        Json ej;
        ej["simplex"] = e.simplex;
        ej["value"] = e.value;
        ej["threshold"] = e.threshold;
        ej["connected"] = e.connected;
        ej["pass"] = e.pass;
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    j["pass"] = rep.pass;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

inline Json realization_to_json(const RealizationResult& r, bool include_matrices = true) {
    Json j;
    j["value"] = r.value;
    j["denom"] = r.denom;
    j["ratio"] = r.ratio;
    j["dual_value"] = r.dual_value;
    j["dual_ratio"] = r.dual_ratio;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["diag_residual"] = r.diag_residual;
    j["offdiag_residual"] = r.offdiag_residual;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    if (include_matrices) {
        j["gram"] = matrix_to_json(r.gram);
        j["vectors"] = matrix_to_json(r.vectors);
    }
    return j;
}

inline Json config_to_json(const Configuration& cfg) {
    Json j;
    Json pts = Json::array();
    for (const Point& p : cfg.points) pts.push_back(point_to_json(cfg.space, p));
    j["points"] = std::move(pts);
    j["weights"] = cfg.weights;
    j["center"] = point_to_json(cfg.space, cfg.center);
    j["radii"] = cfg.radii;
    j["stationarity"] = cfg.stationarity;
    return j;
}

/// Energy trace as plot-ready columns (step, E, residual).
inline Json flow_report_to_json(const FlowReport& rep, const Space& Y) {
    Json j;
    Json trace;
    Json steps = Json::array();
    for (std::size_t i = 0; i < rep.energies.size(); ++i) steps.push_back(i);
    trace["step"] = std::move(steps);
    trace["E"] = rep.energies;
    trace["residual"] = rep.residuals;
    j["trace"] = std::move(trace);
    j["thetas"] = rep.thetas;
    j["steps"] = rep.steps;
    j["converged"] = rep.converged;
    j["stalled"] = rep.stalled;
    j["residual_proxy"] = rep.residual_proxy;
    j["energy_final"] = rep.energies.empty() ? 0.0 : rep.energies.back();
    j["residual_final"] = rep.residuals.empty() ? 0.0 : rep.residuals.back();
    if (std::isfinite(rep.decay_ratio)) j["decay_ratio"] = rep.decay_ratio;
    j["witness"] = point_to_json(Y, rep.witness);
    j["witness_move"] = rep.witness_move;
    return j;
}

// ---------------------------------------------------------------------------
// run manifest

/// 64-bit FNV-1a over the raw file bytes; a content fingerprint for the
/// manifest, not a cryptographic digest.
inline std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline Json tolerances_to_json() {
    Json j;
    j["rel_identity"] = kTol.rel_identity;
    j["equivariance"] = kTol.equivariance;
    j["lemma27"] = kTol.lemma27;
    j["bochner_map_rel"] = kTol.bochner_map_rel;
    j["bochner_cochain_rel"] = kTol.bochner_cochain_rel;
    j["third_term_floor"] = kTol.third_term_floor;
    j["barycenter_move"] = kTol.barycenter_move;
    j["stationarity"] = kTol.stationarity;
    j["gram_feasibility"] = kTol.gram_feasibility;
    j["psd_floor"] = kTol.psd_floor;
    j["spectra"] = kTol.spectra;
    j["cat0_slack"] = kTol.cat0_slack;
    j["flow_energy"] = kTol.flow_energy;
    j["flow_residual"] = kTol.flow_residual;
    j["theta_min"] = kTol.theta_min;
    j["gradient_slack"] = kTol.gradient_slack;
    j["delta_config_abs"] = kTol.delta_config_abs;
    j["point_eq"] = kTol.point_eq;
    return j;
}

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::vector<std::pair<std::string, std::string>> inputs;  ///< path -> digest
    std::optional<std::uint64_t> seed;
    std::string version;
    std::optional<double> wall_clock_s;

    void add_input(const std::string& path) {
        inputs.emplace_back(path, content_digest(read_text_file(path)));
    }
};

inline Json manifest_to_json(const RunManifest& m) {
    Json j;
    j["command"] = m.command;
    j["arguments"] = m.arguments;
    Json ins = Json::array();
    for (const auto& [path, digest] : m.inputs) {
        Json e;
        e["path"] = path;
        e["digest"] = digest;
        ins.push_back(std::move(e));
    }
    j["inputs"] = std::move(ins);
    if (m.seed) j["seed"] = *m.seed;
    j["tolerances"] = tolerances_to_json();
    j["version"] = m.version;
    if (m.wall_clock_s) j["wall_clock_s"] = *m.wall_clock_s;
    return j;
}

}  // namespace chm
