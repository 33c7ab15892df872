#pragma once
/**
 * @file metric_graph.hpp
 * @brief Metric graphs: finite graphs with edge lengths, exact point-to-point
 *        distances, and deterministic geodesic walking.
 *
 * Points live on edges (interior offset from the first endpoint) or at
 * vertices.  Distances between points minimize over the endpoint
 * combinations against the all-pairs vertex distance table; walks
 * reconstruct one realizing route with a deterministic tie-break
 * (smallest vertex index) so repeated queries agree bit for bit.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <tuple>
#include <vector>

#include "chm/common.hpp"

namespace chm {

/// Combinatorial graph with a uniform edge length; the standard carrier for
/// building links and cone bases.  Bipartition tags are optional.
struct MetricGraph {
    int n = 0;
    std::vector<std::array<int, 2>> edges;  ///< u < v, lexicographically sorted
    double edge_length = 1.0;
    std::vector<int> bipartition;  ///< per-vertex 0/1 tags; empty when untagged

    void validate() const {
        if (n <= 0) throw validation_error("metric graph needs at least one vertex");
        if (!(edge_length > 0)) throw validation_error("edge length must be positive");
        std::vector<std::array<int, 2>> copy = edges;
        for (auto& e : copy) {
            if (e[0] == e[1]) throw validation_error("loop edge", join_ints(e));
            if (e[0] > e[1]) std::swap(e[0], e[1]);
            if (e[0] < 0 || e[1] >= n) throw validation_error("edge endpoint out of range", join_ints(e));
        }
        std::sort(copy.begin(), copy.end());
        if (std::adjacent_find(copy.begin(), copy.end()) != copy.end())
            throw validation_error("duplicate edge");
        if (!bipartition.empty()) {
            if (static_cast<int>(bipartition.size()) != n)
                throw validation_error("bipartition size mismatch");
            for (const auto& e : edges)
                if (bipartition[e[0]] == bipartition[e[1]])
                    throw validation_error("edge inside one bipartition class", join_ints(e));
        }
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(n);
        for (const auto& e : edges) {
            adj[e[0]].push_back(e[1]);
            adj[e[1]].push_back(e[0]);
        }
        for (auto& a : adj) std::sort(a.begin(), a.end());
        return adj;
    }

    int degree(int v) const {
        int d = 0;
        for (const auto& e : edges) d += (e[0] == v) + (e[1] == v);
        return d;
    }
};

/// A point of a metric graph: either a vertex or an interior edge point.
struct GraphPoint {
    int vertex = -1;    ///< >= 0 when the point sits at a vertex
    int edge = -1;      ///< else the edge index
    double offset = 0;  ///< distance from edges[edge][0], strictly inside (0, L_e)

    bool at_vertex() const { return vertex >= 0; }

    static GraphPoint at(int v) { return GraphPoint{v, -1, 0.0}; }
    static GraphPoint on(int e, double off) { return GraphPoint{-1, e, off}; }
};

/// One realizing geodesic between two graph points.
struct GraphRoute {
    GraphPoint a, b;
    double length = 0;
    bool same_edge = false;  ///< direct interpolation on a shared edge
    std::vector<int> chain;  ///< vertices visited in order (empty for same_edge)
};

/// Initial direction of a geodesic: the edge it leaves through and the sign
/// of motion in that edge's offset coordinate.
struct GraphDirection {
    int edge = -1;
    int sign = 0;  ///< +1 toward edges[edge][1], -1 toward edges[edge][0]
};

class MetricGraphGeometry {
public:
    MetricGraphGeometry() = default;

    MetricGraphGeometry(int n, std::vector<std::array<int, 2>> edges, std::vector<double> lengths)
        : n_(n), edges_(std::move(edges)), len_(std::move(lengths)) {
        if (len_.size() != edges_.size())
            throw validation_error("edge length list does not match edge list");
        for (double L : len_)
            if (!(L > 0)) throw validation_error("edge lengths must be positive");
        adj_.assign(n_, {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            auto [u, v] = edges_[e];
            if (u == v || u < 0 || v >= n_ || u > v)
                throw validation_error("bad edge", join_ints(edges_[e]));
            adj_[u].push_back({v, static_cast<int>(e)});
            adj_[v].push_back({u, static_cast<int>(e)});
            eidx_[{u, v}] = static_cast<int>(e);
        }
        for (auto& a : adj_) std::sort(a.begin(), a.end());
        compute_apsp();
    }

    static MetricGraphGeometry uniform(const MetricGraph& g) {
        g.validate();
        return MetricGraphGeometry(g.n, g.edges,
                                   std::vector<double>(g.edges.size(), g.edge_length));
    }

    int n() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    double length(int e) const { return len_[e]; }

    int edge_between(int u, int v) const {
        if (u > v) std::swap(u, v);
        auto it = eidx_.find({u, v});
        return it == eidx_.end() ? -1 : it->second;
    }

    bool connected() const {
        for (int v = 0; v < n_; ++v)
            if (dist_[0][v] == kInf) return false;
        return true;
    }

    double vdist(int u, int v) const { return dist_[u][v]; }

    /// Validates a point (range checks) and canonicalizes exact endpoint hits.
    GraphPoint canonical(GraphPoint p) const {
        if (p.at_vertex()) {
            if (p.vertex < 0 || p.vertex >= n_)
                throw validation_error("graph point vertex out of range", std::to_string(p.vertex));
            return GraphPoint::at(p.vertex);
        }
        if (p.edge < 0 || p.edge >= num_edges())
            throw validation_error("graph point edge out of range", std::to_string(p.edge));
        double L = len_[p.edge];
        if (p.offset < 0 || p.offset > L)
            throw validation_error("graph point offset outside edge");
        if (p.offset == 0) return GraphPoint::at(edges_[p.edge][0]);
        if (p.offset == L) return GraphPoint::at(edges_[p.edge][1]);
        return p;
    }

    bool same_point(const GraphPoint& a, const GraphPoint& b) const {
        GraphPoint ca = canonical(a), cb = canonical(b);
        if (ca.at_vertex() != cb.at_vertex()) return false;
        if (ca.at_vertex()) return ca.vertex == cb.vertex;
        return ca.edge == cb.edge && ca.offset == cb.offset;
    }

    double dist(const GraphPoint& pa, const GraphPoint& pb) const {
        return route(pa, pb).length;
    }

    /// Shortest route with deterministic tie-breaks.
    GraphRoute route(const GraphPoint& pa, const GraphPoint& pb) const {
        GraphPoint a = canonical(pa), b = canonical(pb);
        GraphRoute r;
        r.a = a;
        r.b = b;
        if (a.at_vertex() && b.at_vertex()) {
            r.length = dist_[a.vertex][b.vertex];
            r.chain = vertex_path(a.vertex, b.vertex);
            return r;
        }
        if (!a.at_vertex() && !b.at_vertex() && a.edge == b.edge) {
            double direct = std::abs(a.offset - b.offset);
            auto [around, u, w] = best_combo(a, b);
            if (direct <= around) {
                r.length = direct;
                r.same_edge = true;
                return r;
            }
            r.length = around;
            r.chain = vertex_path(u, w);
            return r;
        }
        // at most one endpoint is a vertex, or distinct edges
        auto [best, u, w] = best_combo(a, b);
        r.length = best;
        r.chain = vertex_path(u, w);
        return r;
    }

    /// Point at arc length s along the route (0 <= s <= length).
    GraphPoint walk(const GraphRoute& r, double s) const {
        s = std::clamp(s, 0.0, r.length);
        if (r.length == 0) return r.a;
        if (r.same_edge) {
            double dir = (r.b.offset >= r.a.offset) ? 1.0 : -1.0;
            return canonical(GraphPoint::on(r.a.edge, r.a.offset + dir * s));
        }
        // leading partial edge
        if (!r.a.at_vertex()) {
            int u = r.chain.front();
            double lead = (edges_[r.a.edge][0] == u) ? r.a.offset : len_[r.a.edge] - r.a.offset;
            if (s < lead) {
                double dir = (edges_[r.a.edge][0] == u) ? -1.0 : 1.0;
                return canonical(GraphPoint::on(r.a.edge, r.a.offset + dir * s));
            }
            s -= lead;
        }
        for (std::size_t i = 0; i + 1 < r.chain.size(); ++i) {
            int e = edge_between(r.chain[i], r.chain[i + 1]);
            double L = len_[e];
            if (s < L) {
                double off = (edges_[e][0] == r.chain[i]) ? s : L - s;
                return canonical(GraphPoint::on(e, off));
            }
            s -= L;
        }
        if (!r.b.at_vertex()) {
            int w = r.chain.back();
            double off = (edges_[r.b.edge][0] == w) ? s : len_[r.b.edge] - s;
            if (s > 0) return canonical(GraphPoint::on(r.b.edge, off));
        }
        return s <= 0 ? GraphPoint::at(r.chain.back()) : r.b;
    }

    /// First direction of the geodesic a -> b; requires a != b.
    GraphDirection first_direction(const GraphPoint& pa, const GraphPoint& pb) const {
        GraphRoute r = route(pa, pb);
        if (r.length == 0) throw validation_error("direction undefined between equal points");
        GraphDirection d;
        if (r.same_edge) {
            d.edge = r.a.edge;
            d.sign = (r.b.offset >= r.a.offset) ? 1 : -1;
            return d;
        }
        if (!r.a.at_vertex()) {
            int u = r.chain.front();
            d.edge = r.a.edge;
            d.sign = (edges_[r.a.edge][0] == u) ? -1 : 1;
            return d;
        }
        int v0 = r.chain[0];
        if (r.chain.size() >= 2) {
            d.edge = edge_between(v0, r.chain[1]);
            d.sign = (edges_[d.edge][0] == v0) ? 1 : -1;
            return d;
        }
        // a at vertex, b interior on an incident edge
        d.edge = r.b.edge;
        d.sign = (edges_[r.b.edge][0] == v0) ? 1 : -1;
        return d;
    }

    bool acyclic() const {
        // a connected graph is a tree iff m = n-1
        return static_cast<int>(edges_.size()) == n_ - 1 && connected();
    }

    /// Vertex distance with one edge removed (infinity if disconnected).
    double vdist_without_edge(int src, int dst, int banned) const {
        std::vector<double> D(n_, kInf);
        D[src] = 0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.push({0.0, src});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > D[v]) continue;
            for (auto [w, e] : adj_[v]) {
                if (e == banned) continue;
                if (d + len_[e] < D[w]) {
                    D[w] = d + len_[e];
                    pq.push({D[w], w});
                }
            }
        }
        return D[dst];
    }

    double total_edge_length() const {
        double t = 0;
        for (double L : len_) t += L;
        return t;
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    void compute_apsp() {
        bool uniform = true;
        for (std::size_t e = 1; e < len_.size(); ++e)
            if (len_[e] != len_[0]) uniform = false;
        dist_.assign(n_, std::vector<double>(n_, kInf));
        for (int src = 0; src < n_; ++src) {
            auto& D = dist_[src];
            D[src] = 0;
            if (uniform && !len_.empty()) {
                std::queue<int> q;
                q.push(src);
                while (!q.empty()) {
                    int v = q.front();
                    q.pop();
                    for (auto [w, e] : adj_[v])
                        if (D[w] == kInf) {
                            D[w] = D[v] + len_[e];
                            q.push(w);
                        }
                }
            } else {
                using Item = std::pair<double, int>;
                std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
                pq.push({0.0, src});
                while (!pq.empty()) {
                    auto [d, v] = pq.top();
                    pq.pop();
                    if (d > D[v]) continue;
                    for (auto [w, e] : adj_[v])
                        if (d + len_[e] < D[w]) {
                            D[w] = d + len_[e];
                            pq.push({D[w], w});
                        }
                }
            }
        }
    }

    /// Shortest vertex chain u -> ... -> w, greedy over the distance table,
    /// smallest-index tie-break.
    std::vector<int> vertex_path(int u, int w) const {
        std::vector<int> path{u};
        int cur = u;
        while (cur != w) {
            int best = -1;
            double bestd = kInf;
            for (auto [nb, e] : adj_[cur]) {
                double d = len_[e] + dist_[nb][w];
                if (d < bestd - 1e-15) {
                    bestd = d;
                    best = nb;
                }
            }
            if (best < 0) throw validation_error("disconnected metric graph");
            path.push_back(best);
            cur = best;
        }
        return path;
    }

    /// Minimum over endpoint combinations of partial+vertex+partial, with the
    /// chosen endpoints.  Ties prefer smaller (u, w).
    std::tuple<double, int, int> best_combo(const GraphPoint& a, const GraphPoint& b) const {
        auto ends = [&](const GraphPoint& p) {
            std::vector<std::pair<int, double>> out;  // (vertex, partial length)
            if (p.at_vertex())
                out.push_back({p.vertex, 0.0});
            else {
                out.push_back({edges_[p.edge][0], p.offset});
                out.push_back({edges_[p.edge][1], len_[p.edge] - p.offset});
            }
            return out;
        };
        double best = kInf;
        int bu = -1, bw = -1;
        for (auto [u, du] : ends(a))
            for (auto [w, dw] : ends(b)) {
                double d = du + dist_[u][w] + dw;
                if (d < best - 1e-15 || (std::abs(d - best) <= 1e-15 && std::pair(u, w) < std::pair(bu, bw))) {
                    best = d;
                    bu = u;
                    bw = w;
                }
            }
        return {best, bu, bw};
    }

    int n_ = 0;
    std::vector<std::array<int, 2>> edges_;
    std::vector<double> len_;
    std::vector<std::vector<std::pair<int, int>>> adj_;  // (neighbor, edge idx)
    std::map<std::pair<int, int>, int> eidx_;
    std::vector<std::vector<double>> dist_;
};

}  // namespace chm
