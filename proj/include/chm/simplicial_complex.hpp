#pragma once
/**
 * @file simplicial_complex.hpp
 * @brief Finite weighted simplicial complexes with admissible weights.
 *
 * A weight m assigns a positive number to every simplex.  It is admissible
 * when for every non-maximal k-simplex s
 *
 *     m(s) = sum over (k+1)-simplices t containing s of m(t).
 *
 * The standard weight puts 1 on every maximal simplex and extends downward
 * by this recursion.  Weights are stored as exact rationals with cached
 * double views, so admissibility is checked exactly.
 *
 * Links carry the induced weights m(s,y) = m(s ∪ {y}) and
 * m(s,y,y') = m(s ∪ {y,y'}) used by the link Laplacians.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "chm/common.hpp"
#include "chm/rational.hpp"

namespace chm {

/// Vertex ids are nonnegative integers; a simplex is a strictly ascending list.
using Simplex = std::vector<int>;

inline std::string simplex_str(const Simplex& s) { return "{" + join_ints(s) + "}"; }

struct SimplexHash {
    std::size_t operator()(const Simplex& s) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (int v : s) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 1099511628211ull;
        }
        return h;
    }
};

/// Weighted link of a simplex: vertices y with s∪{y} ∈ X and edges (y,y')
/// with s∪{y,y'} ∈ X, carrying the induced weights.
struct LinkView {
    Simplex center;
    std::vector<int> vertices;              ///< ascending vertex ids
    std::vector<Rational> vertex_weight_q;  ///< m(s,y)
    std::vector<double> vertex_weight;      ///< double view of m(s,y)
    std::vector<std::array<int, 2>> edges;  ///< index pairs into vertices, i<j
    std::vector<Rational> edge_weight_q;    ///< m(s,y,y')
    std::vector<double> edge_weight;        ///< double view of m(s,y,y')
    std::vector<std::vector<std::pair<int, double>>> adj;  ///< adj[i] = {(j, m(s,y_i,y_j))}

    int index_of(int vertex_id) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), vertex_id);
        if (it == vertices.end() || *it != vertex_id) return -1;
        return static_cast<int>(it - vertices.begin());
    }

    bool connected() const {
        if (vertices.empty()) return true;
        std::vector<char> seen(vertices.size(), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        std::size_t cnt = 1;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            for (auto [j, w] : adj[i])
                if (!seen[j]) {
                    seen[j] = 1;
                    ++cnt;
                    q.push(j);
                }
        }
        return cnt == vertices.size();
    }

    /// Total vertex weight sum; equals m(s) for admissible weights when s is
    /// contained in a higher simplex.
    double total_vertex_weight() const {
        double t = 0;
        for (double w : vertex_weight) t += w;
        return t;
    }
};

class WeightedComplex {
public:
    // -- queries -----------------------------------------------------------

    int dim() const { return static_cast<int>(by_dim_.size()) - 1; }

    int num_vertices() const { return dim() >= 0 ? static_cast<int>(by_dim_[0].size()) : 0; }

    /// X(k): unordered k-simplices in lexicographic order.
    const std::vector<Simplex>& simplices(int k) const {
        static const std::vector<Simplex> empty;
        if (k < 0 || k > dim()) return empty;
        return by_dim_[k];
    }

    /// Index of s within simplices(|s|-1), or -1 if absent.
    long index_of(const Simplex& s) const {
        auto it = index_.find(s);
        return it == index_.end() ? -1 : it->second;
    }

    bool contains(const Simplex& s) const { return index_.find(s) != index_.end(); }

    const Rational& weight(const Simplex& s) const {
        auto it = index_.find(s);
        if (it == index_.end())
            throw validation_error("weight queried for a simplex not in the complex", simplex_str(s));
        return wq_[s.size() - 1][it->second];
    }

    double weightd(const Simplex& s) const {
        auto it = index_.find(s);
        if (it == index_.end())
            throw validation_error("weight queried for a simplex not in the complex", simplex_str(s));
        return wd_[s.size() - 1][it->second];
    }

    const Rational& weight_by_index(int k, int i) const { return wq_[k][i]; }
    double weightd_by_index(int k, int i) const { return wd_[k][i]; }

    bool is_maximal(const Simplex& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) return false;
        return maximal_[s.size() - 1][it->second];
    }

    const std::vector<Simplex>& maximal_simplices() const { return maximal_list_; }

    /// Sorted vertex ids.
    std::vector<int> vertex_ids() const {
        std::vector<int> out;
        out.reserve(by_dim_[0].size());
        for (const auto& s : by_dim_[0]) out.push_back(s[0]);
        return out;
    }

    /// True when the vertex ids are exactly 0..n-1 (required for group actions).
    bool has_dense_ids() const {
        auto ids = vertex_ids();
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] != static_cast<int>(i)) return false;
        return true;
    }

    /// Neighbours of a vertex in the 1-skeleton, ascending.
    const std::vector<int>& neighbors(int v) const {
        auto it = adj_.find(v);
        if (it == adj_.end())
            throw validation_error("vertex not in complex", std::to_string(v));
        return it->second;
    }

    // -- links ---------------------------------------------------------------

    /// Weighted link of s.  Vertices y with s∪{y} ∈ X, edges with s∪{y,y'} ∈ X.
    LinkView link(const Simplex& s) const {
        if (!contains(s)) throw validation_error("link of a simplex not in the complex", simplex_str(s));
        LinkView L;
        L.center = s;
        // candidate vertices: common neighbours of all vertices of s
        std::vector<int> cand = neighbors(s[0]);
        for (std::size_t i = 1; i < s.size(); ++i) {
            const auto& nb = neighbors(s[i]);
            std::vector<int> tmp;
            std::set_intersection(cand.begin(), cand.end(), nb.begin(), nb.end(), std::back_inserter(tmp));
            cand.swap(tmp);
        }
        Simplex probe;
        for (int y : cand) {
            probe = s;
            probe.insert(std::lower_bound(probe.begin(), probe.end(), y), y);
            auto it = index_.find(probe);
            if (it == index_.end()) continue;
            L.vertices.push_back(y);
            L.vertex_weight_q.push_back(wq_[probe.size() - 1][it->second]);
            L.vertex_weight.push_back(wd_[probe.size() - 1][it->second]);
        }
        L.adj.resize(L.vertices.size());
        for (std::size_t i = 0; i < L.vertices.size(); ++i)
            for (std::size_t j = i + 1; j < L.vertices.size(); ++j) {
                probe = s;
                int a = L.vertices[i], b = L.vertices[j];
                probe.insert(std::lower_bound(probe.begin(), probe.end(), a), a);
                probe.insert(std::lower_bound(probe.begin(), probe.end(), b), b);
                auto it = index_.find(probe);
                if (it == index_.end()) continue;
                double w = wd_[probe.size() - 1][it->second];
                L.edges.push_back({static_cast<int>(i), static_cast<int>(j)});
                L.edge_weight_q.push_back(wq_[probe.size() - 1][it->second]);
                L.edge_weight.push_back(w);
                L.adj[i].push_back({static_cast<int>(j), w});
                L.adj[j].push_back({static_cast<int>(i), w});
            }
        return L;
    }

    /// Cached link of a single vertex (hot path in flows).
    const LinkView& vertex_link(int v) const {
        auto it = vlink_cache_.find(v);
        if (it != vlink_cache_.end()) return it->second;
        auto [jt, ok] = vlink_cache_.emplace(v, link(Simplex{v}));
        (void)ok;
        return jt->second;
    }

    // -- validation ----------------------------------------------------------

    /// Re-verifies the admissibility recursion exactly; returns the first
    /// offending simplex, if any.
    std::optional<Simplex> admissibility_violation() const {
        for (int k = 0; k < dim(); ++k)
            for (std::size_t i = 0; i < by_dim_[k].size(); ++i) {
                if (maximal_[k][i]) continue;
                Rational sum = 0;
                const Simplex& s = by_dim_[k][i];
                LinkView L = link(s);
                for (const auto& w : L.vertex_weight_q) sum += w;
                if (sum != wq_[k][i]) return s;
            }
        return std::nullopt;
    }

    friend WeightedComplex build_complex(const std::vector<Simplex>&,
                                         const std::map<Simplex, Rational>&, std::size_t);

private:
    std::vector<std::vector<Simplex>> by_dim_;            // by_dim_[k] = X(k), lex order
    std::unordered_map<Simplex, long, SimplexHash> index_;
    std::vector<std::vector<Rational>> wq_;
    std::vector<std::vector<double>> wd_;
    std::vector<std::vector<char>> maximal_;
    std::vector<Simplex> maximal_list_;
    std::map<int, std::vector<int>> adj_;
    mutable std::unordered_map<int, LinkView> vlink_cache_;
};

/// Builds the closure of the listed maximal simplices and extends the weight
/// downward by admissibility.  `weights` may assign rationals to maximal
/// simplices only; unlisted maximal simplices get weight 1 (standard weight).
/// Throws validation_error for malformed input, disconnected complexes, or
/// when the closure exceeds `max_simplices`.
inline WeightedComplex build_complex(const std::vector<Simplex>& maximal_in,
                                     const std::map<Simplex, Rational>& weights = {},
                                     std::size_t max_simplices = 2000000) {
    if (maximal_in.empty()) throw validation_error("complex needs at least one simplex");

    // canonicalize input simplices
    std::vector<Simplex> maxs;
    maxs.reserve(maximal_in.size());
    for (Simplex s : maximal_in) {
        if (s.empty()) throw validation_error("empty simplex in input");
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (s[i] == s[i + 1])
                throw validation_error("repeated vertex in simplex", simplex_str(s));
        for (int v : s)
            if (v < 0) throw validation_error("negative vertex id", simplex_str(s));
        if (s.size() > 13) throw validation_error("simplex dimension beyond desk scale", simplex_str(s));
        maxs.push_back(std::move(s));
    }
    std::sort(maxs.begin(), maxs.end());
    maxs.erase(std::unique(maxs.begin(), maxs.end()), maxs.end());

    // closure
    std::unordered_map<Simplex, long, SimplexHash> seen;
    std::vector<std::vector<Simplex>> by_dim;
    std::size_t total = 0;
    for (const Simplex& m : maxs) {
        std::size_t n = m.size();
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            Simplex f;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) f.push_back(m[i]);
            if (seen.emplace(f, 0).second) {
                if (by_dim.size() < f.size()) by_dim.resize(f.size());
                by_dim[f.size() - 1].push_back(std::move(f));
                if (++total > max_simplices)
                    throw validation_error("complex closure exceeds cap of " +
                                           std::to_string(max_simplices) + " simplices");
            }
        }
    }
    for (auto& level : by_dim) std::sort(level.begin(), level.end());
    seen.clear();
    for (std::size_t k = 0; k < by_dim.size(); ++k)
        for (std::size_t i = 0; i < by_dim[k].size(); ++i) seen[by_dim[k][i]] = static_cast<long>(i);

    WeightedComplex X;
    X.by_dim_ = std::move(by_dim);
    X.index_ = std::move(seen);

    // maximality: s is maximal iff no cofacet exists
    int D = X.dim();
    X.maximal_.resize(D + 1);
    for (int k = 0; k <= D; ++k) X.maximal_[k].assign(X.by_dim_[k].size(), 1);
    for (int k = 1; k <= D; ++k)
        for (const Simplex& t : X.by_dim_[k]) {
            Simplex f(t.size() - 1);
            for (std::size_t drop = 0; drop < t.size(); ++drop) {
                for (std::size_t i = 0, j = 0; i < t.size(); ++i)
                    if (i != drop) f[j++] = t[i];
                X.maximal_[k - 1][X.index_.at(f)] = 0;
            }
        }
    for (int k = 0; k <= D; ++k)
        for (std::size_t i = 0; i < X.by_dim_[k].size(); ++i)
            if (X.maximal_[k][i]) X.maximal_list_.push_back(X.by_dim_[k][i]);

    // weights: supplied on maximal simplices only, then the recursion
    for (const auto& [s, w] : weights) {
        Simplex c = s;
        std::sort(c.begin(), c.end());
        auto it = X.index_.find(c);
        if (it == X.index_.end())
            throw validation_error("weight supplied for a simplex not in the complex", simplex_str(c));
        if (!X.maximal_[c.size() - 1][it->second])
            throw validation_error("weight supplied for a non-maximal simplex", simplex_str(c));
        if (w <= 0) throw validation_error("weights must be positive", simplex_str(c));
    }
    X.wq_.resize(D + 1);
    for (int k = 0; k <= D; ++k) X.wq_[k].assign(X.by_dim_[k].size(), Rational(0));
    for (const Simplex& m : X.maximal_list_) {
        Rational w = 1;
        auto it = weights.find(m);
        if (it != weights.end()) w = it->second;
        X.wq_[m.size() - 1][X.index_.at(m)] = w;
    }
    for (int k = D; k >= 1; --k) {
        Simplex f;
        for (std::size_t i = 0; i < X.by_dim_[k].size(); ++i) {
            const Simplex& t = X.by_dim_[k][i];
            const Rational& wt = X.wq_[k][i];
            f.assign(t.size() - 1, 0);
            for (std::size_t drop = 0; drop < t.size(); ++drop) {
                for (std::size_t a = 0, b = 0; a < t.size(); ++a)
                    if (a != drop) f[b++] = t[a];
                X.wq_[k - 1][X.index_.at(f)] += wt;
            }
        }
    }
    X.wd_.resize(D + 1);
    for (int k = 0; k <= D; ++k) {
        X.wd_[k].resize(X.wq_[k].size());
        for (std::size_t i = 0; i < X.wq_[k].size(); ++i) X.wd_[k][i] = to_double(X.wq_[k][i]);
    }

    // 1-skeleton adjacency + connectivity
    for (const Simplex& v : X.by_dim_[0]) X.adj_[v[0]];
    if (D >= 1)
        for (const Simplex& e : X.by_dim_[1]) {
            X.adj_[e[0]].push_back(e[1]);
            X.adj_[e[1]].push_back(e[0]);
        }
    for (auto& [v, nb] : X.adj_) std::sort(nb.begin(), nb.end());
    if (X.num_vertices() > 1) {
        std::map<int, char> seen_v;
        std::queue<int> q;
        int v0 = X.by_dim_[0][0][0];
        q.push(v0);
        seen_v[v0] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int u : X.adj_.at(v))
                if (!seen_v.count(u)) {
                    seen_v[u] = 1;
                    q.push(u);
                }
        }
        if (static_cast<int>(seen_v.size()) != X.num_vertices())
            throw validation_error("complex is not connected");
    }
    return X;
}

/// Faces of s obtained by deleting one vertex, in deletion order s_(0), s_(1), ...
inline std::vector<Simplex> facets(const Simplex& s) {
    std::vector<Simplex> out;
    if (s.size() <= 1) return out;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
        Simplex f;
        f.reserve(s.size() - 1);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (i != drop) f.push_back(s[i]);
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace chm
