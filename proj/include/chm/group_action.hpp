#pragma once
/**
 * @file group_action.hpp
 * @brief Finite groups of weight-preserving simplicial automorphisms.
 *
 * Elements are vertex permutations; the group is generated by validated
 * generators and closed by breadth-first multiplication (capped).  Orbit
 * data is computed on unordered simplices (setwise stabilizers) and on
 * ordered simplices (pointwise stabilizers), the latter feeding the
 * equivariant sums of the energy and cochain inner products.
 *
 * orbit_sum_check evaluates both sides of the representative-sum identity
 *
 *   sum_{u in F(l), ordered} psi(u)/|G_u|
 *     = sum_{s in F(k), ordered} 1/|G_s| * sum_{u in X(l)_s, ordered} psi(u)
 *
 * for 0 <= k < l and a G-invariant psi.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "chm/common.hpp"
#include "chm/simplicial_complex.hpp"

namespace chm {

using Perm = std::vector<int>;  ///< value at index v = image of vertex v

struct PermHash {
    std::size_t operator()(const Perm& p) const noexcept {
        std::size_t h = 14695981039346656037ull;
        for (int v : p) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 1099511628211ull;
        }
        return h;
    }
};

class GroupAction {
public:
    /// The trivial group on X.
    static GroupAction trivial(const WeightedComplex& X) {
        GroupAction G;
        G.n_ = X.num_vertices();
        Perm id(G.n_);
        for (int i = 0; i < G.n_; ++i) id[i] = i;
        G.elements_.push_back(id);
        G.index_[G.elements_[0]] = 0;
        G.parent_.push_back(-1);
        G.via_gen_.push_back(-1);
        return G;
    }

    /// Validates each generator as a weight-preserving simplicial automorphism
    /// and closes the generated group (breadth-first, capped at `cap` elements).
    static GroupAction from_generators(const WeightedComplex& X, const std::vector<Perm>& gens,
                                       std::size_t cap = 10000) {
        if (!X.has_dense_ids())
            throw validation_error("group actions require vertex ids 0..n-1");
        GroupAction G = trivial(X);
        G.gens_ = gens;
        int n = G.n_;
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            const Perm& g = gens[gi];
            if (static_cast<int>(g.size()) != n)
                throw validation_error("generator length does not match vertex count",
                                       "generator " + std::to_string(gi));
            std::vector<char> hit(n, 0);
            for (int v : g) {
                if (v < 0 || v >= n || hit[v])
                    throw validation_error("generator is not a permutation",
                                           "generator " + std::to_string(gi));
                hit[v] = 1;
            }
            // automorphism + weight preservation, checked on every simplex
            for (int k = 0; k <= X.dim(); ++k)
                for (const Simplex& s : X.simplices(k)) {
                    Simplex img = s;
                    for (auto& v : img) v = g[v];
                    std::sort(img.begin(), img.end());
                    if (!X.contains(img))
                        throw validation_error("generator does not map the complex to itself",
                                               simplex_str(s) + " -> " + simplex_str(img));
                    if (X.weight(s) != X.weight(img))
                        throw validation_error("generator does not preserve the weight",
                                               simplex_str(s) + " -> " + simplex_str(img));
                }
        }
        // closure
        for (std::size_t head = 0; head < G.elements_.size(); ++head) {
            for (std::size_t gi = 0; gi < gens.size(); ++gi) {
                Perm next(n);
                const Perm& base = G.elements_[head];
                for (int v = 0; v < n; ++v) next[v] = gens[gi][base[v]];
                if (G.index_.emplace(next, G.elements_.size()).second) {
                    G.elements_.push_back(std::move(next));
                    G.parent_.push_back(static_cast<int>(head));
                    G.via_gen_.push_back(static_cast<int>(gi));
                    if (G.elements_.size() > cap)
                        throw validation_error("group closure exceeds cap of " + std::to_string(cap));
                }
            }
        }
        return G;
    }

    int size() const { return static_cast<int>(elements_.size()); }
    int degree() const { return n_; }
    int identity() const { return 0; }
    const Perm& element(int e) const { return elements_[e]; }
    const std::vector<Perm>& generators() const { return gens_; }

    /// Index of a∘b, i.e. the permutation v -> a(b(v)).
    int mul(int a, int b) const {
        Perm c(n_);
        const Perm& pa = elements_[a];
        const Perm& pb = elements_[b];
        for (int v = 0; v < n_; ++v) c[v] = pa[pb[v]];
        return index_.at(c);
    }

    int inv(int a) const {
        Perm c(n_);
        const Perm& pa = elements_[a];
        for (int v = 0; v < n_; ++v) c[pa[v]] = v;
        return index_.at(c);
    }

    std::optional<int> index_of(const Perm& p) const {
        auto it = index_.find(p);
        if (it == index_.end()) return std::nullopt;
        return static_cast<int>(it->second);
    }

    /// Generator word for element e: e = gens[w[0]] * gens[w[1]] * ... (left to right
    /// composition order, identity for the empty word).
    std::vector<int> word(int e) const {
        std::vector<int> w;
        while (e != 0) {
            w.push_back(via_gen_[e]);
            e = parent_[e];
        }
        std::reverse(w.begin(), w.end());
        return w;
    }

    int apply_vertex(int e, int v) const { return elements_[e][v]; }

    Simplex apply(int e, const Simplex& s) const {
        Simplex img = s;
        const Perm& p = elements_[e];
        for (auto& v : img) v = p[v];
        std::sort(img.begin(), img.end());
        return img;
    }

    std::vector<int> apply_tuple(int e, const std::vector<int>& t) const {
        std::vector<int> img = t;
        const Perm& p = elements_[e];
        for (auto& v : img) v = p[v];
        return img;
    }

    /// Elements fixing vertex v.
    std::vector<int> vertex_stabilizer(int v) const {
        std::vector<int> out;
        for (int e = 0; e < size(); ++e)
            if (elements_[e][v] == v) out.push_back(e);
        return out;
    }

    /// Elements fixing the set s (setwise).
    std::vector<int> setwise_stabilizer(const Simplex& s) const {
        std::vector<int> out;
        for (int e = 0; e < size(); ++e)
            if (apply(e, s) == s) out.push_back(e);
        return out;
    }

private:
    int n_ = 0;
    std::vector<Perm> gens_;
    std::vector<Perm> elements_;
    std::unordered_map<Perm, std::size_t, PermHash> index_;
    std::vector<int> parent_, via_gen_;
};

// ---------------------------------------------------------------------------
// orbit data

/// Orbits of G on unordered k-simplices.
struct OrbitData {
    int k = 0;
    std::vector<int> reps;        ///< indices into X.simplices(k), ascending
    std::vector<int> stab_order;  ///< |G_s| (setwise), parallel to reps
    std::vector<int> orbit_of;    ///< simplex index -> orbit id
    std::vector<int> transversal; ///< simplex index -> element g with s = g . rep
};

inline OrbitData orbit_data(const WeightedComplex& X, const GroupAction& G, int k) {
    const auto& simps = X.simplices(k);
    OrbitData O;
    O.k = k;
    O.orbit_of.assign(simps.size(), -1);
    O.transversal.assign(simps.size(), 0);
    for (std::size_t i = 0; i < simps.size(); ++i) {
        if (O.orbit_of[i] != -1) continue;
        int oid = static_cast<int>(O.reps.size());
        O.reps.push_back(static_cast<int>(i));
        int stab = 0;
        for (int e = 0; e < G.size(); ++e) {
            Simplex img = G.apply(e, simps[i]);
            long j = X.index_of(img);
            if (j == static_cast<long>(i)) ++stab;
            if (O.orbit_of[j] == -1) {
                O.orbit_of[j] = oid;
                O.transversal[j] = e;
            }
        }
        O.stab_order.push_back(stab);
    }
    return O;
}

/// Verifies the orbit partition: sum over orbits of |G|/|G_s| equals |X(k)|.
inline bool orbit_partition_check(const WeightedComplex& X, const GroupAction& G, int k) {
    OrbitData O = orbit_data(X, G, k);
    std::size_t total = 0;
    for (int st : O.stab_order) total += G.size() / st;
    return total == X.simplices(k).size();
}

/// Orbits of G on ordered k-simplices (tuples).  Tuples are all orderings of
/// the unordered simplices, listed lexicographically.
struct OrderedOrbitData {
    int k = 0;
    std::vector<std::vector<int>> tuples;
    std::vector<int> reps;         ///< indices into tuples
    std::vector<int> stab_order;   ///< |G_u| (pointwise on the tuple)
    std::vector<int> orbit_of;
    std::vector<int> transversal;  ///< tuple index -> element g with u = g . rep
    std::unordered_map<Simplex, long, SimplexHash> tuple_index;  ///< tuple (unsorted key) -> index
};

inline OrderedOrbitData ordered_orbit_data(const WeightedComplex& X, const GroupAction& G, int k) {
    OrderedOrbitData O;
    O.k = k;
    for (const Simplex& s : X.simplices(k)) {
        Simplex t = s;
        do {
            O.tuples.push_back(t);
        } while (std::next_permutation(t.begin(), t.end()));
    }
    std::sort(O.tuples.begin(), O.tuples.end());
    for (std::size_t i = 0; i < O.tuples.size(); ++i) O.tuple_index[O.tuples[i]] = static_cast<long>(i);
    O.orbit_of.assign(O.tuples.size(), -1);
    O.transversal.assign(O.tuples.size(), 0);
    for (std::size_t i = 0; i < O.tuples.size(); ++i) {
        if (O.orbit_of[i] != -1) continue;
        int oid = static_cast<int>(O.reps.size());
        O.reps.push_back(static_cast<int>(i));
        int stab = 0;
        for (int e = 0; e < G.size(); ++e) {
            auto img = G.apply_tuple(e, O.tuples[i]);
            long j = O.tuple_index.at(img);
            if (j == static_cast<long>(i)) ++stab;
            if (O.orbit_of[j] == -1) {
                O.orbit_of[j] = oid;
                O.transversal[j] = e;
            }
        }
        O.stab_order.push_back(stab);
    }
    return O;
}

// ---------------------------------------------------------------------------
// Lemma 2.2 sum check

template <class T>
struct OrbitSumPair {
    T lhs{};  ///< sum over ordered l-representatives of psi/|G_u|
    T rhs{};  ///< sum over ordered k-representatives of 1/|G_s| * sum over extensions
};

/// Evaluates both sides of the representative-sum identity for psi defined on
/// ordered l-simplices.  T is double or Rational.  psi must be G-invariant;
/// invariance is verified on the generators applied to every representative.
template <class T, class Psi>
OrbitSumPair<T> orbit_sum_check(const WeightedComplex& X, const GroupAction& G, int k, int l,
                                Psi psi) {
    if (!(0 <= k && k < l && l <= X.dim()))
        throw validation_error("orbit_sum_check requires 0 <= k < l <= dim X");
    OrderedOrbitData Ol = ordered_orbit_data(X, G, l);
    OrderedOrbitData Ok = ordered_orbit_data(X, G, k);

    for (int ri : Ol.reps) {
        const auto& u = Ol.tuples[ri];
        T base = psi(u);
        for (std::size_t gi = 0; gi < G.generators().size(); ++gi) {
            // generators are elements of the closure; locate and apply
            auto idx = G.index_of(G.generators()[gi]);
            T moved = psi(G.apply_tuple(*idx, u));
            if constexpr (std::is_same_v<T, Rational>) {
                if (moved != base)
                    throw validation_error("psi is not invariant under the action");
            } else {
                double scale = std::max({1.0, std::abs(static_cast<double>(base))});
                if (std::abs(static_cast<double>(moved - base)) > 1e-9 * scale)
                    throw validation_error("psi is not invariant under the action");
            }
        }
    }

    OrbitSumPair<T> R;
    for (std::size_t r = 0; r < Ol.reps.size(); ++r) {
        T v = psi(Ol.tuples[Ol.reps[r]]);
        if constexpr (std::is_same_v<T, Rational>)
            R.lhs += v / Ol.stab_order[r];
        else
            R.lhs += v / static_cast<double>(Ol.stab_order[r]);
    }
    // extensions: ordered l-simplices whose first k+1 entries equal the rep tuple
    const auto& lsimps = X.simplices(l);
    for (std::size_t r = 0; r < Ok.reps.size(); ++r) {
        const auto& s = Ok.tuples[Ok.reps[r]];
        Simplex sset = s;
        std::sort(sset.begin(), sset.end());
        T inner{};
        for (const Simplex& t : lsimps) {
            if (!std::includes(t.begin(), t.end(), sset.begin(), sset.end())) continue;
            Simplex rest;
            std::set_difference(t.begin(), t.end(), sset.begin(), sset.end(),
                                std::back_inserter(rest));
            std::sort(rest.begin(), rest.end());
            do {
                std::vector<int> u = s;
                u.insert(u.end(), rest.begin(), rest.end());
                inner += psi(u);
            } while (std::next_permutation(rest.begin(), rest.end()));
        }
        if constexpr (std::is_same_v<T, Rational>)
            R.rhs += inner / Ok.stab_order[r];
        else
            R.rhs += inner / static_cast<double>(Ok.stab_order[r]);
    }
    return R;
}

}  // namespace chm
