#pragma once
/**
 * @file cochain_calculus.hpp
 * @brief Equivariant simplicial cochains with orthogonal coefficients.
 *
 * A representation assigns an orthogonal matrix to every element of a finite
 * group action.  A rho-equivariant k-cochain alpha is alternating and
 * satisfies alpha(gamma s) = rho(gamma) alpha(s) on ordered simplices.  The
 * module provides the weighted L2 inner product
 *
 *     <a,b> = 1/(k+1)! sum over ordered representatives s of
 *             m(s)/|Gamma_s| <a(s), b(s)>,
 *
 * the coboundary d, its adjoint delta, the Laplacian Delta = d delta +
 * delta d assembled on an orthonormal basis, the degree-k Bochner identity
 *
 *     ||da||^2 + k/(k+1) ||delta a||^2
 *       = sum over links of (k-1)-simplices of the edge-difference energy
 *         minus k/(k+1) times the variance around the weighted mean,
 *
 * and vanishing certificates driven by the Garland and Zuk link conditions.
 *
 * Cochain values are stored on every ordered tuple, in the lexicographic
 * order also used by ordered_orbit_data, so orbit machinery and plain value
 * tables can be mixed freely.  Equivariance and antisymmetry are structural
 * for cochains built from a basis and checkable for everything else.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chm/common.hpp"
#include "chm/group_action.hpp"
#include "chm/link_spectra.hpp"
#include "chm/simplicial_complex.hpp"

namespace chm {

// ---------------------------------------------------------------------------
// representations

/// Orthogonal matrices indexed by the elements of a GroupAction.
struct Representation {
    int dim = 1;
    std::vector<Eigen::MatrixXd> mats;  ///< one matrix per group element

    const Eigen::MatrixXd& of(int element) const {
        return mats[static_cast<std::size_t>(element)];
    }

    static Representation trivial(const GroupAction& G, int d = 1) {
        if (d < 1) throw validation_error("representation dimension must be positive");
        Representation r;
        r.dim = d;
        r.mats.assign(static_cast<std::size_t>(G.size()), Eigen::MatrixXd::Identity(d, d));
        return r;
    }
};

/// Extends matrices on the generators to the whole closed group and verifies
/// orthogonality and the homomorphism property on the element table.
inline Representation make_representation(const GroupAction& G,
                                          const std::vector<Eigen::MatrixXd>& generator_matrices) {
    const auto& gens = G.generators();
    if (generator_matrices.size() != gens.size())
        throw validation_error("one matrix per generator is required");
    if (gens.empty()) return Representation::trivial(G, 1);

    const int d = static_cast<int>(generator_matrices[0].rows());
    for (std::size_t i = 0; i < generator_matrices.size(); ++i) {
        const Eigen::MatrixXd& M = generator_matrices[i];
        if (M.rows() != d || M.cols() != d)
            throw validation_error("generator matrices must share one square size",
                                   "generator " + std::to_string(i));
        double ortho = (M.transpose() * M - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
        if (ortho > 1e-12)
            throw validation_error("generator matrices must be orthogonal",
                                   "generator " + std::to_string(i) + " defect " + std::to_string(ortho));
    }

    std::vector<int> gen_elem(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        auto idx = G.index_of(gens[i]);
        if (!idx) throw validation_error("generator missing from the closed action");
        gen_elem[i] = *idx;
    }

    Representation rho;
    rho.dim = d;
    rho.mats.assign(static_cast<std::size_t>(G.size()), Eigen::MatrixXd());
    rho.mats[static_cast<std::size_t>(G.identity())] = Eigen::MatrixXd::Identity(d, d);
    std::vector<int> queue{G.identity()};
    std::vector<char> known(static_cast<std::size_t>(G.size()), 0);
    known[static_cast<std::size_t>(G.identity())] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int e = queue[head];
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            int f = G.mul(gen_elem[gi], e);
            if (known[static_cast<std::size_t>(f)]) continue;
            known[static_cast<std::size_t>(f)] = 1;
            rho.mats[static_cast<std::size_t>(f)] =
                generator_matrices[gi] * rho.mats[static_cast<std::size_t>(e)];
            queue.push_back(f);
        }
    }
    if (queue.size() != static_cast<std::size_t>(G.size()))
        throw validation_error("generators do not reach the closed action");

    auto verify = [&](int a, int b) {
        double err = (rho.mats[static_cast<std::size_t>(G.mul(a, b))] -
                      rho.mats[static_cast<std::size_t>(a)] * rho.mats[static_cast<std::size_t>(b)])
                         .cwiseAbs()
                         .maxCoeff();
        if (err > 1e-10)
            throw validation_error("generator matrices do not satisfy the relations of the action");
    };
    if (G.size() <= 128) {
        for (int a = 0; a < G.size(); ++a)
            for (int b = 0; b < G.size(); ++b) verify(a, b);
    } else {
        for (int gi : gen_elem)
            for (int b = 0; b < G.size(); ++b) verify(gi, b);
    }
    return rho;
}

// ---------------------------------------------------------------------------
// ordered tuple tables and cochains

/// All ordered tuples of degree k, lexicographically sorted.  The order
/// coincides with the tuple enumeration of ordered_orbit_data.
struct TupleTable {
    int degree = 0;
    std::vector<std::vector<int>> tuples;
    std::unordered_map<Simplex, long, SimplexHash> index;

    long at(const std::vector<int>& t) const {
        auto it = index.find(t);
        if (it == index.end())
            throw validation_error("ordered tuple not in the complex", simplex_str(t));
        return it->second;
    }
};

inline TupleTable tuple_table(const WeightedComplex& X, int k) {
    if (k < 0) throw validation_error("cochain degree must be nonnegative");
    TupleTable T;
    T.degree = k;
    for (const Simplex& s : X.simplices(k)) {
        Simplex t = s;
        do {
            T.tuples.push_back(t);
        } while (std::next_permutation(t.begin(), t.end()));
    }
    std::sort(T.tuples.begin(), T.tuples.end());
    for (std::size_t i = 0; i < T.tuples.size(); ++i) T.index[T.tuples[i]] = static_cast<long>(i);
    return T;
}

/// Sign of the permutation sorting the tuple ascending.
inline double tuple_parity(const std::vector<int>& t) {
    int inversions = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] > t[j]) ++inversions;
    return inversions % 2 ? -1.0 : 1.0;
}

/// Value table of an equivariant alternating cochain: one row per ordered
/// tuple of the degree (lexicographic), one column per coefficient.
struct EquivariantCochain {
    int degree = 0;
    Eigen::MatrixXd values;
};

inline EquivariantCochain zero_cochain(const WeightedComplex& X, int k, int coeff_dim) {
    TupleTable T = tuple_table(X, k);
    return {k, Eigen::MatrixXd::Zero(static_cast<long>(T.tuples.size()), coeff_dim)};
}

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline void require_table_match(const TupleTable& T, const EquivariantCochain& a) {
    if (a.values.rows() != static_cast<long>(T.tuples.size()))
        throw validation_error("cochain value table does not match the complex",
                               std::to_string(a.values.rows()) + " rows for " +
                                   std::to_string(T.tuples.size()) + " tuples");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// inner products

inline double inner_product(const WeightedComplex& X, const GroupAction& G,
                            const EquivariantCochain& a, const EquivariantCochain& b) {
    if (a.degree != b.degree) throw validation_error("cochain degrees differ");
    if (a.values.cols() != b.values.cols())
        throw validation_error("cochain coefficient dimensions differ");
    TupleTable T = tuple_table(X, a.degree);
    detail::require_table_match(T, a);
    detail::require_table_match(T, b);
    double acc = 0.0;
    Simplex sorted;
    for (std::size_t i = 0; i < T.tuples.size(); ++i) {
        sorted = T.tuples[i];
        std::sort(sorted.begin(), sorted.end());
        acc += X.weightd(sorted) * a.values.row(static_cast<long>(i)).dot(b.values.row(static_cast<long>(i)));
    }
    return acc / (detail::factorial(a.degree + 1) * G.size());
}

inline double norm(const WeightedComplex& X, const GroupAction& G, const EquivariantCochain& a) {
    return std::sqrt(std::max(0.0, inner_product(X, G, a, a)));
}

/// Evaluates the inner product over a randomly chosen representative set,
/// exercising independence of the representative choice.
inline double inner_product_sampled(const WeightedComplex& X, const GroupAction& G,
                                    const EquivariantCochain& a, const EquivariantCochain& b,
                                    Rng& rng) {
    if (a.degree != b.degree) throw validation_error("cochain degrees differ");
    OrderedOrbitData O = ordered_orbit_data(X, G, a.degree);
    if (a.values.rows() != static_cast<long>(O.tuples.size()) ||
        b.values.rows() != static_cast<long>(O.tuples.size()))
        throw validation_error("cochain value table does not match the complex");
    std::vector<std::vector<long>> members(O.reps.size());
    for (std::size_t i = 0; i < O.tuples.size(); ++i)
        members[static_cast<std::size_t>(O.orbit_of[i])].push_back(static_cast<long>(i));
    double acc = 0.0;
    Simplex sorted;
    for (std::size_t o = 0; o < members.size(); ++o) {
        long pick = members[o][static_cast<std::size_t>(
            unif_int(rng, 0, static_cast<int>(members[o].size()) - 1))];
        sorted = O.tuples[static_cast<std::size_t>(pick)];
        std::sort(sorted.begin(), sorted.end());
        acc += X.weightd(sorted) / O.stab_order[o] * a.values.row(pick).dot(b.values.row(pick));
    }
    return acc / detail::factorial(a.degree + 1);
}

// ---------------------------------------------------------------------------
// coboundary and its adjoint

/// d a (s) = sum_i (-1)^i a(s with entry i removed), degree k -> k+1.
inline EquivariantCochain coboundary(const WeightedComplex& X, const EquivariantCochain& a) {
    TupleTable Tin = tuple_table(X, a.degree);
    detail::require_table_match(Tin, a);
    TupleTable Tout = tuple_table(X, a.degree + 1);
    EquivariantCochain out{a.degree + 1,
                           Eigen::MatrixXd::Zero(static_cast<long>(Tout.tuples.size()), a.values.cols())};
    std::vector<int> face;
    for (std::size_t i = 0; i < Tout.tuples.size(); ++i) {
        const auto& t = Tout.tuples[i];
        for (std::size_t drop = 0; drop < t.size(); ++drop) {
            face.clear();
            for (std::size_t j = 0; j < t.size(); ++j)
                if (j != drop) face.push_back(t[j]);
            double sgn = drop % 2 ? -1.0 : 1.0;
            out.values.row(static_cast<long>(i)) += sgn * a.values.row(Tin.at(face));
        }
    }
    return out;
}

/// delta a (s) = (-1)^k sum over link vertices y of m(s,y)/m(s) a((s,y)),
/// degree k -> k-1; the L2 adjoint of the coboundary.
inline EquivariantCochain coboundary_adjoint(const WeightedComplex& X, const EquivariantCochain& a) {
    if (a.degree < 1) throw validation_error("adjoint coboundary needs degree at least one");
    const int k = a.degree;
    TupleTable Tin = tuple_table(X, k);
    detail::require_table_match(Tin, a);
    TupleTable Tout = tuple_table(X, k - 1);
    EquivariantCochain out{k - 1,
                           Eigen::MatrixXd::Zero(static_cast<long>(Tout.tuples.size()), a.values.cols())};
    const auto& faces = X.simplices(k - 1);
    std::vector<LinkView> links;
    links.reserve(faces.size());
    for (const Simplex& s : faces) links.push_back(X.link(s));
    const double sgn = k % 2 ? -1.0 : 1.0;
    std::vector<int> ext;
    Simplex sorted;
    for (std::size_t i = 0; i < Tout.tuples.size(); ++i) {
        const auto& s = Tout.tuples[i];
        sorted = s;
        std::sort(sorted.begin(), sorted.end());
        long js = X.index_of(sorted);
        const LinkView& L = links[static_cast<std::size_t>(js)];
        double ms = X.weightd_by_index(k - 1, static_cast<int>(js));
        ext = s;
        ext.push_back(0);
        for (std::size_t y = 0; y < L.vertices.size(); ++y) {
            ext.back() = L.vertices[y];
            out.values.row(static_cast<long>(i)) +=
                (L.vertex_weight[y] / ms) * a.values.row(Tin.at(ext));
        }
        out.values.row(static_cast<long>(i)) *= sgn;
    }
    return out;
}

// ---------------------------------------------------------------------------
// invariant defects (structural for basis-built cochains, checkable for data)

inline double cochain_equivariance_defect(const WeightedComplex& X, const GroupAction& G,
                                          const Representation& rho, const EquivariantCochain& a) {
    TupleTable T = tuple_table(X, a.degree);
    detail::require_table_match(T, a);
    double worst = 0.0;
    for (const Perm& gen : G.generators()) {
        auto idx = G.index_of(gen);
        const Eigen::MatrixXd& R = rho.of(*idx);
        for (std::size_t i = 0; i < T.tuples.size(); ++i) {
            auto img = G.apply_tuple(*idx, T.tuples[i]);
            double defect = (a.values.row(T.at(img)).transpose() -
                             R * a.values.row(static_cast<long>(i)).transpose())
                                .cwiseAbs()
                                .maxCoeff();
            worst = std::max(worst, defect);
        }
    }
    return worst;
}

inline double cochain_antisymmetry_defect(const WeightedComplex& X, const EquivariantCochain& a) {
    TupleTable T = tuple_table(X, a.degree);
    detail::require_table_match(T, a);
    double worst = 0.0;
    std::vector<int> swapped;
    for (std::size_t i = 0; i < T.tuples.size(); ++i) {
        for (std::size_t p = 0; p + 1 < T.tuples[i].size(); ++p) {
            swapped = T.tuples[i];
            std::swap(swapped[p], swapped[p + 1]);
            double defect = (a.values.row(T.at(swapped)) + a.values.row(static_cast<long>(i)))
                                .cwiseAbs()
                                .maxCoeff();
            worst = std::max(worst, defect);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// bases of the equivariant cochain spaces

/// L2-orthonormal basis of C^k_rho(X).  One block per orbit of unordered
/// k-simplices: the admissible values at a representative form the fixed
/// space of the sign-twisted stabilizer average, and each fixed vector
/// extends equivariantly and alternately over the orbit.
struct CochainBasis {
    int degree = 0;
    int coeff_dim = 1;
    std::vector<EquivariantCochain> vectors;

    int dim() const { return static_cast<int>(vectors.size()); }
};

inline CochainBasis cochain_basis(const WeightedComplex& X, const GroupAction& G,
                                  const Representation& rho, int k) {
    if (k < 0 || k > X.dim())
        throw validation_error("cochain degree out of range", std::to_string(k));
    if (static_cast<int>(rho.mats.size()) != G.size())
        throw validation_error("representation does not match the action");
    CochainBasis B;
    B.degree = k;
    B.coeff_dim = rho.dim;
    TupleTable T = tuple_table(X, k);
    OrbitData od = orbit_data(X, G, k);
    const auto& simps = X.simplices(k);
    std::vector<std::vector<int>> members(od.reps.size());
    for (std::size_t j = 0; j < simps.size(); ++j)
        members[static_cast<std::size_t>(od.orbit_of[j])].push_back(static_cast<int>(j));

    for (std::size_t o = 0; o < od.reps.size(); ++o) {
        const Simplex& u = simps[static_cast<std::size_t>(od.reps[o])];
        auto stab = G.setwise_stabilizer(u);
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(rho.dim, rho.dim);
        for (int e : stab) P += tuple_parity(G.apply_tuple(e, u)) * rho.of(e);
        P /= static_cast<double>(stab.size());
        P = 0.5 * (P + P.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
        if (es.info() != Eigen::Success)
            throw validation_error("stabilizer projector eigensolve failed");
        for (int c = 0; c < rho.dim; ++c) {
            double ev = es.eigenvalues()[c];
            if (std::abs(ev) > 1e-8 && std::abs(ev - 1.0) > 1e-8)
                throw validation_error("stabilizer averaging did not produce a projector");
        }
        double scale = std::sqrt(static_cast<double>(stab.size()) /
                                 X.weightd_by_index(k, od.reps[o]));
        for (int c = 0; c < rho.dim; ++c) {
            if (es.eigenvalues()[c] < 0.5) continue;
            Eigen::VectorXd v = scale * es.eigenvectors().col(c);
            EquivariantCochain bc{k, Eigen::MatrixXd::Zero(static_cast<long>(T.tuples.size()), rho.dim)};
            for (int j : members[o]) {
                int g = od.transversal[static_cast<std::size_t>(j)];
                std::vector<int> w = G.apply_tuple(g, u);
                Eigen::VectorXd val = rho.of(g) * v;
                double sw = tuple_parity(w);
                Simplex t = simps[static_cast<std::size_t>(j)];
                do {
                    bc.values.row(T.at(t)) = (sw * tuple_parity(t)) * val.transpose();
                } while (std::next_permutation(t.begin(), t.end()));
            }
            B.vectors.push_back(std::move(bc));
        }
    }
    return B;
}

inline EquivariantCochain random_cochain(const WeightedComplex& X, const CochainBasis& B, Rng& rng) {
    EquivariantCochain out = zero_cochain(X, B.degree, B.coeff_dim);
    for (const auto& v : B.vectors) out.values += unif(rng, -1.0, 1.0) * v.values;
    return out;
}

inline EquivariantCochain random_cochain(const WeightedComplex& X, const GroupAction& G,
                                         const Representation& rho, int k, Rng& rng) {
    return random_cochain(X, cochain_basis(X, G, rho, k), rng);
}

// ---------------------------------------------------------------------------
// Laplacian

struct LaplacianOperator {
    int degree = 0;
    CochainBasis basis;
    Eigen::MatrixXd matrix;       ///< Delta = d delta + delta d in the orthonormal basis
    Eigen::VectorXd eigenvalues;  ///< ascending

    int kernel_dim(double tol = 1e-8) const {
        int n = 0;
        for (long i = 0; i < eigenvalues.size(); ++i)
            if (std::abs(eigenvalues[i]) <= tol) ++n;
        return n;
    }

    double min_eigenvalue() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
};

inline LaplacianOperator laplacian_matrix(const WeightedComplex& X, const GroupAction& G,
                                          const Representation& rho, int k) {
    LaplacianOperator L;
    L.degree = k;
    L.basis = cochain_basis(X, G, rho, k);
    const int n = L.basis.dim();
    L.matrix = Eigen::MatrixXd::Zero(n, n);
    std::vector<EquivariantCochain> ds, deltas;
    ds.reserve(static_cast<std::size_t>(n));
    for (const auto& v : L.basis.vectors) {
        ds.push_back(coboundary(X, v));
        if (k >= 1) deltas.push_back(coboundary_adjoint(X, v));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double m = inner_product(X, G, ds[static_cast<std::size_t>(i)],
                                     ds[static_cast<std::size_t>(j)]);
            if (k >= 1)
                m += inner_product(X, G, deltas[static_cast<std::size_t>(i)],
                                   deltas[static_cast<std::size_t>(j)]);
            L.matrix(i, j) = L.matrix(j, i) = m;
        }
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.matrix);
        if (es.info() != Eigen::Success)
            throw validation_error("laplacian eigensolve failed");
        L.eigenvalues = es.eigenvalues();
    }
    return L;
}

// ---------------------------------------------------------------------------
// Bochner identity

struct BochnerSides {
    double lhs = 0.0;  ///< ||d a||^2 + k/(k+1) ||delta a||^2
    double rhs = 0.0;  ///< link-wise energy minus k/(k+1) times the variance
};

/// Evaluates both sides of the degree-k Bochner identity.  Requires every
/// (k-1)- and k-simplex to lie in a higher simplex; otherwise the weighted
/// coface recursion behind the identity has no content and the call throws.
inline BochnerSides bochner_identity_check(const WeightedComplex& X, const GroupAction& G,
                                           const EquivariantCochain& a) {
    const int k = a.degree;
    if (k < 1 || k > X.dim())
        throw validation_error("bochner identity needs 1 <= degree <= dim", std::to_string(k));
    for (const Simplex& s : X.simplices(k - 1))
        if (X.is_maximal(s))
            throw validation_error("bochner identity needs nonempty links one level down",
                                   simplex_str(s));
    for (const Simplex& t : X.simplices(k))
        if (X.is_maximal(t))
            throw validation_error("bochner identity needs every degree-k simplex in a higher one",
                                   simplex_str(t));

    const double ratio = static_cast<double>(k) / (k + 1);
    EquivariantCochain da = coboundary(X, a);
    EquivariantCochain dta = coboundary_adjoint(X, a);
    BochnerSides out;
    out.lhs = inner_product(X, G, da, da) + ratio * inner_product(X, G, dta, dta);

    TupleTable T = tuple_table(X, k);
    detail::require_table_match(T, a);
    double acc = 0.0;
    std::vector<int> ext;
    Eigen::MatrixXd vals;
    for (const Simplex& s : X.simplices(k - 1)) {
        LinkView L = X.link(s);
        double ms = X.weightd(s);
        vals.resize(static_cast<long>(L.vertices.size()), a.values.cols());
        ext = s;
        ext.push_back(0);
        for (std::size_t y = 0; y < L.vertices.size(); ++y) {
            ext.back() = L.vertices[y];
            vals.row(static_cast<long>(y)) = a.values.row(T.at(ext));
        }
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(a.values.cols());
        for (std::size_t y = 0; y < L.vertices.size(); ++y)
            mean += L.vertex_weight[y] * vals.row(static_cast<long>(y));
        mean /= ms;
        double edge_energy = 0.0;
        for (std::size_t e = 0; e < L.edges.size(); ++e)
            edge_energy += L.edge_weight[e] *
                           (vals.row(L.edges[e][0]) - vals.row(L.edges[e][1])).squaredNorm();
        double variance = 0.0;
        for (std::size_t y = 0; y < L.vertices.size(); ++y)
            variance += L.vertex_weight[y] * (vals.row(static_cast<long>(y)) - mean).squaredNorm();
        acc += edge_energy - ratio * variance;
    }
    out.rhs = acc / G.size();
    return out;
}

// ---------------------------------------------------------------------------
// vanishing certificates

struct VanishingReport {
    int degree = 0;
    SpectralReport garland;
    SpectralReport zuk;
    bool certified = false;  ///< garland or zuk passed
    int dim_space = 0;       ///< dim C^k_rho(X)
    int kernel_dim = 0;
    double gap = 0.0;        ///< smallest assembled-Laplacian eigenvalue, as measured
    std::string note;
};

/// Evaluates the Garland and Zuk criteria for degree k and cross-checks a
/// passing certificate against the assembled Laplacian: a certified degree
/// must have an empty kernel, and the measured spectral gap is reported.
inline VanishingReport vanishing_certificate(const WeightedComplex& X, const GroupAction& G,
                                             const Representation& rho, int k) {
    if (k < 1 || k > X.dim())
        throw validation_error("vanishing certificate degree out of range", std::to_string(k));
    VanishingReport R;
    R.degree = k;
    Condition garland;
    garland.kind = ConditionKind::Garland;
    garland.k = k;
    Condition zuk;
    zuk.kind = ConditionKind::Zuk;
    zuk.k = k;
    R.garland = check_condition(X, G, garland);
    R.zuk = check_condition(X, G, zuk);
    R.certified = R.garland.pass || R.zuk.pass;

    LaplacianOperator L = laplacian_matrix(X, G, rho, k);
    R.dim_space = L.basis.dim();
    if (R.dim_space == 0) {
        R.gap = std::numeric_limits<double>::infinity();
        R.note = "equivariant cochain space is zero";
    } else {
        R.kernel_dim = L.kernel_dim();
        R.gap = L.min_eigenvalue();
    }
    if (R.certified && R.kernel_dim > 0)
        throw validation_error("spectral certificate contradicted by an assembled laplacian kernel");
    if (R.certified && R.note.empty())
        R.note = R.garland.pass ? "garland condition certifies vanishing"
                                : "zuk condition certifies vanishing";
    return R;
}

}  // namespace chm
