/**
 * @file test_complex_core.cpp
 * @brief Weighted complexes, admissibility, links, group actions, orbit sums.
 */

#include <catch2/catch_amalgamated.hpp>

#include "chm/group_action.hpp"
#include "chm/simplicial_complex.hpp"

using namespace chm;

namespace {

std::vector<Simplex> octahedron_maximal() {
    // vertices 0..5, opposite pairs (0,1), (2,3), (4,5)
    std::vector<Simplex> tris;
    for (int a : {0, 1})
        for (int b : {2, 3})
            for (int c : {4, 5}) tris.push_back({a, b, c});
    return tris;
}

}  // namespace

TEST_CASE("standard weight on a single triangle") {
    auto X = build_complex({{0, 1, 2}});
    REQUIRE(X.dim() == 2);
    REQUIRE(X.simplices(0).size() == 3);
    REQUIRE(X.simplices(1).size() == 3);
    REQUIRE(X.simplices(2).size() == 1);
    CHECK(X.weight({0, 1, 2}) == Rational(1));
    CHECK(X.weight({0, 1}) == Rational(1));
    CHECK(X.weight({0}) == Rational(2));
    CHECK(X.is_maximal({0, 1, 2}));
    CHECK_FALSE(X.is_maximal({0, 1}));
    CHECK_FALSE(X.admissibility_violation().has_value());
}

TEST_CASE("supplied maximal weight scales the recursion") {
    auto X = build_complex({{0, 1, 2}}, {{{0, 1, 2}, Rational(3)}});
    CHECK(X.weight({1, 2}) == Rational(3));
    CHECK(X.weight({2}) == Rational(6));
}

TEST_CASE("octahedron standard weights") {
    auto X = build_complex(octahedron_maximal());
    REQUIRE(X.simplices(2).size() == 8);
    REQUIRE(X.simplices(1).size() == 12);
    REQUIRE(X.simplices(0).size() == 6);
    CHECK(X.weight({0, 2}) == Rational(2));
    CHECK(X.weight({0}) == Rational(8));
    CHECK_FALSE(X.admissibility_violation().has_value());

    SECTION("vertex link is a 4-cycle with induced weights") {
        LinkView L = X.link({0});
        REQUIRE(L.vertices == std::vector<int>{2, 3, 4, 5});
        for (double w : L.vertex_weight) CHECK(w == 2.0);
        REQUIRE(L.edges.size() == 4);
        for (double w : L.edge_weight) CHECK(w == 1.0);
        CHECK(L.connected());
        for (const auto& a : L.adj) CHECK(a.size() == 2);
    }
    SECTION("edge link has two vertices and no edge") {
        LinkView L = X.link({0, 2});
        CHECK(L.vertices == std::vector<int>{4, 5});
        CHECK(L.edges.empty());
        CHECK_FALSE(L.connected());
    }
}

TEST_CASE("mixed-dimension maximality") {
    auto X = build_complex({{0, 1, 2}, {2, 3}});
    CHECK(X.is_maximal({2, 3}));
    CHECK(X.weight({2, 3}) == Rational(1));
    CHECK(X.weight({2}) == Rational(3));  // edges {0,2}, {1,2}, {2,3}
    CHECK_FALSE(X.admissibility_violation().has_value());
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(build_complex({{0, 0, 1}}), validation_error);
    CHECK_THROWS_AS(build_complex({{0, 1}, {2, 3}}), validation_error);  // disconnected
    CHECK_THROWS_AS(build_complex({}), validation_error);
    CHECK_THROWS_AS(build_complex({{-1, 2}}), validation_error);
    // weight on a non-maximal simplex
    CHECK_THROWS_AS(build_complex({{0, 1, 2}}, {{{0, 1}, Rational(2)}}), validation_error);
    // nonpositive weight
    CHECK_THROWS_AS(build_complex({{0, 1, 2}}, {{{0, 1, 2}, Rational(0)}}), validation_error);
}

TEST_CASE("closure cap") {
    Simplex big;
    for (int i = 0; i < 13; ++i) big.push_back(i);
    CHECK_THROWS_AS(build_complex({big}, {}, 1000), validation_error);
}

TEST_CASE("antipodal action on the octahedron") {
    auto X = build_complex(octahedron_maximal());
    Perm antipodal = {1, 0, 3, 2, 5, 4};
    auto G = GroupAction::from_generators(X, {antipodal});
    REQUIRE(G.size() == 2);
    CHECK(G.mul(1, 1) == 0);
    CHECK(G.inv(1) == 1);

    OrbitData O0 = orbit_data(X, G, 0);
    REQUIRE(O0.reps.size() == 3);
    for (int st : O0.stab_order) CHECK(st == 1);
    CHECK(orbit_partition_check(X, G, 0));

    OrbitData O2 = orbit_data(X, G, 2);
    CHECK(O2.reps.size() == 4);
    CHECK(orbit_partition_check(X, G, 2));

    SECTION("transversal maps representatives onto their orbits") {
        const auto& simps = X.simplices(2);
        for (std::size_t i = 0; i < simps.size(); ++i) {
            Simplex moved = G.apply(O2.transversal[i], simps[O2.reps[O2.orbit_of[i]]]);
            CHECK(moved == simps[i]);
        }
    }
}

TEST_CASE("cyclic action on the triangle") {
    auto X = build_complex({{0, 1, 2}});
    auto G = GroupAction::from_generators(X, {{1, 2, 0}});
    REQUIRE(G.size() == 3);

    OrbitData O2 = orbit_data(X, G, 2);
    REQUIRE(O2.reps.size() == 1);
    CHECK(O2.stab_order[0] == 3);  // setwise

    OrderedOrbitData T2 = ordered_orbit_data(X, G, 2);
    REQUIRE(T2.tuples.size() == 6);
    CHECK(T2.reps.size() == 2);  // even and odd orderings
    for (std::size_t r = 0; r < T2.reps.size(); ++r) CHECK(T2.stab_order[r] == 1);

    SECTION("generator words reproduce elements") {
        for (int e = 0; e < G.size(); ++e) {
            auto w = G.word(e);
            int acc = G.identity();
            for (int gi : w) acc = G.mul(acc, *G.index_of(G.generators()[gi]));
            CHECK(acc == e);
        }
    }
}

TEST_CASE("rejects non-automorphisms") {
    auto X = build_complex({{0, 1, 2}, {1, 2, 3}});
    // swapping 0 and 1 maps {1,2,3} onto the absent {0,2,3}
    CHECK_THROWS_AS(GroupAction::from_generators(X, {{1, 0, 2, 3}}), validation_error);
    // weight-breaking: same complex, uneven maximal weights, 0<->3 is simplicial but not isometric
    auto Y = build_complex({{0, 1, 2}, {1, 2, 3}},
                           {{{0, 1, 2}, Rational(1)}, {{1, 2, 3}, Rational(2)}});
    CHECK_THROWS_AS(GroupAction::from_generators(Y, {{3, 2, 1, 0}}), validation_error);
    CHECK_NOTHROW(GroupAction::from_generators(X, {{3, 2, 1, 0}}));
}

TEST_CASE("group closure cap") {
    Simplex big;
    for (int i = 0; i < 8; ++i) big.push_back(i);
    auto X = build_complex({big});
    // transposition + 8-cycle generate S8 (40320 > 10000)
    Perm cyc = {1, 2, 3, 4, 5, 6, 7, 0};
    Perm swp = {1, 0, 2, 3, 4, 5, 6, 7};
    CHECK_THROWS_AS(GroupAction::from_generators(X, {cyc, swp}), validation_error);
}

TEST_CASE("orbit sum identity, exact rational") {
    SECTION("triangle with rotation, psi = m, k=0, l=2") {
        auto X = build_complex({{0, 1, 2}});
        auto G = GroupAction::from_generators(X, {{1, 2, 0}});
        auto r = orbit_sum_check<Rational>(X, G, 0, 2, [&](const std::vector<int>& u) {
            Simplex s = u;
            std::sort(s.begin(), s.end());
            return X.weight(s);
        });
        CHECK(r.lhs == Rational(2));
        CHECK(r.rhs == Rational(2));
    }
    SECTION("octahedron with antipodal action, psi = m, k=0, l=1") {
        auto X = build_complex(octahedron_maximal());
        auto G = GroupAction::from_generators(X, {{1, 0, 3, 2, 5, 4}});
        auto r = orbit_sum_check<Rational>(X, G, 0, 1, [&](const std::vector<int>& u) {
            Simplex s = u;
            std::sort(s.begin(), s.end());
            return X.weight(s);
        });
        CHECK(r.lhs == r.rhs);
        CHECK(r.lhs == Rational(24));
    }
    SECTION("float mode with an orbit-dependent psi") {
        auto X = build_complex(octahedron_maximal());
        auto G = GroupAction::from_generators(X, {{1, 0, 3, 2, 5, 4}});
        OrderedOrbitData O = ordered_orbit_data(X, G, 2);
        auto r = orbit_sum_check<double>(X, G, 1, 2, [&](const std::vector<int>& u) {
            return 0.25 + 1.75 * O.orbit_of[O.tuple_index.at(u)];
        });
        CHECK(r.lhs == Catch::Approx(r.rhs).epsilon(1e-12));
    }
    SECTION("non-invariant psi is rejected") {
        auto X = build_complex({{0, 1, 2}});
        auto G = GroupAction::from_generators(X, {{1, 2, 0}});
        auto bad = [](const std::vector<int>& u) { return static_cast<double>(u[0]); };
        CHECK_THROWS_AS((orbit_sum_check<double>(X, G, 0, 1, bad)), validation_error);
    }
}

TEST_CASE("vertex link cache consistency") {
    auto X = build_complex(octahedron_maximal());
    const LinkView& a = X.vertex_link(0);
    const LinkView& b = X.vertex_link(0);
    CHECK(&a == &b);
    CHECK(a.vertices.size() == 4);
}
