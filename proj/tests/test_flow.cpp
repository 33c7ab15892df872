#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "chm/buildings.hpp"
#include "chm/flow.hpp"
#include "chm/harmonic.hpp"

using namespace chm;

namespace {

Space tripod_pod() { return Space::pod(3); }

Space regular3_tree() {
    return Space::tree(std::make_shared<MetricGraphGeometry>(
        MetricGraphGeometry::uniform(regular_tree_graph(3, 2))));
}

std::shared_ptr<MetricGraphGeometry> heawood_geom() {
    return std::make_shared<MetricGraphGeometry>(
        MetricGraphGeometry::uniform(pg2_incidence_graph(2)));
}

WeightedComplex single_edge() { return build_complex({{0, 1}}); }

EquivariantMap random_map(const WeightedComplex& X, const GroupAction& G,
                          const TargetAction& rho, Rng& rng, double scale = 1.0) {
    OrbitData O = orbit_data(X, G, 0);
    std::vector<Point> vals;
    for (std::size_t i = 0; i < O.reps.size(); ++i)
        vals.push_back(random_point(rho.space, rng, scale));
    return equivariant_map(X, G, rho, std::move(vals));
}

EquivariantMap line_map(const WeightedComplex& X, const GroupAction& G, const TargetAction& rho,
                        const std::vector<double>& vals) {
    std::vector<Point> pts;
    for (double v : vals) pts.push_back(Point::euclidean(Eigen::VectorXd::Constant(1, v)));
    return equivariant_map(X, G, rho, pts);
}

}  // namespace

TEST_CASE("isometry validation and application") {
    Rng rng(7);

    SECTION("euclidean") {
        Space S = Space::euclidean(2);
        double a = 0.3;
        Eigen::MatrixXd Q(2, 2);
        Q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        Eigen::VectorXd b(2);
        b << 1.0, -2.0;
        Isometry g = Isometry::euclidean(Q, b);
        validate_isometry(S, g, rng);
        Point p = Point::euclidean(Eigen::Vector2d(1.0, 0.0));
        CHECK((apply_isometry(S, g, p).v - (Q.col(0) + b)).norm() == 0.0);

        Eigen::MatrixXd bad(2, 2);
        bad << 1.0, 1.0, 0.0, 1.0;
        CHECK_THROWS_AS(validate_isometry(S, Isometry::euclidean(bad, b), rng), validation_error);
    }

    SECTION("tree automorphisms") {
        auto geom = std::make_shared<MetricGraphGeometry>(
            4, std::vector<std::array<int, 2>>{{0, 1}, {0, 2}, {0, 3}},
            std::vector<double>{1.0, 1.0, 1.0});
        Space S = Space::tree(geom);
        Isometry rot = Isometry::graph_map(S, {0, 2, 3, 1});
        validate_isometry(S, rot, rng);
        Point p = Point::tree_at(GraphPoint::on(0, 0.4));
        Point q = apply_isometry(S, rot, p);
        CHECK(q.gp.edge == 1);
        CHECK(q.gp.offset == 0.4);

        CHECK_THROWS_AS(validate_isometry(S, Isometry::graph_map(S, {1, 0, 2, 3}), rng),
                        validation_error);

        auto uneven = std::make_shared<MetricGraphGeometry>(
            4, std::vector<std::array<int, 2>>{{0, 1}, {0, 2}, {0, 3}},
            std::vector<double>{1.0, 2.0, 1.0});
        Space U = Space::tree(uneven);
        CHECK_THROWS_WITH(validate_isometry(U, Isometry::graph_map(U, {0, 2, 1, 3}), rng),
                          Catch::Matchers::ContainsSubstring("edge lengths"));
    }

    SECTION("pod ray permutation") {
        Space S = Space::pod(3);
        Isometry g = Isometry::ray_map({1, 2, 0});
        validate_isometry(S, g, rng);
        Point q = apply_isometry(S, g, Point::pod_at(2, 1.5));
        CHECK(q.ray == 0);
        CHECK(q.r == 1.5);
        CHECK(apply_isometry(S, g, Point::pod_at(0, 0.0)).r == 0.0);
        CHECK_THROWS_AS(validate_isometry(S, Isometry::ray_map({0, 0, 1}), rng), validation_error);
    }

    SECTION("cone rotation with edge flips") {
        auto hex = std::make_shared<MetricGraphGeometry>(
            MetricGraphGeometry::uniform(cycle_graph(6, M_PI / 3.0)));
        Space S = Space::graph_cone(hex);
        Isometry rot = Isometry::graph_map(S, {1, 2, 3, 4, 5, 0});
        validate_isometry(S, rot, rng);
        Isometry refl = Isometry::graph_map(S, {0, 5, 4, 3, 2, 1});
        validate_isometry(S, refl, rng);
        for (int i = 0; i < 20; ++i) {
            Point p = random_point(S, rng), q = random_point(S, rng);
            double d = distance(S, p, q);
            CHECK(std::abs(distance(S, apply_isometry(S, rot, p), apply_isometry(S, rot, q)) - d) <=
                  1e-10);
        }
        CHECK(apply_isometry(S, rot, Point::cone_at(GraphPoint::at(0), 0.0)).is_apex());
    }

    SECTION("product isometries") {
        Space S = Space::product({Space::euclidean(1), Space::pod(3)});
        Isometry g = Isometry::product_of(
            {Isometry::euclidean(-Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)),
             Isometry::ray_map({2, 0, 1})});
        validate_isometry(S, g, rng);
        Point p = Point::product_of(
            {Point::euclidean(Eigen::VectorXd::Constant(1, 2.0)), Point::pod_at(0, 1.0)});
        Point q = apply_isometry(S, g, p);
        CHECK(q.parts[0].v[0] == -2.0);
        CHECK(q.parts[1].ray == 2);
    }
}

TEST_CASE("target actions extend generators as homomorphisms") {
    Rng rng(11);
    WeightedComplex X = octahedron_complex();
    GroupAction G = GroupAction::from_generators(X, {octahedron_antipodal()});
    Space S = Space::euclidean(3);

    SECTION("point reflection") {
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3))},
            rng);
        for (int a = 0; a < G.size(); ++a)
            for (int b = 0; b < G.size(); ++b) {
                Point p = random_point(S, rng);
                Point lhs = rho.apply(G.mul(a, b), p);
                Point rhs = rho.apply(a, rho.apply(b, p));
                CHECK(distance(S, lhs, rhs) <= 1e-12);
            }
    }

    SECTION("an order-4 isometry cannot represent an involution") {
        Eigen::MatrixXd Q(3, 3);
        Q << 0, -1, 0, 1, 0, 0, 0, 0, 1;
        CHECK_THROWS_WITH(TargetAction::from_generators(
                              S, G, {Isometry::euclidean(Q, Eigen::VectorXd::Zero(3))}, rng),
                          Catch::Matchers::ContainsSubstring("homomorphism"));
    }

    SECTION("generator count must match") {
        CHECK_THROWS_AS(TargetAction::from_generators(S, G, {}, rng), validation_error);
    }
}

TEST_CASE("equivariant maps: extension and stabilizer constraint") {
    Rng rng(13);
    WeightedComplex X = octahedron_complex();

    SECTION("antipodal extension") {
        GroupAction G = GroupAction::from_generators(X, {octahedron_antipodal()});
        Space S = Space::euclidean(3);
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3))},
            rng);
        EquivariantMap f = random_map(X, G, rho, rng);
        for (int v : {0, 2, 4})
            CHECK((f.at(v + 1).v + f.at(v).v).norm() == 0.0);
        CHECK(equivariance_defect(X, G, rho, f) <= 1e-12);
    }

    SECTION("stabilizer fixed-point violation is rejected") {
        // swap within the pairs (2,3) and (4,5); vertices 0 and 1 stay fixed
        GroupAction G = GroupAction::from_generators(X, {{0, 1, 3, 2, 5, 4}});
        Space S = Space::euclidean(1);
        Eigen::MatrixXd Q = -Eigen::MatrixXd::Identity(1, 1);
        TargetAction rho =
            TargetAction::from_generators(S, G, {Isometry::euclidean(Q, Eigen::VectorXd::Zero(1))},
                                          rng);
        OrbitData O = orbit_data(X, G, 0);
        REQUIRE(O.reps.size() == 4);
        std::vector<Point> vals(4, Point::euclidean(Eigen::VectorXd::Zero(1)));
        CHECK_NOTHROW(equivariant_map(X, G, rho, vals));
        vals[0] = Point::euclidean(Eigen::VectorXd::Constant(1, 1.0));
        CHECK_THROWS_WITH(equivariant_map(X, G, rho, vals),
                          Catch::Matchers::ContainsSubstring("stabilizer"));
    }

    SECTION("pod rotation pins the cone point of the complex to the origin") {
        WeightedComplex C = cone_over_graph(cycle_graph(3));
        GroupAction G = GroupAction::from_generators(C, {{1, 2, 0, 3}});
        Space S = Space::pod(3);
        TargetAction rho = TargetAction::from_generators(S, G, {Isometry::ray_map({1, 2, 0})}, rng);
        OrbitData O = orbit_data(C, G, 0);
        REQUIRE(O.reps.size() == 2);
        std::vector<Point> vals{Point::pod_at(0, 1.0), Point::pod_at(0, 0.0)};
        CHECK_NOTHROW(equivariant_map(C, G, rho, vals));
        vals[1] = Point::pod_at(0, 0.5);
        CHECK_THROWS_AS(equivariant_map(C, G, rho, vals), validation_error);
    }
}

TEST_CASE("energy fixtures") {
    Rng rng(17);

    SECTION("single edge into the line") {
        WeightedComplex X = single_edge();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(Space::euclidean(1), G);
        EquivariantMap f = line_map(X, G, rho, {0.0, 3.0});
        CHECK(energy(X, G, rho, f) == 9.0);
    }

    SECTION("octahedron coordinates") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(Space::euclidean(3), G);
        std::vector<Point> vals;
        for (int v = 0; v < 6; ++v) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
            x[v / 2] = v % 2 == 0 ? 1.0 : -1.0;
            vals.push_back(Point::euclidean(x));
        }
        EquivariantMap f = equivariant_map(X, G, rho, vals);
        double brute = 0.0;
        for (const Simplex& e : X.simplices(1))
            brute += X.weightd(e) * sq(distance(rho.space, f.at(e[0]), f.at(e[1])));
        CHECK(brute == Catch::Approx(48.0).margin(1e-12));
        CHECK(energy(X, G, rho, f) == Catch::Approx(48.0).margin(1e-12));
    }

    SECTION("constant maps have zero energy") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(tripod_pod(), G);
        EquivariantMap f = constant_map(X, G, rho, Point::pod_at(1, 0.7));
        CHECK(energy(X, G, rho, f) == 0.0);
    }

    SECTION("quotient energy under the antipodal action") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::from_generators(X, {octahedron_antipodal()});
        Space S = Space::euclidean(3);
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3))},
            rng);
        EquivariantMap f = random_map(X, G, rho, rng);
        double brute = 0.0;
        for (const Simplex& e : X.simplices(1))
            brute += X.weightd(e) * sq(distance(S, f.at(e[0]), f.at(e[1])));
        CHECK(energy(X, G, rho, f) == Catch::Approx(brute / 2.0).epsilon(1e-12));
    }

    SECTION("both forms agree on random maps into every target kind") {
        WeightedComplex X = cone_over_graph(pg2_incidence_graph(2));
        GroupAction G = GroupAction::trivial(X);
        std::vector<Space> targets{Space::euclidean(3), tripod_pod(), regular3_tree(),
                                   Space::graph_cone(heawood_geom()),
                                   Space::product({Space::euclidean(1), Space::pod(3)})};
        for (const Space& Y : targets) {
            TargetAction rho = TargetAction::trivial(Y, G);
            for (int t = 0; t < 5; ++t) {
                EquivariantMap f = random_map(X, G, rho, rng);
                EnergyBreakdown E = energy_breakdown(X, G, rho, f);
                CHECK(std::abs(E.edge_form - E.density_form) <=
                      1e-12 * std::max(1.0, E.edge_form));
            }
        }
    }
}

TEST_CASE("pushforward and the tension field") {
    Rng rng(19);

    SECTION("pushforward norms equal distances") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(regular3_tree(), G);
        EquivariantMap f = random_map(X, G, rho, rng);
        for (int x = 0; x < 6; ++x) {
            Pushforward P = pushforward(X, rho, f, x);
            Point origin = tangent_origin(P.cone);
            for (std::size_t j = 0; j < P.vertices.size(); ++j)
                CHECK(std::abs(distance(P.cone, origin, P.vectors[j]) -
                               distance(rho.space, f.at(x), f.at(P.vertices[j]))) <= 1e-10);
        }
    }

    SECTION("tree vertex pushforward picks the first geodesic edge") {
        WeightedComplex X = single_edge();
        GroupAction G = GroupAction::trivial(X);
        Space Y = regular3_tree();
        TargetAction rho = TargetAction::trivial(Y, G);
        std::vector<Point> vals{Point::tree_at(GraphPoint::at(0)),
                                Point::tree_at(GraphPoint::on(1, 0.5))};
        EquivariantMap f = equivariant_map(X, G, rho, vals);
        Pushforward P = pushforward(X, rho, f, 0);
        REQUIRE(P.cone.kind == SpaceKind::Pod);
        CHECK(P.vectors[0].ray == 1);
        CHECK(P.vectors[0].r == Catch::Approx(0.5));
    }

    SECTION("euclidean tension is the weighted mean of differences") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(Space::euclidean(2), G);
        EquivariantMap f = random_map(X, G, rho, rng);
        for (int x = 0; x < 6; ++x) {
            TensionVector t = minus_delta(X, rho, f, x);
            const LinkView& L = X.vertex_link(x);
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            double mx = X.weightd({x});
            for (std::size_t j = 0; j < L.vertices.size(); ++j)
                mean += L.vertex_weight[j] / mx * (f.at(L.vertices[j]).v - f.at(x).v);
            CHECK((t.value.v - mean).norm() <= 1e-12);
            CHECK(t.lemma27_gap <= 1e-12);
        }
    }

    SECTION("constant maps have zero tension everywhere") {
        WeightedComplex X = cone_over_graph(pg2_incidence_graph(2));
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(tripod_pod(), G);
        EquivariantMap f = constant_map(X, G, rho, Point::pod_at(2, 1.3));
        for (int x = 0; x < 15; ++x) {
            Residual r = residual_norm(X, rho, f, x);
            CHECK_FALSE(r.proxy);
            CHECK(r.value <= 1e-14);
        }
    }

    SECTION("lemma 2.7 cross-check on random maps") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        for (const Space& Y : {tripod_pod(), regular3_tree(),
                               Space::product({Space::euclidean(1), Space::pod(3)})}) {
            TargetAction rho = TargetAction::trivial(Y, G);
            for (int t = 0; t < 10; ++t) {
                EquivariantMap f = random_map(X, G, rho, rng);
                for (int x = 0; x < 6; ++x) {
                    TensionVector tv = minus_delta(X, rho, f, x);
                    CHECK(tv.lemma27_gap <= kTol.lemma27 * std::max(1.0, sq(tv.norm)));
                }
            }
        }
    }

    SECTION("identity-like map into the Heawood cone is balanced at the apex") {
        MetricGraph hw = pg2_incidence_graph(2);
        WeightedComplex X = cone_over_graph(hw);
        GroupAction G = GroupAction::trivial(X);
        Space Y = Space::graph_cone(heawood_geom());
        TargetAction rho = TargetAction::trivial(Y, G);
        std::vector<Point> vals;
        for (int v = 0; v < hw.n; ++v) vals.push_back(Point::cone_at(GraphPoint::at(v), 1.0));
        vals.push_back(Point::cone_at(GraphPoint::at(0), 0.0));
        EquivariantMap f = equivariant_map(X, G, rho, vals);
        Residual at_apex = residual_norm(X, rho, f, hw.n);
        CHECK_FALSE(at_apex.proxy);
        CHECK(at_apex.value <= 1e-12);
        // base vertices sit on the spine: the proxy fallback reports there
        Residual at_base = residual_norm(X, rho, f, 0);
        CHECK(at_base.proxy);
        CHECK(at_base.value == Catch::Approx(0.75).margin(1e-9));
    }
}

TEST_CASE("flow steps") {
    Rng rng(23);

    SECTION("single edge: Gauss-Seidel converges, Jacobi oscillates") {
        WeightedComplex X = single_edge();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(Space::euclidean(1), G);
        EquivariantMap f = line_map(X, G, rho, {0.0, 3.0});

        FlowStep gs = flow_step(X, G, rho, f, FlowConfig{1.0, false});
        CHECK(gs.energy_after == 0.0);
        CHECK(gs.f.at(0).v[0] == 3.0);
        CHECK(gs.f.at(1).v[0] == 3.0);

        FlowStep j = flow_step(X, G, rho, f, FlowConfig{1.0, true});
        CHECK(j.energy_after == 9.0);
        CHECK(j.f.at(0).v[0] == 3.0);
        CHECK(j.f.at(1).v[0] == 0.0);
        FlowStep j2 = flow_step(X, G, rho, j.f, FlowConfig{1.0, true});
        CHECK(j2.f.at(0).v[0] == 0.0);
        CHECK(j2.f.at(1).v[0] == 3.0);
    }

    SECTION("harmonic maps are fixed points") {
        WeightedComplex X = single_edge();
        GroupAction G = GroupAction::from_generators(X, {{1, 0}});
        Space S = Space::euclidean(1);
        Eigen::MatrixXd Q = -Eigen::MatrixXd::Identity(1, 1);
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(Q, Eigen::VectorXd::Constant(1, 1.0))}, rng);
        EquivariantMap f =
            equivariant_map(X, G, rho, {Point::euclidean(Eigen::VectorXd::Constant(1, 0.5))});
        CHECK(f.at(1).v[0] == 0.5);
        FlowStep st = flow_step(X, G, rho, f, FlowConfig{1.0, false});
        CHECK_FALSE(st.stalled);
        CHECK(st.f.at(0).v[0] == 0.5);
        CHECK(st.f.at(1).v[0] == 0.5);
    }

    SECTION("energy decreases strictly from a random start") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(tripod_pod(), G);
        EquivariantMap f = random_map(X, G, rho, rng);
        double e = energy(X, G, rho, f);
        for (int k = 0; k < 10; ++k) {
            FlowStep st = flow_step(X, G, rho, f, FlowConfig{0.8, false});
            CHECK(st.energy_after <= e);
            if (e > 1e-14) CHECK(st.energy_after < e);
            e = st.energy_after;
            f = st.f;
        }
    }

    SECTION("equivariance is preserved along the flow") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::from_generators(X, {octahedron_antipodal()});
        Space S = Space::euclidean(3);
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3))},
            rng);
        EquivariantMap f = random_map(X, G, rho, rng);
        for (int k = 0; k < 3; ++k) {
            f = flow_step(X, G, rho, f, FlowConfig{0.7, false}).f;
            CHECK(equivariance_defect(X, G, rho, f) <= 1e-10);
        }
    }
}

TEST_CASE("flow runs") {
    Rng rng(29);

    SECTION("constant start converges immediately") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(tripod_pod(), G);
        EquivariantMap f = constant_map(X, G, rho, Point::pod_at(0, 2.0));
        FlowReport rep = run_flow(X, G, rho, f);
        CHECK(rep.converged);
        CHECK(rep.steps == 0);
        CHECK(rep.energies.size() == 1);
        CHECK(rep.energies[0] == 0.0);
    }

    SECTION("cone-over-Heawood into flexible targets: geometric decay to zero") {
        WeightedComplex X = cone_over_graph(pg2_incidence_graph(2));
        GroupAction G = GroupAction::trivial(X);
        for (const Space& Y : {tripod_pod(), regular3_tree()}) {
            TargetAction rho = TargetAction::trivial(Y, G);
            for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
                Rng r(seed);
                EquivariantMap f = random_map(X, G, rho, r);
                RunConfig cfg;
                cfg.residual_tol = 0.0;
                FlowReport rep = run_flow(X, G, rho, f, cfg);
                INFO(Y.name() << " seed " << seed);
                CHECK(rep.converged);
                CHECK(rep.energies.back() < 1e-12);
                for (std::size_t k = 0; k + 1 < rep.energies.size(); ++k)
                    CHECK(rep.energies[k + 1] <= rep.energies[k]);
                CHECK(rep.decay_ratio < 1.0);
            }
        }
    }

    SECTION("antipodal octahedron with point reflection collapses to the origin") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::from_generators(X, {octahedron_antipodal()});
        Space S = Space::euclidean(3);
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3))},
            rng);
        EquivariantMap f = random_map(X, G, rho, rng);
        RunConfig cfg;
        cfg.energy_tol = 0.0;
        cfg.residual_tol = 0.0;
        cfg.max_steps = 50;
        FlowReport rep = run_flow(X, G, rho, f, cfg);
        for (int v = 0; v < 6; ++v) CHECK(rep.final_map.at(v).v.norm() <= 1e-10);
        CHECK(rep.witness_move <= 1e-10);
        for (std::size_t k = 0; k + 1 < rep.energies.size(); ++k)
            CHECK(rep.energies[k + 1] <= rep.energies[k]);
    }
}

TEST_CASE("bochner identities") {
    Rng rng(31);
    std::vector<WeightedComplex> domains;
    domains.push_back(octahedron_complex());
    domains.push_back(cone_over_graph(pg2_incidence_graph(2)));

    SECTION("euclidean targets: identities exact, curvature terms vanish") {
        for (const WeightedComplex& X : domains) {
            GroupAction G = GroupAction::trivial(X);
            TargetAction rho = TargetAction::trivial(Space::euclidean(3), G);
            for (int t = 0; t < 5; ++t) {
                EquivariantMap f = random_map(X, G, rho, rng);
                BochnerReport B = bochner_check(X, G, rho, f);
                CHECK(B.rel_gap1 <= kTol.bochner_map_rel);
                CHECK(B.rel_gap2 <= kTol.bochner_map_rel);
                CHECK(std::abs(B.third_total) <= 1e-9);
            }
        }
    }

    SECTION("tree and pod targets: identities with nonnegative curvature terms") {
        for (const WeightedComplex& X : domains) {
            GroupAction G = GroupAction::trivial(X);
            for (const Space& Y : {regular3_tree(), tripod_pod()}) {
                TargetAction rho = TargetAction::trivial(Y, G);
                for (int t = 0; t < 5; ++t) {
                    EquivariantMap f = random_map(X, G, rho, rng);
                    BochnerReport B = bochner_check(X, G, rho, f);
                    CHECK(B.rel_gap1 <= kTol.bochner_map_rel);
                    CHECK(B.rel_gap2 <= kTol.bochner_map_rel);
                    CHECK(B.third_min >= kTol.third_term_floor);
                    CHECK(B.third_total >= kTol.third_term_floor);
                }
            }
        }
    }

    SECTION("equivariant case") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::from_generators(X, {octahedron_antipodal()});
        Space S = Space::euclidean(2);
        TargetAction rho = TargetAction::from_generators(
            S, G, {Isometry::euclidean(-Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2))},
            rng);
        for (int t = 0; t < 5; ++t) {
            EquivariantMap f = random_map(X, G, rho, rng);
            BochnerReport B = bochner_check(X, G, rho, f);
            CHECK(B.rel_gap1 <= kTol.bochner_map_rel);
            CHECK(B.rel_gap2 <= kTol.bochner_map_rel);
        }
    }

    SECTION("constant maps make every term vanish") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(tripod_pod(), G);
        EquivariantMap f = constant_map(X, G, rho, Point::pod_at(1, 1.0));
        BochnerReport B = bochner_check(X, G, rho, f);
        CHECK(B.lhs1 == 0.0);
        CHECK(B.rhs1 == 0.0);
        CHECK(B.lhs2 == 0.0);
        CHECK(B.rhs2 == 0.0);
    }
}

TEST_CASE("gradient lower bound") {
    Rng rng(37);

    SECTION("single edge hand computation") {
        WeightedComplex X = single_edge();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(Space::euclidean(1), G);
        EquivariantMap f = line_map(X, G, rho, {0.0, 1.0});
        GradientCheck gc = gradient_estimate_check(X, G, rho, f, 2.0);
        CHECK(gc.lhs == 8.0);
        CHECK(gc.rhs == 8.0);
    }

    SECTION("octahedron into the line with C = mu1 = 1") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(Space::euclidean(1), G);
        for (int t = 0; t < 20; ++t) {
            EquivariantMap f = random_map(X, G, rho, rng);
            GradientCheck gc = gradient_estimate_check(X, G, rho, f, 1.0);
            CHECK(gc.lhs >= gc.rhs - kTol.gradient_slack);
        }
    }

    SECTION("flexible pod target with the same constant") {
        WeightedComplex X = octahedron_complex();
        GroupAction G = GroupAction::trivial(X);
        TargetAction rho = TargetAction::trivial(tripod_pod(), G);
        for (int t = 0; t < 20; ++t) {
            EquivariantMap f = random_map(X, G, rho, rng);
            GradientCheck gc = gradient_estimate_check(X, G, rho, f, 1.0);
            CHECK(gc.lhs >= gc.rhs - kTol.gradient_slack);
        }
    }
}

TEST_CASE("wang invariant estimation") {
    SECTION("flexible targets recover mu1") {
        WeightedComplex X = octahedron_complex();
        const LinkView& L = X.vertex_link(0);
        WangEstimate e2 = wang_lambda1_estimate(L, Space::euclidean(2),
                                                Point::euclidean(Eigen::Vector2d(0.3, -0.2)), 6, 5,
                                                0.0);
        CHECK(e2.mu1 == Catch::Approx(1.0).margin(1e-12));
        CHECK(std::abs(e2.value - e2.mu1) <= 2e-2);
        CHECK(e2.lower == Catch::Approx(e2.mu1));

        WangEstimate ep = wang_lambda1_estimate(L, Space::pod(3), Point::pod_at(0, 0.0), 6, 5, 0.0);
        CHECK(std::abs(ep.value - ep.mu1) <= 2e-2);
    }

    SECTION("heawood link into its own cone at the apex") {
        WeightedComplex X = cone_over_graph(pg2_incidence_graph(2));
        const LinkView& L = X.vertex_link(14);
        Space Y = Space::graph_cone(heawood_geom());
        Point apex = Point::cone_at(GraphPoint::at(0), 0.0);
        double delta_ub = (37.0 - 18.0 * std::sqrt(2.0)) / 28.0;
        WangEstimate w = wang_lambda1_estimate(L, Y, apex, 3, 7, delta_ub);
        double mu = 1.0 - std::sqrt(2.0) / 3.0;
        CHECK(w.mu1 == Catch::Approx(mu).margin(1e-11));
        CHECK(w.value <= w.mu1 + 1e-9);
        CHECK(w.value >= w.lower - 1e-9);
        CHECK(w.lower == Catch::Approx((1.0 - delta_ub) * mu).margin(1e-12));
    }

    SECTION("one-point links are rejected") {
        WeightedComplex X = build_complex({{0, 1}});
        CHECK_THROWS_WITH(
            wang_lambda1_estimate(X.vertex_link(0), Space::euclidean(2),
                                  Point::euclidean(Eigen::Vector2d::Zero()), 2, 1, 1.0),
            Catch::Matchers::ContainsSubstring("link too small"));
    }
}
