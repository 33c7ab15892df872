#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chm/buildings.hpp"
#include "chm/cochain_calculus.hpp"

using namespace chm;

namespace {

WeightedComplex octahedron() {
    return build_complex({{0, 2, 4}, {0, 2, 5}, {0, 3, 4}, {0, 3, 5},
                          {1, 2, 4}, {1, 2, 5}, {1, 3, 4}, {1, 3, 5}});
}

WeightedComplex full_triangle() { return build_complex({{0, 1, 2}}); }

WeightedComplex simplex4_boundary() {
    return build_complex({{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 3, 4}, {0, 2, 3, 4}, {1, 2, 3, 4}});
}

WeightedComplex edge_join_hexagon() {
    return build_complex({{0, 1, 2, 3}, {0, 1, 3, 4}, {0, 1, 4, 5},
                          {0, 1, 5, 6}, {0, 1, 6, 7}, {0, 1, 2, 7}});
}

WeightedComplex heawood_cone_complex() {
    MetricGraph g = pg2_incidence_graph(2);
    std::vector<Simplex> tris;
    for (const auto& e : g.edges) tris.push_back({e[0], e[1], 14});
    return build_complex(tris);
}

Eigen::MatrixXd rotation2(double angle) {
    Eigen::MatrixXd R(2, 2);
    R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return R;
}

GroupAction triangle_z3(const WeightedComplex& X) {
    return GroupAction::from_generators(X, {{1, 2, 0}});
}

GroupAction octahedron_rotations(const WeightedComplex& X) {
    return GroupAction::from_generators(X, {{2, 3, 1, 0, 4, 5}, {0, 1, 4, 5, 3, 2}});
}

Representation octahedron_geometric(const GroupAction& G) {
    Eigen::MatrixXd Rz(3, 3), Rx(3, 3);
    Rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    Rx << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    return make_representation(G, {Rz, Rx});
}

GroupAction hexagon_z6(const WeightedComplex& X) {
    return GroupAction::from_generators(X, {{0, 1, 3, 4, 5, 6, 7, 2}});
}

EquivariantCochain constant_zero_cochain(const WeightedComplex& X, const Eigen::VectorXd& c) {
    EquivariantCochain a = zero_cochain(X, 0, static_cast<int>(c.size()));
    for (long i = 0; i < a.values.rows(); ++i) a.values.row(i) = c.transpose();
    return a;
}

}  // namespace

TEST_CASE("representations extend generators and validate") {
    WeightedComplex X = full_triangle();
    GroupAction G = triangle_z3(X);
    REQUIRE(G.size() == 3);

    Representation rho = make_representation(G, {rotation2(2.0 * M_PI / 3.0)});
    CHECK(rho.dim == 2);
    CHECK(rho.mats.size() == 3);
    for (int a = 0; a < 3; ++a) {
        CHECK((rho.of(a).transpose() * rho.of(a) - Eigen::MatrixXd::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        for (int b = 0; b < 3; ++b)
            CHECK((rho.of(G.mul(a, b)) - rho.of(a) * rho.of(b)).cwiseAbs().maxCoeff() <= 1e-12);
    }

    Representation triv = Representation::trivial(G, 4);
    CHECK(triv.dim == 4);
    CHECK(triv.of(2).isIdentity(0.0));

    Eigen::MatrixXd shear(2, 2);
    shear << 1, 1, 0, 1;
    CHECK_THROWS_WITH(make_representation(G, {shear}),
                      Catch::Matchers::ContainsSubstring("orthogonal"));
    CHECK_THROWS_WITH(make_representation(G, {rotation2(M_PI / 2.0)}),
                      Catch::Matchers::ContainsSubstring("relations"));
    CHECK_THROWS_AS(make_representation(G, {}), validation_error);
}

TEST_CASE("inner products reproduce hand sums and ignore representative choice") {
    SECTION("weighted vertex sum on the full triangle") {
        WeightedComplex X = full_triangle();
        GroupAction G = GroupAction::trivial(X);
        EquivariantCochain one = constant_zero_cochain(X, Eigen::VectorXd::Ones(1));
        CHECK(inner_product(X, G, one, one) == Catch::Approx(6.0).margin(1e-12));
        CHECK(norm(X, G, one) == Catch::Approx(std::sqrt(6.0)).margin(1e-12));

        EquivariantCochain zero = zero_cochain(X, 0, 1);
        CHECK(inner_product(X, G, one, zero) == 0.0);

        EquivariantCochain edge = zero_cochain(X, 1, 1);
        CHECK_THROWS_WITH(inner_product(X, G, one, edge),
                          Catch::Matchers::ContainsSubstring("degrees differ"));
    }

    SECTION("representative re-randomization") {
        WeightedComplex X = octahedron();
        GroupAction G = octahedron_rotations(X);
        REQUIRE(G.size() == 24);
        Representation rho = octahedron_geometric(G);
        Rng rng(17);
        EquivariantCochain a = random_cochain(X, G, rho, 1, rng);
        EquivariantCochain b = random_cochain(X, G, rho, 1, rng);
        double exact = inner_product(X, G, a, b);
        for (unsigned seed = 0; seed < 5; ++seed) {
            Rng pick(100 + seed);
            CHECK(inner_product_sampled(X, G, a, b, pick) ==
                  Catch::Approx(exact).margin(1e-12));
        }
    }
}

TEST_CASE("coboundary and adjoint formulas") {
    SECTION("coboundary of a constant vanishes") {
        WeightedComplex X = octahedron();
        Eigen::VectorXd c(3);
        c << 0.3, -1.2, 2.0;
        EquivariantCochain f = constant_zero_cochain(X, c);
        EquivariantCochain df = coboundary(X, f);
        CHECK(df.degree == 1);
        CHECK(df.values.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("adjoint on the edge indicator of a triangle") {
        WeightedComplex X = full_triangle();
        EquivariantCochain a = zero_cochain(X, 1, 1);
        TupleTable T = tuple_table(X, 1);
        a.values(T.at({0, 1}), 0) = 1.0;
        a.values(T.at({1, 0}), 0) = -1.0;
        EquivariantCochain da = coboundary_adjoint(X, a);
        TupleTable T0 = tuple_table(X, 0);
        CHECK(da.values(T0.at({0}), 0) == Catch::Approx(-0.5).margin(1e-15));
        CHECK(da.values(T0.at({1}), 0) == Catch::Approx(0.5).margin(1e-15));
        CHECK(da.values(T0.at({2}), 0) == 0.0);

        CHECK_THROWS_WITH(coboundary_adjoint(X, zero_cochain(X, 0, 1)),
                          Catch::Matchers::ContainsSubstring("degree at least one"));
    }

    SECTION("adjointness, composition laws and the operator norm bound") {
        struct Fixture {
            WeightedComplex X;
            GroupAction G;
            Representation rho;
        };
        std::vector<Fixture> fixtures;
        {
            WeightedComplex X = octahedron();
            GroupAction G = GroupAction::trivial(X);
            fixtures.push_back({X, G, Representation::trivial(G, 1)});
        }
        {
            WeightedComplex X = octahedron();
            GroupAction G = octahedron_rotations(X);
            Representation rho = octahedron_geometric(G);
            fixtures.push_back({std::move(X), std::move(G), std::move(rho)});
        }
        {
            WeightedComplex X = simplex4_boundary();
            GroupAction G = GroupAction::trivial(X);
            fixtures.push_back({X, G, Representation::trivial(G, 2)});
        }
        {
            WeightedComplex X = edge_join_hexagon();
            GroupAction G = hexagon_z6(X);
            Representation rho = make_representation(G, {rotation2(M_PI / 3.0)});
            fixtures.push_back({std::move(X), std::move(G), std::move(rho)});
        }
        {
            WeightedComplex X = full_triangle();
            GroupAction G = triangle_z3(X);
            Representation rho = make_representation(G, {rotation2(2.0 * M_PI / 3.0)});
            fixtures.push_back({std::move(X), std::move(G), std::move(rho)});
        }

        Rng rng(2718);
        for (const auto& F : fixtures) {
            for (int k = 1; k <= F.X.dim(); ++k) {
                EquivariantCochain alpha = random_cochain(F.X, F.G, F.rho, k, rng);
                EquivariantCochain beta = random_cochain(F.X, F.G, F.rho, k - 1, rng);
                double lhs = inner_product(F.X, F.G, alpha, coboundary(F.X, beta));
                double rhs = inner_product(F.X, F.G, coboundary_adjoint(F.X, alpha), beta);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));

                double nb2 = inner_product(F.X, F.G, beta, beta);
                EquivariantCochain db = coboundary(F.X, beta);
                double ndb2 = inner_product(F.X, F.G, db, db);
                CHECK(ndb2 <= (k + 1) * nb2 + 1e-10 * (1.0 + nb2));

                EquivariantCochain ddb = coboundary(F.X, db);
                double scale = 1.0 + (db.values.size() ? db.values.cwiseAbs().maxCoeff() : 0.0);
                if (ddb.values.size())
                    CHECK(ddb.values.cwiseAbs().maxCoeff() <= 1e-12 * scale);

                if (k >= 2) {
                    EquivariantCochain dd = coboundary_adjoint(F.X, coboundary_adjoint(F.X, alpha));
                    CHECK(dd.values.cwiseAbs().maxCoeff() <=
                          1e-12 * (1.0 + alpha.values.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
}

TEST_CASE("bases respect stabilizer sign constraints") {
    SECTION("octahedron under its rotation group") {
        WeightedComplex X = octahedron();
        GroupAction R = octahedron_rotations(X);
        Representation geo = octahedron_geometric(R);
        GroupAction T = GroupAction::trivial(X);

        CHECK(cochain_basis(X, T, Representation::trivial(T, 1), 1).dim() == 12);
        CHECK(cochain_basis(X, R, Representation::trivial(R, 1), 1).dim() == 0);
        CHECK(cochain_basis(X, R, geo, 0).dim() == 1);
        CHECK(cochain_basis(X, R, geo, 1).dim() == 2);
        CHECK(cochain_basis(X, R, geo, 2).dim() == 1);

        CochainBasis B = cochain_basis(X, R, geo, 1);
        for (int i = 0; i < B.dim(); ++i) {
            CHECK(cochain_equivariance_defect(X, R, geo, B.vectors[i]) <= 1e-12);
            CHECK(cochain_antisymmetry_defect(X, B.vectors[i]) <= 1e-12);
            for (int j = 0; j < B.dim(); ++j)
                CHECK(inner_product(X, R, B.vectors[i], B.vectors[j]) ==
                      Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
        }

        Rng rng(5);
        EquivariantCochain mix = random_cochain(X, R, geo, 2, rng);
        CHECK(cochain_equivariance_defect(X, R, geo, mix) <= 1e-12);
        CHECK(cochain_antisymmetry_defect(X, mix) <= 1e-12);
    }

    SECTION("triangle with the rotation character") {
        WeightedComplex X = full_triangle();
        GroupAction G = triangle_z3(X);
        Representation rho = make_representation(G, {rotation2(2.0 * M_PI / 3.0)});
        CHECK(cochain_basis(X, G, rho, 0).dim() == 2);
        CHECK(cochain_basis(X, G, rho, 1).dim() == 2);
        CHECK(cochain_basis(X, G, rho, 2).dim() == 0);
        CHECK_THROWS_AS(cochain_basis(X, G, rho, 3), validation_error);
    }
}

TEST_CASE("laplacian kernels match cohomology") {
    SECTION("octahedron with scalar coefficients") {
        WeightedComplex X = octahedron();
        GroupAction G = GroupAction::trivial(X);
        Representation rho = Representation::trivial(G, 1);
        LaplacianOperator L0 = laplacian_matrix(X, G, rho, 0);
        CHECK(L0.basis.dim() == 6);
        CHECK(L0.kernel_dim() == 1);
        LaplacianOperator L1 = laplacian_matrix(X, G, rho, 1);
        CHECK(L1.basis.dim() == 12);
        CHECK(L1.kernel_dim() == 0);
        LaplacianOperator L2 = laplacian_matrix(X, G, rho, 2);
        CHECK(L2.basis.dim() == 8);
        CHECK(L2.kernel_dim() == 1);
        for (const auto* L : {&L0, &L1, &L2}) {
            CHECK(L->min_eigenvalue() >= -1e-10);
            CHECK((L->matrix - L->matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    SECTION("boundary of the 4-simplex") {
        WeightedComplex X = simplex4_boundary();
        GroupAction G = GroupAction::trivial(X);
        Representation rho = Representation::trivial(G, 1);
        CHECK(laplacian_matrix(X, G, rho, 1).kernel_dim() == 0);
        CHECK(laplacian_matrix(X, G, rho, 2).kernel_dim() == 0);
        CHECK(laplacian_matrix(X, G, rho, 3).kernel_dim() == 1);
    }

    SECTION("equivariant coefficients kill the kernel") {
        WeightedComplex X = full_triangle();
        GroupAction G = triangle_z3(X);
        Representation rho = make_representation(G, {rotation2(2.0 * M_PI / 3.0)});
        LaplacianOperator L0 = laplacian_matrix(X, G, rho, 0);
        CHECK(L0.kernel_dim() == 0);
        LaplacianOperator L1 = laplacian_matrix(X, G, rho, 1);
        CHECK(L1.basis.dim() == 2);
        CHECK(L1.kernel_dim() == 0);

        WeightedComplex O = octahedron();
        GroupAction R = octahedron_rotations(O);
        Representation geo = octahedron_geometric(R);
        CHECK(laplacian_matrix(O, R, geo, 1).kernel_dim() == 0);
        LaplacianOperator L2 = laplacian_matrix(O, R, geo, 2);
        CHECK(L2.basis.dim() == 1);
        CHECK(L2.kernel_dim() == 0);
        CHECK(L2.min_eigenvalue() > 0.1);
    }
}

TEST_CASE("bochner identity on random equivariant cochains") {
    struct Run {
        WeightedComplex X;
        GroupAction G;
        Representation rho;
        std::vector<int> degrees;
    };
    std::vector<Run> runs;
    {
        WeightedComplex X = octahedron();
        GroupAction G = GroupAction::trivial(X);
        runs.push_back({X, G, Representation::trivial(G, 1), {1}});
    }
    {
        WeightedComplex X = octahedron();
        GroupAction G = octahedron_rotations(X);
        Representation rho = octahedron_geometric(G);
        runs.push_back({std::move(X), std::move(G), std::move(rho), {1}});
    }
    {
        WeightedComplex X = simplex4_boundary();
        GroupAction G = GroupAction::trivial(X);
        runs.push_back({X, G, Representation::trivial(G, 3), {1, 2}});
    }
    {
        WeightedComplex X = edge_join_hexagon();
        GroupAction G = hexagon_z6(X);
        Representation rho = make_representation(G, {rotation2(M_PI / 3.0)});
        runs.push_back({std::move(X), std::move(G), std::move(rho), {1, 2}});
    }
    {
        WeightedComplex X = full_triangle();
        GroupAction G = triangle_z3(X);
        Representation rho = make_representation(G, {rotation2(2.0 * M_PI / 3.0)});
        runs.push_back({std::move(X), std::move(G), std::move(rho), {1}});
    }

    Rng rng(31415);
    for (const auto& run : runs)
        for (int k : run.degrees) {
            CochainBasis B = cochain_basis(run.X, run.G, run.rho, k);
            for (int rep = 0; rep < 6; ++rep) {
                EquivariantCochain a = random_cochain(run.X, B, rng);
                BochnerSides sides = bochner_identity_check(run.X, run.G, a);
                CHECK(std::abs(sides.lhs - sides.rhs) <= 1e-10 * (1.0 + std::abs(sides.lhs)));
            }
        }

    SECTION("zero cochain and precondition failures") {
        WeightedComplex X = octahedron();
        GroupAction G = GroupAction::trivial(X);
        BochnerSides z = bochner_identity_check(X, G, zero_cochain(X, 1, 1));
        CHECK(z.lhs == 0.0);
        CHECK(z.rhs == 0.0);
        CHECK_THROWS_WITH(bochner_identity_check(X, G, zero_cochain(X, 2, 1)),
                          Catch::Matchers::ContainsSubstring("higher"));
        WeightedComplex S = simplex4_boundary();
        CHECK_THROWS_AS(bochner_identity_check(S, G, zero_cochain(S, 3, 1)), validation_error);
    }
}

TEST_CASE("vanishing certificates") {
    SECTION("octahedron links give the full garland margin") {
        WeightedComplex X = octahedron();
        GroupAction G = octahedron_rotations(X);
        Representation rho = octahedron_geometric(G);
        VanishingReport R = vanishing_certificate(X, G, rho, 1);
        CHECK(R.garland.pass);
        for (const auto& e : R.garland.entries) CHECK(e.value == Catch::Approx(1.0).margin(1e-9));
        CHECK(R.certified);
        CHECK(R.kernel_dim == 0);
        CHECK(R.dim_space == 2);
        CHECK(R.gap > 0.0);
    }

    SECTION("cone over the heawood graph") {
        WeightedComplex X = heawood_cone_complex();
        GroupAction G = GroupAction::trivial(X);
        Representation rho = Representation::trivial(G, 1);
        VanishingReport R = vanishing_certificate(X, G, rho, 1);
        CHECK(R.garland.pass);
        double min_mu = 2.0;
        for (const auto& e : R.garland.entries) min_mu = std::min(min_mu, e.value);
        CHECK(min_mu == Catch::Approx(1.0 - std::sqrt(2.0) / 3.0).margin(1e-9));
        CHECK(R.certified);
        CHECK(R.dim_space == 35);
        CHECK(R.kernel_dim == 0);
        CHECK(R.gap > 0.0);
    }

    SECTION("hexagon join fails garland in degree two but zuk rescues it") {
        WeightedComplex X = edge_join_hexagon();
        GroupAction G = hexagon_z6(X);
        Representation rho = make_representation(G, {rotation2(M_PI / 3.0)});
        VanishingReport R = vanishing_certificate(X, G, rho, 2);
        CHECK_FALSE(R.garland.pass);
        bool saw_hex_link = false;
        for (const auto& e : R.garland.entries)
            if (e.simplex == Simplex{0, 1}) {
                saw_hex_link = true;
                CHECK(e.value == Catch::Approx(0.5).margin(1e-9));
                CHECK_FALSE(e.pass);
            }
        CHECK(saw_hex_link);
        CHECK(R.zuk.pass);
        for (const auto& e : R.zuk.entries) CHECK(e.value >= 2.5 - 1e-9);
        CHECK(R.certified);
        CHECK(R.kernel_dim == 0);
        CHECK(R.note == "zuk condition certifies vanishing");
    }

    SECTION("certificates are withheld on the sphere in top degree") {
        WeightedComplex X = octahedron();
        GroupAction G = GroupAction::trivial(X);
        Representation rho = Representation::trivial(G, 1);
        VanishingReport R = vanishing_certificate(X, G, rho, 2);
        CHECK_FALSE(R.garland.pass);
        CHECK_FALSE(R.zuk.pass);
        CHECK_FALSE(R.certified);
        CHECK(R.kernel_dim == 1);
        CHECK_THROWS_AS(vanishing_certificate(X, G, rho, 3), validation_error);
    }
}
