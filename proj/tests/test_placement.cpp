#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gridlat/error.hpp"
#include "gridlat/placement.hpp"
#include "gridlat/poly.hpp"
#include "gridlat/quantile.hpp"
#include "gridlat/spectral.hpp"
#include "testing.hpp"

using namespace gridlat;

TEST_CASE("polynomial helpers") {
    SUBCASE("convolution multiplies coefficient vectors") {
        Eigen::VectorXd a(2), b(2);
        a << 1.0, 1.0;  // 1 + s
        b << 2.0, 1.0;  // 2 + s
        const Eigen::VectorXd c = conv(a, b);
        REQUIRE(c.size() == 3);
        CHECK(c[0] == doctest::Approx(2.0));
        CHECK(c[1] == doctest::Approx(3.0));
        CHECK(c[2] == doctest::Approx(1.0));
    }
    SUBCASE("evaluation, full and monic") {
        Eigen::VectorXd full(3);
        full << 5.0, 2.0, 1.0;  // s^2 + 2 s + 5
        CHECK(std::abs(poly_eval(full, Complex(-1.0, 2.0))) < 1e-14);
        Eigen::VectorXd low(2);
        low << 5.0, 2.0;
        CHECK(std::abs(poly_eval_monic(low, Complex(-1.0, 2.0))) < 1e-14);
        CHECK(poly_eval_monic(low, Complex(1.0, 0.0)).real() == doctest::Approx(8.0));
    }
    SUBCASE("coefficients from conjugate-closed roots") {
        const Eigen::VectorXd p = poly_from_roots({{-1.0, 2.0}, {-1.0, -2.0}});
        REQUIRE(p.size() == 3);
        CHECK(p[0] == doctest::Approx(5.0));
        CHECK(p[1] == doctest::Approx(2.0));
        CHECK(p[2] == doctest::Approx(1.0));
    }
    SUBCASE("characteristic polynomial of a companion form") {
        Eigen::VectorXd low(3);
        low << 6.0, 11.0, 6.0;  // (s+1)(s+2)(s+3)
        const Eigen::MatrixXd C = companion_matrix(low);
        const Eigen::VectorXd back = char_poly(C);
        REQUIRE(back.size() == 3);
        for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(low[i]).epsilon(1e-10));
    }
    SUBCASE("roots round trip") {
        Eigen::VectorXd low(4);
        low << 10.0, 17.0, 8.0, 2.0;
        const auto roots = roots_of_monic(low);
        REQUIRE(roots.size() == 4);
        for (Complex r : roots) CHECK(std::abs(poly_eval_monic(low, r)) < 1e-10);
    }
    SUBCASE("random spectra survive char_poly") {
        std::mt19937_64 gen(3);
        for (int trial = 0; trial < 20; ++trial) {
            const auto targets = testutil::separated_targets(5, gen);
            const Eigen::VectorXd full = poly_from_roots(targets);
            const Eigen::MatrixXd C = companion_matrix(full.head(5));
            const Eigen::VectorXd low = char_poly(C);
            for (int i = 0; i < 5; ++i) CHECK(low[i] == doctest::Approx(full[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("controllability matrix stacks the Krylov sequence") {
    std::mt19937_64 gen(5);
    const Eigen::MatrixXd A = testutil::random_matrix(4, 4, gen);
    const Eigen::VectorXd B = testutil::random_vector(4, gen);
    const Eigen::MatrixXd Mc = controllability_matrix(A, B);
    CHECK((Mc.col(0) - B).norm() == 0.0);
    CHECK((Mc.col(1) - A * B).norm() < 1e-14);
    CHECK((Mc.col(3) - A * A * A * B).norm() < 1e-12);
    CHECK_THROWS_AS((void)controllability_matrix(A, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("numerical rank on constructed matrices") {
    std::mt19937_64 gen(6);
    const Eigen::MatrixXd Q = testutil::random_orthogonal(6, gen);
    Eigen::VectorXd sv(6);
    sv << 10.0, 5.0, 1.0, 1e-3, 0.0, 0.0;
    const Eigen::MatrixXd M = Q * sv.asDiagonal() * testutil::random_orthogonal(6, gen);
    CHECK(numerical_rank(M) == 4);
    CHECK(numerical_rank(Eigen::MatrixXd::Zero(3, 3)) == 0);
    CHECK(numerical_rank(Eigen::MatrixXd::Identity(5, 5)) == 5);
}

TEST_CASE("hankel layout of the open-loop coefficients") {
    Eigen::VectorXd o(3);
    o << 7.0, 8.0, 9.0;
    const Eigen::MatrixXd W = hankel_from_charpoly(o);
    Eigen::MatrixXd expect(3, 3);
    expect << 8.0, 9.0, 1.0, 9.0, 1.0, 0.0, 1.0, 0.0, 0.0;
    CHECK((W - expect).cwiseAbs().maxCoeff() == 0.0);
    // Unit antidiagonal makes it invertible regardless of o.
    CHECK(std::abs(W.determinant()) == doctest::Approx(1.0));
}

TEST_CASE("closed-loop coefficients are affine in the gain") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(gen() % 4);
        Eigen::MatrixXd A;
        Eigen::VectorXd B;
        testutil::random_controllable(n, gen, A, B);

        const Eigen::VectorXd o = char_poly(A);
        const Eigen::MatrixXd G = hankel_from_charpoly(o) * controllability_matrix(A, B).transpose();

        const Eigen::VectorXd g = testutil::random_vector(n, gen);
        const Eigen::VectorXd p = char_poly(A + B * g.transpose());
        const Eigen::VectorXd predicted = o - G * g;
        const double scale = 1.0 + predicted.cwiseAbs().maxCoeff();
        CHECK((p - predicted).cwiseAbs().maxCoeff() < 1e-8 * scale);
    }
}

TEST_CASE("residual factor maps invert polynomial division") {
    std::mt19937_64 gen(9);
    const int n = 6, m = 2;
    const Eigen::VectorXd a_full = poly_from_roots({{-1.0, 2.0}, {-1.0, -2.0}});
    const Eigen::VectorXd a_low = a_full.head(m);

    Eigen::VectorXd r_full(n - m + 1);
    r_full << 3.0, -1.0, 2.0, 0.5, 1.0;  // monic degree 4

    const Eigen::VectorXd p_full = conv(a_full, r_full);
    REQUIRE(p_full.size() == n + 1);
    const Eigen::VectorXd p_low = p_full.head(n);

    const QuotientMaps maps = quotient_maps(a_low, n);
    const Eigen::VectorXd r_back = maps.F * p_low + maps.g;
    REQUIRE(r_back.size() == n - m + 1);
    for (int i = 0; i <= n - m; ++i) CHECK(r_back[i] == doctest::Approx(r_full[i]).epsilon(1e-12));

    SUBCASE("degenerate degrees are rejected") {
        CHECK_THROWS_AS((void)quotient_maps(Eigen::VectorXd::Zero(0), n), Error);
        CHECK_THROWS_AS((void)quotient_maps(a_low, 1), Error);
        Eigen::VectorXd at_origin(2);
        at_origin << 0.0, 1.0;
        CHECK_THROWS_AS((void)quotient_maps(at_origin, n), Error);
    }
    SUBCASE("m equals n leaves no residual freedom") {
        const QuotientMaps full = quotient_maps(testutil::random_vector(n, gen).cwiseAbs() +
                                                    Eigen::VectorXd::Constant(n, 0.1),
                                                n);
        CHECK(full.F.rows() == 1);
        CHECK(full.F.cwiseAbs().maxCoeff() == 0.0);
        CHECK(full.g[0] == 1.0);
    }
}

TEST_CASE("placement conditions select the surviving balances") {
    std::mt19937_64 gen(10);
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    testutil::random_controllable(5, gen, A, B);
    const PlacementContext ctx(A, B);

    const Eigen::VectorXd a_full = poly_from_roots({{-0.8, 1.4}, {-0.8, -1.4}});
    const PlacementConditions pc = placement_conditions(a_full.head(2), ctx.o, ctx.Mc);

    REQUIRE(pc.V.rows() == 2);
    REQUIRE(pc.V.cols() == 5);
    CHECK(pc.rows == std::vector<int>{3, 4});
    for (int i = 0; i < 2; ++i) CHECK(pc.V.row(i).norm() == doctest::Approx(1.0));
}

TEST_CASE("minimum-norm solve stays in the row space") {
    std::mt19937_64 gen(12);
    const Eigen::MatrixXd V = testutil::random_matrix(2, 6, gen);
    const Eigen::VectorXd h = testutil::random_vector(2, gen);
    const Eigen::VectorXd k = solve_min_norm(V, h);

    CHECK((V * k + h).cwiseAbs().maxCoeff() < 1e-12);

    // k = V^T y for some y; any null-space component would only add norm.
    const Eigen::VectorXd y =
        (V * V.transpose()).ldlt().solve(V * k);
    CHECK((k - V.transpose() * y).cwiseAbs().maxCoeff() < 1e-10);

    // Perturbing along the null space satisfies the same conditions at a cost.
    Eigen::VectorXd null_dir = Eigen::VectorXd::Zero(6);
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeFullV);
        null_dir = svd.matrixV().col(5);
    }
    const Eigen::VectorXd worse = k + 0.3 * null_dir;
    CHECK((V * worse + h).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(worse.norm() > k.norm());
}

TEST_CASE("full relocation of every eigenvalue") {
    std::mt19937_64 gen(13);
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    testutil::random_controllable(4, gen, A, B);
    const PlacementContext ctx(A, B);

    const auto targets = testutil::separated_targets(4, gen);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    const AttackPlan plan = synthesize_attack(ctx, targets, x, 1.0, {0.005, 0.0}, 100.0);

    auto want = targets;
    sort_spectrum(want);
    REQUIRE(plan.achieved.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(plan.achieved[i] - want[i]) < 1e-7);
    CHECK(plan.epsilon < 1e-7);
    CHECK(plan.delta_p_pu == 0.0);
    CHECK(plan.feasible);
}

TEST_CASE("partial relocation leaves the unreachable modes where r(s) says") {
    std::mt19937_64 gen(14);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4 + static_cast<int>(gen() % 3);
        const testutil::Rank2System sys = testutil::random_rank2(n, gen);
        REQUIRE(numerical_rank(controllability_matrix(sys.A, sys.B)) == 2);

        const PlacementContext ctx(sys.A, sys.B);
        const std::vector<Complex> targets = {{-0.5, 3.0}, {-0.5, -3.0}};
        const AttackPlan plan =
            synthesize_attack(ctx, targets, Eigen::VectorXd::Zero(n), 1.0, {0.005, 0.0}, 100.0);

        CHECK(plan.epsilon < 1e-8);

        // Predicted closed-loop polynomial factors as a(s) r(s); its residual
        // must carry exactly the unreachable spectrum.
        const Eigen::VectorXd a_low = poly_from_roots(targets).head(2);
        const QuotientMaps maps = quotient_maps(a_low, n);
        const Eigen::VectorXd p_low = ctx.o - ctx.W * ctx.Mc.transpose() * plan.gain;
        const Eigen::VectorXd r_full = maps.F * p_low + maps.g;
        auto r_roots = roots_of_monic(r_full.head(n - 2));
        sort_spectrum(r_roots);

        REQUIRE(static_cast<int>(r_roots.size()) == n - 2);
        for (int i = 0; i < n - 2; ++i)
            CHECK(std::abs(r_roots[i] - Complex(sys.fixed_eigs[i], 0.0)) < 1e-6);
    }
}

TEST_CASE("demand accounting and feasibility") {
    std::mt19937_64 gen(15);
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    testutil::random_controllable(3, gen, A, B);
    const PlacementContext ctx(A, B);
    const auto targets = testutil::separated_targets(3, gen);
    const Eigen::VectorXd x = testutil::random_vector(3, gen);

    const AttackPlan plan = synthesize_attack(ctx, targets, x, 1e6, {0.005, 0.0}, 100.0);
    CHECK(plan.delta_p_pu == doctest::Approx(std::abs(plan.gain.dot(x))));
    CHECK(plan.delta_p_mw == doctest::Approx(100.0 * plan.delta_p_pu));
    CHECK(plan.alpha_pu == 0.0);
    CHECK(plan.feasible);
    CHECK(plan.violation_pu == 0.0);

    SUBCASE("a cap below the demand is infeasible with the exact shortfall") {
        const double cap = 0.5 * plan.delta_p_pu;
        const AttackPlan tight = synthesize_attack(ctx, targets, x, cap, {0.005, 0.0}, 100.0);
        CHECK_FALSE(tight.feasible);
        CHECK(tight.violation_pu == doctest::Approx(tight.delta_p_pu - cap));
    }
    SUBCASE("the chance margin shrinks the budget") {
        const double stdev = 0.4 * plan.delta_p_pu;
        const AttackPlan backed =
            synthesize_attack(ctx, targets, x, 1.2 * plan.delta_p_pu, {0.005, stdev}, 100.0);
        CHECK(backed.alpha_pu == doctest::Approx(normal_quantile(0.995) * stdev));
        CHECK_FALSE(backed.feasible);  // 2.58 * 0.4 eats the 20% headroom
        const AttackPlan loose =
            synthesize_attack(ctx, targets, x, 1.2 * plan.delta_p_pu, {0.005, 0.05 * plan.delta_p_pu}, 100.0);
        CHECK(loose.feasible);
    }
    SUBCASE("bad requests are rejected") {
        CHECK_THROWS_AS((void)synthesize_attack(ctx, {}, x, 1.0, {0.005, 0.0}, 100.0), Error);
        std::vector<Complex> too_many(4, Complex(-1.0, 0.0));
        CHECK_THROWS_AS((void)synthesize_attack(ctx, too_many, x, 1.0, {0.005, 0.0}, 100.0), Error);
        CHECK_THROWS_AS((void)synthesize_attack(ctx, targets, Eigen::VectorXd::Zero(2), 1.0, {0.005, 0.0}, 100.0),
                        Error);
    }
}

TEST_CASE("normal quantile against an erfc bisection oracle") {
    for (double p : {1e-9, 1e-4, 0.02, 0.2, 0.5, 0.7, 0.975, 0.995, 1.0 - 1e-7}) {
        const double want = testutil::quantile_oracle(p);
        CHECK(normal_quantile(p) == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-9));
    CHECK(normal_quantile(0.3) == doctest::Approx(-normal_quantile(0.7)).epsilon(1e-12));
    CHECK_THROWS_AS((void)normal_quantile(0.0), Error);
    CHECK_THROWS_AS((void)normal_quantile(1.0), Error);
    CHECK_THROWS_AS((void)normal_quantile(-0.1), Error);
}

TEST_CASE("chance margin") {
    CHECK(chance_margin({0.005, 0.0}) == 0.0);
    CHECK(chance_margin({0.005, 2.0}) == doctest::Approx(2.0 * normal_quantile(0.995)).epsilon(1e-12));
    CHECK(chance_margin({0.4, 1.0}) > 0.0);
    CHECK_THROWS_AS((void)chance_margin({0.0, 1.0}), Error);
    CHECK_THROWS_AS((void)chance_margin({0.5, 1.0}), Error);
    CHECK_THROWS_AS((void)chance_margin({0.005, -1.0}), Error);
}
