#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gridlat/error.hpp"
#include "gridlat/grid_io.hpp"
#include "gridlat/lti.hpp"
#include "gridlat/spectral.hpp"
#include "gridlat/state_space.hpp"
#include "gridlat/trip.hpp"
#include "testing.hpp"

using namespace gridlat;

namespace {

GridSpec bundled() { return load_grid(std::string(GRIDLAT_TEST_DATA_DIR) + "/manhattan.json"); }

}  // namespace

TEST_CASE("state ordering and names") {
    StateIndexMap map({"G1", "G2"}, {"L1", "L2", "L3"});
    CHECK(map.n_gen() == 2);
    CHECK(map.n_load() == 3);
    CHECK(map.n() == 7);
    CHECK(map.delta_index(1) == 1);
    CHECK(map.omega_index(0) == 2);
    CHECK(map.theta_index(2) == 6);
    CHECK(map.gen_position("G2") == 1);
    CHECK(map.gen_position("L1") == -1);
    CHECK(map.load_position("L3") == 2);
    CHECK(map.state_name(0) == "delta_G1");
    CHECK(map.state_name(3) == "omega_G2");
    CHECK(map.state_name(4) == "theta_L1");
    CHECK_THROWS_AS((void)map.state_name(7), Error);
}

TEST_CASE("descriptor assembly on the bundled grid") {
    const GridSpec spec = bundled();
    const StateSpaceModel model = assemble_descriptor(spec, "B4");
    const int G = model.map.n_gen();
    const int L = model.map.n_load();
    const int n = model.map.n();

    REQUIRE(n == 12);
    REQUIRE(G == 5);
    REQUIRE(L == 2);

    SUBCASE("E is blkdiag(I, -M, D_L)") {
        CHECK((model.E.topLeftCorner(G, G) - Eigen::MatrixXd::Identity(G, G)).cwiseAbs().maxCoeff() == 0.0);
        for (int g = 0; g < G; ++g) {
            const GeneratorParams* p = spec.find_generator(model.map.gen_nodes()[g]);
            CHECK(model.E(G + g, G + g) == doctest::Approx(-p->m_pu_s2_per_rad));
        }
        for (int l = 0; l < L; ++l) {
            const LoadParams* p = spec.find_load(model.map.load_nodes()[l]);
            CHECK(model.E(2 * G + l, 2 * G + l) == doctest::Approx(p->d_l_pu(spec.base_mva)));
        }
        // Nothing off the three diagonal blocks.
        Eigen::MatrixXd off = model.E;
        off.topLeftCorner(G, G).setZero();
        off.block(G, G, G, G).setZero();
        off.bottomRightCorner(L, L).setZero();
        CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("angle rows integrate speed") {
        Eigen::MatrixXd top = Eigen::MatrixXd::Zero(G, n);
        top.middleCols(G, G).setIdentity();
        CHECK((model.A.topRows(G) - top).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("regularization satisfies E A = A_hat and E B = B_hat") {
        CHECK((model.E * model.A - model.A_hat).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((model.E * model.B - model.B_hat).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("input enters through the attack bus angle row") {
        const int row = model.map.theta_index(model.map.load_position("B4"));
        CHECK(model.B_hat[row] == -1.0);
        CHECK(model.B_hat.cwiseAbs().sum() == 1.0);
        const double dl = spec.find_load("B4")->d_l_pu(spec.base_mva);
        CHECK(model.B[row] == doctest::Approx(-1.0 / dl));
    }

    SUBCASE("speed rows carry flow, speed control and damping") {
        // omega row of generator g against the admittance partition: the
        // delta block holds -M^-1 (Y_gg + diag(K_i)).
        std::vector<std::string> order = model.map.gen_nodes();
        for (const auto& l : model.map.load_nodes()) order.push_back(l);
        const Eigen::MatrixXd Y = build_admittance(spec, order);
        for (int g = 0; g < G; ++g) {
            const GeneratorParams* p = spec.find_generator(model.map.gen_nodes()[g]);
            const double m = p->m_pu_s2_per_rad;
            for (int j = 0; j < G; ++j) {
                double expect = -Y(g, j) / m;
                if (j == g) expect -= p->k_i_pu_per_rad / m;
                CHECK(model.A(G + g, j) == doctest::Approx(expect));
            }
            CHECK(model.A(G + g, G + g) == doctest::Approx(-(p->k_p_pu_s_per_rad + p->d_g_pu_s_per_rad) / m));
        }
    }

    SUBCASE("pre-attack model is stable") {
        CHECK(is_stable(spectrum(model.A)));
    }

    SUBCASE("attack node must be a load bus") {
        CHECK_THROWS_AS((void)assemble_descriptor(spec, "B7"), Error);
        CHECK_THROWS_AS((void)assemble_descriptor(spec, "nope"), Error);
    }
}

TEST_CASE("piecewise constant input lookup") {
    PiecewiseConstant u;
    CHECK(u.value_at(0.0) == 0.0);
    u.steps = {{1.0, 2.5}, {3.0, -1.0}};
    CHECK(u.value_at(0.5) == 0.0);
    CHECK(u.value_at(1.0) == 2.5);
    CHECK(u.value_at(2.999) == 2.5);
    CHECK(u.value_at(3.0) == -1.0);
    CHECK(u.value_at(100.0) == -1.0);
}

TEST_CASE("exact discretization of a scalar system") {
    Eigen::MatrixXd A(1, 1);
    A << -2.0;
    Eigen::VectorXd B(1);
    B << 3.0;
    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
    const double dt = 0.37;
    discretize_exact(A, B, dt, Ad, Bd);
    CHECK(Ad(0, 0) == doctest::Approx(std::exp(-2.0 * dt)).epsilon(1e-12));
    CHECK(Bd(0) == doctest::Approx(3.0 * (std::exp(-2.0 * dt) - 1.0) / -2.0).epsilon(1e-12));
}

TEST_CASE("simulation agrees with the closed form step response") {
    StateIndexMap map({}, {"L0"});
    Eigen::MatrixXd A(1, 1);
    A << -2.0;
    Eigen::VectorXd B(1);
    B << 3.0;
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    PiecewiseConstant u;
    u.steps = {{0.0, 1.0}};

    const SimulationTrace trace = simulate(A, B, map, 60.0, x0, u, 2.0, 0.01);
    REQUIRE(trace.t.size() == 201);
    CHECK(trace.dt == doctest::Approx(0.01));
    CHECK(trace.state_names[0] == "theta_L0");
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        const double t = trace.t[k];
        const double expect = std::exp(-2.0 * t) * 1.0 + 1.5 * (1.0 - std::exp(-2.0 * t));
        CHECK(trace.x(0, k) == doctest::Approx(expect).epsilon(1e-10));
        CHECK(trace.u[k] == 1.0);
    }
}

TEST_CASE("stepping is exact: halving dt changes nothing at shared samples") {
    std::mt19937_64 gen(41);
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    testutil::random_stable(4, gen, A, B);
    StateIndexMap map({"G1", "G2"}, {});
    const Eigen::VectorXd x0 = testutil::random_vector(4, gen);
    PiecewiseConstant u;
    u.steps = {{0.0, 0.8}};

    const SimulationTrace coarse = simulate(A, B, map, 60.0, x0, u, 1.0, 0.02);
    const SimulationTrace fine = simulate(A, B, map, 60.0, x0, u, 1.0, 0.01);
    for (std::size_t k = 0; k < coarse.t.size(); ++k) {
        const Eigen::VectorXd diff = coarse.x.col(k) - fine.x.col(2 * k);
        CHECK(diff.cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("matrix exponential stepping tracks a fine fixed-step reference") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 3 + trial;
        Eigen::MatrixXd A;
        Eigen::VectorXd B;
        testutil::random_stable(n, gen, A, B);
        const Eigen::VectorXd x0 = testutil::random_vector(n, gen);
        const double uc = 0.5;

        std::vector<std::string> buses;
        for (int i = 0; i < n; ++i) buses.push_back("L" + std::to_string(i));
        StateIndexMap map({}, buses);
        PiecewiseConstant u;
        u.steps = {{0.0, uc}};
        const double dt = 0.01, horizon = 2.0;
        const SimulationTrace trace = simulate(A, B, map, 60.0, x0, u, horizon, dt);

        Eigen::VectorXd x = x0;
        const double h = dt / 100.0;
        double scale = 0.0, err = 0.0;
        for (std::size_t k = 0; k < trace.t.size(); ++k) {
            err = std::max(err, (trace.x.col(k) - x).cwiseAbs().maxCoeff());
            scale = std::max(scale, x.cwiseAbs().maxCoeff());
            for (int s = 0; s < 100; ++s) x = testutil::rk4_step(A, B, x, uc, h);
        }
        CHECK(err / scale < 1e-6);
    }
}

TEST_CASE("divergent state is reported, not returned") {
    StateIndexMap map({}, {"L0"});
    Eigen::MatrixXd A(1, 1);
    A << 120.0;
    Eigen::VectorXd B = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    CHECK_THROWS_AS((void)simulate(A, B, map, 60.0, x0, {}, 20.0, 0.1), Error);
}

TEST_CASE("trip detection on a synthetic trace") {
    SimulationTrace trace;
    trace.dt = 0.1;
    trace.f_s_hz = 60.0;
    trace.gen_nodes = {"GA", "GB"};
    const int samples = 31;
    trace.t.resize(samples);
    for (int k = 0; k < samples; ++k) trace.t[k] = 0.1 * k;
    trace.f_gen_hz.resize(2, samples);

    // GA: clean excursion from t=1.0 to t=2.0.
    for (int k = 0; k < samples; ++k) trace.f_gen_hz(0, k) = 60.0;
    for (int k = 10; k <= 20; ++k) trace.f_gen_hz(0, k) = 63.0;
    trace.f_gen_hz(0, 21) = 61.0;

    // GB: one-sample blip at t=0.5, then a sustained rise from t=2.5 onward.
    for (int k = 0; k < samples; ++k) trace.f_gen_hz(1, k) = 60.0;
    trace.f_gen_hz(1, 5) = 63.0;
    for (int k = 25; k < samples; ++k) trace.f_gen_hz(1, k) = 64.0;

    const auto events = detect_overfrequency_trips(trace);
    REQUIRE(events.size() == 2);

    CHECK(events[0].node == "GA");
    // Crossing interpolated between (0.9, 60) and (1.0, 63).
    CHECK(events[0].start_s == doctest::Approx(0.9 + 0.1 * 2.0 / 3.0).epsilon(1e-12));
    CHECK(events[0].dwell_s >= kTripDwellS);
    CHECK(events[0].threshold_hz == doctest::Approx(62.0));

    CHECK(events[1].node == "GB");
    CHECK(events[1].start_s == doctest::Approx(2.4 + 0.1 * 0.5).epsilon(1e-12));

    SUBCASE("short blips never trip") {
        for (const auto& e : events) CHECK(e.start_s > 0.6);
    }
    SUBCASE("raising the threshold above the trace silences it") {
        CHECK(detect_overfrequency_trips(trace, 65.0).empty());
    }
    SUBCASE("a longer dwell requirement drops the shorter excursion") {
        const auto strict = detect_overfrequency_trips(trace, 62.0, 0.8);
        REQUIRE(strict.size() == 1);
        CHECK(strict[0].node == "GA");
    }
}

TEST_CASE("operating state sits on the frequency boundary") {
    const GridSpec spec = bundled();
    const StateSpaceModel model = assemble_descriptor(spec, "B4");

    TripScenario scenario;
    scenario.gen_node = "B7";

    const Eigen::VectorXd x = operating_state(model, spec, scenario);
    REQUIRE(x.size() == 12);

    double peak = 0.0;
    for (int g = 0; g < model.map.n_gen(); ++g)
        peak = std::max(peak, model.f_s_hz + x[model.map.omega_index(g)] / (2.0 * M_PI));
    CHECK(peak == doctest::Approx(62.0).epsilon(1e-9));

    SUBCASE("zero magnitude keeps the grid at rest") {
        TripScenario none = scenario;
        none.magnitude_pu = 0.0;
        CHECK(operating_state(model, spec, none).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("unknown generator is rejected") {
        TripScenario bad = scenario;
        bad.gen_node = "B4";
        CHECK_THROWS_AS((void)operating_state(model, spec, bad), Error);
    }
    SUBCASE("a tiny disturbance never reaches the boundary") {
        TripScenario weak = scenario;
        weak.magnitude_pu = 1e-4;
        weak.horizon_s = 5.0;
        CHECK_THROWS_AS((void)operating_state(model, spec, weak), Error);
    }
}

TEST_CASE("spectrum utilities") {
    SUBCASE("canonical ordering") {
        std::vector<Complex> v = {{1.0, 1.0}, {-2.0, 0.5}, {-2.0, -0.5}, {0.0, 0.0}};
        sort_spectrum(v);
        CHECK(v[0] == Complex(-2.0, -0.5));
        CHECK(v[1] == Complex(-2.0, 0.5));
        CHECK(v[2] == Complex(0.0, 0.0));
        CHECK(v[3] == Complex(1.0, 1.0));
    }
    SUBCASE("eigenvalues of a known matrix") {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
        A << 0.0, 1.0, -5.0, -2.0;  // s^2 + 2 s + 5, roots -1 +/- 2j
        const auto eigs = spectrum(A);
        REQUIRE(eigs.size() == 2);
        CHECK(eigs[0].real() == doctest::Approx(-1.0));
        CHECK(std::abs(eigs[0].imag()) == doctest::Approx(2.0));
        CHECK(is_stable(eigs));
    }
    SUBCASE("stability is strict") {
        CHECK_FALSE(is_stable({{0.0, 1.0}}));
        CHECK_FALSE(is_stable({{1e-9, 0.0}}));
        CHECK(is_stable({{-1e-9, 0.0}}));
    }
    SUBCASE("decoupled modes participate one state each") {
        Eigen::MatrixXd A = Eigen::Vector3d(-1.0, -2.0, -3.0).asDiagonal();
        const Eigen::MatrixXd P = participation_factors(A);
        // A permutation matrix, whatever order the solver reports modes in.
        for (int j = 0; j < 3; ++j) {
            CHECK(P.col(j).maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(P.row(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("participation columns are distributions") {
        std::mt19937_64 gen(11);
        Eigen::MatrixXd A;
        Eigen::VectorXd B;
        testutil::random_stable(5, gen, A, B);
        const Eigen::MatrixXd P = participation_factors(A);
        CHECK(P.minCoeff() >= 0.0);
        for (int j = 0; j < 5; ++j) CHECK(P.col(j).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}
