#include "gridlat/lti.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "gridlat/error.hpp"

namespace gridlat {

double PiecewiseConstant::value_at(double t) const {
    double v = 0.0;
    for (const auto& [start, value] : steps) {
        if (start > t) break;
        v = value;
    }
    return v;
}

void discretize_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double dt, Eigen::MatrixXd& Ad,
                      Eigen::VectorXd& Bd) {
    if (A.rows() != A.cols() || B.size() != A.rows()) throw Error("simulate", "A and B dimensions disagree");
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = A * dt;
    aug.topRightCorner(n, 1) = B * dt;
    const Eigen::MatrixXd e = aug.exp();
    Ad = e.topLeftCorner(n, n);
    Bd = e.topRightCorner(n, 1);
}

SimulationTrace simulate(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const StateIndexMap& map,
                         double f_s_hz, const Eigen::VectorXd& x0, const PiecewiseConstant& input,
                         double horizon_s, double dt_s) {
    if (!(dt_s > 0.0)) throw Error("simulate", "step size must be positive");
    if (!(horizon_s >= 0.0)) throw Error("simulate", "horizon must be nonnegative");
    if (x0.size() != A.rows()) throw Error("simulate", "initial state dimension mismatch");

    const int steps = static_cast<int>(std::llround(horizon_s / dt_s));
    const int samples = steps + 1;
    const int n = static_cast<int>(A.rows());
    const int G = map.n_gen();

    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
    discretize_exact(A, B, dt_s, Ad, Bd);

    SimulationTrace trace;
    trace.dt = dt_s;
    trace.f_s_hz = f_s_hz;
    trace.t.resize(samples);
    trace.x.resize(n, samples);
    trace.f_gen_hz.resize(G, samples);
    trace.u.resize(samples);
    for (int k = 0; k < n; ++k) trace.state_names.push_back(map.state_name(k));
    trace.gen_nodes = map.gen_nodes();

    Eigen::VectorXd x = x0;
    for (int k = 0; k < samples; ++k) {
        const double t = k * dt_s;
        trace.t[k] = t;
        trace.u[k] = input.value_at(t);
        if (!x.allFinite()) throw Error("simulate", "state diverged at t=" + std::to_string(t));
        trace.x.col(k) = x;
        for (int g = 0; g < G; ++g)
            trace.f_gen_hz(g, k) = f_s_hz + x[map.omega_index(g)] / (2.0 * M_PI);
        if (k + 1 < samples) x = Ad * x + Bd * trace.u[k];
    }
    return trace;
}

SimulationTrace simulate(const StateSpaceModel& model, const Eigen::VectorXd& x0,
                         const PiecewiseConstant& input, double horizon_s, double dt_s) {
    return simulate(model.A, model.B, model.map, model.f_s_hz, x0, input, horizon_s, dt_s);
}

}  // namespace gridlat
