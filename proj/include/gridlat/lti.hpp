#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gridlat/state_space.hpp"

namespace gridlat {

/// Piecewise-constant input: value of the latest step at or before t, zero before the
/// first step. Step times are snapped to the simulation grid by the integrator.
struct PiecewiseConstant {
    std::vector<std::pair<double, double>> steps;  // (start time, value), ascending

    [[nodiscard]] double value_at(double t) const;
};

struct SimulationTrace {
    double dt = 0.0;
    double f_s_hz = 60.0;
    std::vector<double> t;
    Eigen::MatrixXd x;         // n x samples
    Eigen::MatrixXd f_gen_hz;  // n_gen x samples, f = f_s + omega / (2 pi)
    std::vector<double> u;
    std::vector<std::string> state_names;
    std::vector<std::string> gen_nodes;
};

/// Exact one-step discretization of x' = A x + B u for u constant over dt, computed
/// through the exponential of the augmented matrix [[A, B], [0, 0]].
void discretize_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, double dt, Eigen::MatrixXd& Ad,
                      Eigen::VectorXd& Bd);

/// Steps x' = A x + B u from x0 with the given input schedule. Exact per step for
/// piecewise-constant u; throws on non-finite states.
[[nodiscard]] SimulationTrace simulate(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                                       const StateIndexMap& map, double f_s_hz, const Eigen::VectorXd& x0,
                                       const PiecewiseConstant& input, double horizon_s, double dt_s);

/// Open-loop wrapper over the model's A, B.
[[nodiscard]] SimulationTrace simulate(const StateSpaceModel& model, const Eigen::VectorXd& x0,
                                       const PiecewiseConstant& input, double horizon_s, double dt_s);

}  // namespace gridlat
