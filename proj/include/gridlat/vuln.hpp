#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gridlat/grid.hpp"
#include "gridlat/placement.hpp"
#include "gridlat/state_space.hpp"
#include "gridlat/trip.hpp"

namespace gridlat {

/// Damping-ratio / natural-frequency lattice swept for exploitable dynamics.
struct RegionSpec {
    double xi_min = -0.09;
    double xi_max = 0.03;
    double xi_step = 0.003;
    double omega_min = 2.5;     // rad/s
    double omega_max = 12.6;
    double omega_step = 0.1;
    double eps_max = 0.1;       // relocation error accepted as "achieved"

    [[nodiscard]] std::vector<double> xi_values() const;
    [[nodiscard]] std::vector<double> omega_values() const;
};

/// Conjugate pair at damping ratio xi and natural frequency omega_n:
/// -xi * omega_n +/- j * omega_n * sqrt(1 - xi^2).
[[nodiscard]] std::vector<Complex> targets_from_damping(double xi, double omega_n);

/// Residual between the requested eigenvalues and the closest distinct
/// closed-loop eigenvalues: sqrt(min over assignments of sum |achieved -
/// target|^2). Also reports which eigenvalues matched.
[[nodiscard]] double relocation_error(const std::vector<Complex>& targets,
                                      const std::vector<Complex>& closed_eigs,
                                      std::vector<Complex>* matched = nullptr);

struct SweepCell {
    double xi = 0.0;
    double omega_n = 0.0;
    bool synthesized = false;   // placement conditions solvable, finite gain
    double epsilon = 0.0;
    double delta_p_mw = 0.0;
    bool feasible = false;      // synthesized and epsilon <= eps_max
};

struct SweepResult {
    RegionSpec region;
    std::vector<double> xi;
    std::vector<double> omega;      // ascending
    std::vector<SweepCell> cells;   // row-major, omega outer, xi inner
    std::string attack_node;
    int hour_of_week = 0;
    std::uint64_t model_hash = 0;
    std::uint64_t state_hash = 0;

    [[nodiscard]] const SweepCell& at(int omega_idx, int xi_idx) const;
};

/// Sweep the region, synthesizing toward each lattice cell from the shared
/// operating state x. Cells are independent; work is split across threads and
/// merged back by index so the result is deterministic.
[[nodiscard]] SweepResult sweep_region(const PlacementContext& ctx,
                                       const StateSpaceModel& model,
                                       const Eigen::VectorXd& x,
                                       const RegionSpec& region,
                                       int threads = 0);

struct SensitivityRow {
    double error = 0.0;          // relative parameter error baked into the planning model
    bool synthesized = false;
    double xi = 0.0;             // damping ratio of the pair the plan lands on
    double omega_n = 0.0;        // natural frequency of that pair
    double epsilon = 0.0;        // relocation error of the plan
    double delta_p_mw = 0.0;     // demand the plan draws at its predicted state
    bool feasible = false;       // demand within cap and epsilon <= eps_max
};

/// Replan the attack toward one (xi, omega_n) cell from datasets whose inertia,
/// damping, and susceptance are all off by (1 + error). The planning model,
/// the predicted operating state, the gain, and the demand it draws are all
/// recomputed from each erroneous copy; one row per error records where the
/// pair lands and what the plan costs against the demand cap.
[[nodiscard]] std::vector<SensitivityRow> parameter_sensitivity(
    const GridSpec& spec,
    const std::string& attack_node,
    const TripScenario& scenario,
    double xi, double omega_n,
    const std::vector<double>& errors,
    double cap_pu,
    const UncertaintySpec& u,
    double eps_max = 0.1);

}  // namespace gridlat
