#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridlat/lti.hpp"
#include "gridlat/state_space.hpp"

namespace gridlat {

inline constexpr double kTripThresholdHz = 62.0;
inline constexpr double kTripDwellS = 0.16;

struct TripEvent {
    std::string node;
    double start_s = 0.0;      // interpolated upward crossing of the threshold
    double dwell_s = 0.0;      // time spent above the threshold
    double threshold_hz = kTripThresholdHz;
};

/// First excursion per generator that stays above threshold_hz for at least dwell_s.
/// Crossing times are linearly interpolated between samples; events sorted by start.
[[nodiscard]] std::vector<TripEvent> detect_overfrequency_trips(const SimulationTrace& trace,
                                                                double threshold_hz = kTripThresholdHz,
                                                                double dwell_s = kTripDwellS);

/// Loss of one generator's scheduled injection, applied as a step through its swing
/// equation. magnitude_pu overrides the schedule; zero magnitude leaves the grid at
/// equilibrium. The step is oriented toward the over-frequency boundary, which leaves
/// |K x| unchanged because the deviation model is odd in the disturbance.
struct TripScenario {
    std::string gen_node;
    std::optional<double> magnitude_pu;
    double boundary_hz = kTripThresholdHz;
    double horizon_s = 60.0;
    double dt_s = 1e-3;
};

/// State reached when the largest generator frequency first touches the scenario
/// boundary; this snapshot bounds the demand a feedback gain needs. Throws when the
/// response never reaches the boundary.
[[nodiscard]] Eigen::VectorXd operating_state(const StateSpaceModel& model, const GridSpec& spec,
                                              const TripScenario& scenario);

}  // namespace gridlat
