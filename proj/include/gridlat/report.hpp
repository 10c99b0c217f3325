#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gridlat/lti.hpp"
#include "gridlat/placement.hpp"
#include "gridlat/state_space.hpp"
#include "gridlat/trip.hpp"
#include "gridlat/vuln.hpp"

namespace gridlat {

/// Fixed numeric formatting for every file this library writes; %.9g keeps
/// output identical across runs and platforms that share IEEE doubles.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::uint64_t fnv1a64(const std::string& bytes);

/// Hash a matrix through its formatted representation so equal-looking
/// reports always agree with equal hashes.
[[nodiscard]] std::uint64_t hash_matrix(const Eigen::MatrixXd& M);
[[nodiscard]] std::uint64_t hash_vector(const Eigen::VectorXd& v);

/// 16-digit lower-case hex, zero padded.
[[nodiscard]] std::string hash_hex(std::uint64_t h);

/// Eigenvalues with damping ratio, natural frequency, and the states that
/// participate most in each mode.
[[nodiscard]] std::string spectrum_report(const StateSpaceModel& model);

/// Dimensions, state ordering, matrix hashes, stability, and the attack
/// node's controllability summary.
[[nodiscard]] std::string model_report(const StateSpaceModel& model);

[[nodiscard]] std::string attack_plan_json(const AttackPlan& plan,
                                           const StateSpaceModel& model,
                                           const Eigen::VectorXd& x);

/// Columns: t, one per state, one frequency per generator, then u.
[[nodiscard]] std::string trace_csv(const SimulationTrace& trace);

[[nodiscard]] std::string trip_report(const std::vector<TripEvent>& events,
                                      double threshold_hz, double dwell_s);

/// Matrix layout: rows omega_n ascending, columns xi ascending, cells the
/// required demand in MW or NA when the relocation error exceeds the region's
/// acceptance threshold.
[[nodiscard]] std::string sweep_matrix_csv(const SweepResult& sweep);

/// Long form: xi,omega_n,delta_p_mw,epsilon,feasible with NA for cells whose
/// synthesis failed outright.
[[nodiscard]] std::string sweep_long_csv(const SweepResult& sweep);

[[nodiscard]] std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);

/// name=hash lines for the inputs and outputs of a run.
struct ManifestEntry {
    std::string name;
    std::uint64_t hash = 0;
};

[[nodiscard]] std::string manifest_text(const std::vector<ManifestEntry>& entries);

}  // namespace gridlat
