#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridlat {

enum class NodeKind { Generator, Load, Reference };

struct NodeRecord {
    std::string id;
    NodeKind kind = NodeKind::Load;
    double base_kv = 0.0;
    std::string note;
};

struct Branch {
    std::string from;
    std::string to;
    double susceptance_pu = 0.0;  // 1/x of the series reactance, positive for inductive lines
    double length_mi = 0.0;       // documentation only
    std::string note;
};

struct GeneratorParams {
    std::string node;
    double m_pu_s2_per_rad = 0.0;   // rotational inertia
    double d_g_pu_s_per_rad = 0.0;  // mechanical damping
    double k_p_pu_s_per_rad = 0.0;  // speed-control proportional gain
    double k_i_pu_per_rad = 0.0;    // speed-control integral gain
    double p_mw = 0.0;              // scheduled injection, used by trip scenarios
    std::string note;
};

/// Hourly charging-station statistics; profile is 7 days x 24 hours, day 0 = Monday.
struct EvcsProfile {
    double max_kw = 0.0;
    std::array<std::array<double, 24>, 7> mean_kw{};
    std::array<std::array<double, 24>, 7> stdev_kw{};

    [[nodiscard]] bool empty() const;
    [[nodiscard]] double mean_at(int hour_of_week) const;
    [[nodiscard]] double stdev_at(int hour_of_week) const;
    /// First hour of the week (0..167) with the largest mean demand.
    [[nodiscard]] int peak_hour() const;
};

/// Default load damping when no override is given: percent of demand per rad/s.
inline constexpr double kDefaultLoadDampingPct = 1.5;

struct LoadParams {
    std::string node;
    double p_mw = 0.0;
    std::optional<double> d_l_pct;           // damping as percent of demand per rad/s
    std::optional<double> d_l_pu_s_per_rad;  // absolute damping, wins over d_l_pct
    EvcsProfile evcs;
    std::string note;

    [[nodiscard]] double d_l_pu(double base_mva) const;
};

struct GridSpec {
    double base_mva = 100.0;
    double f_s_hz = 60.0;
    std::vector<NodeRecord> nodes;
    std::vector<Branch> branches;
    std::vector<GeneratorParams> generators;
    std::vector<LoadParams> loads;
    std::string description;

    [[nodiscard]] const NodeRecord* find_node(const std::string& id) const;
    [[nodiscard]] const GeneratorParams* find_generator(const std::string& node) const;
    [[nodiscard]] const LoadParams* find_load(const std::string& node) const;
};

/// Checks ids, kinds, parameter ranges and connectivity; throws Error("validate", ...)
/// naming the offending field.
void validate(const GridSpec& spec);

/// Nodal susceptance matrix over the given node ordering: diagonal holds the sum of
/// incident branch susceptances, off-diagonals their negatives, so rows sum to zero.
[[nodiscard]] Eigen::MatrixXd build_admittance(const GridSpec& spec, const std::vector<std::string>& order);

/// Copy of the grid description with the charging demand (mean, stdev, max) at one
/// load node multiplied by factor.
[[nodiscard]] GridSpec scale_evcs_demand(const GridSpec& spec, const std::string& node, double factor);

/// Copy of the grid description with inertia, damping (generator and load) and branch
/// susceptances multiplied by (1 + error); control gains and schedules are untouched.
[[nodiscard]] GridSpec scale_parameters(const GridSpec& spec, double error);

}  // namespace gridlat
