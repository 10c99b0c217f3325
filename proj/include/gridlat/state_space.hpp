#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridlat/grid.hpp"

namespace gridlat {

/// State ordering: generator angles, then generator speeds, then load-bus angles.
class StateIndexMap {
public:
    StateIndexMap() = default;
    StateIndexMap(std::vector<std::string> gen_nodes, std::vector<std::string> load_nodes);

    [[nodiscard]] int n_gen() const { return static_cast<int>(gen_nodes_.size()); }
    [[nodiscard]] int n_load() const { return static_cast<int>(load_nodes_.size()); }
    [[nodiscard]] int n() const { return 2 * n_gen() + n_load(); }

    [[nodiscard]] int delta_index(int g) const { return g; }
    [[nodiscard]] int omega_index(int g) const { return n_gen() + g; }
    [[nodiscard]] int theta_index(int l) const { return 2 * n_gen() + l; }

    /// Index of a node within the generator (or load) list; -1 when absent.
    [[nodiscard]] int gen_position(const std::string& node) const;
    [[nodiscard]] int load_position(const std::string& node) const;

    [[nodiscard]] std::string state_name(int k) const;  // delta_B5, omega_B5, theta_B4, ...

    [[nodiscard]] const std::vector<std::string>& gen_nodes() const { return gen_nodes_; }
    [[nodiscard]] const std::vector<std::string>& load_nodes() const { return load_nodes_; }

private:
    std::vector<std::string> gen_nodes_;
    std::vector<std::string> load_nodes_;
};

/// Linearized grid dynamics E x' = A_hat x + B_hat u regularized to x' = A x + B u.
/// x stacks generator angles, generator speeds and load-bus angles (per-unit, rad, rad/s);
/// u is the demand deviation at the attack node in per-unit, positive u adds load.
struct StateSpaceModel {
    Eigen::MatrixXd E;      // blkdiag(I, -M, D_L)
    Eigen::MatrixXd A_hat;
    Eigen::VectorXd B_hat;  // single entry in the attack node's theta row
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    StateIndexMap map;
    std::string attack_node;
    double f_s_hz = 60.0;
    double base_mva = 100.0;
};

/// Assembles the descriptor model for a validated spec and a load-bus attack node.
/// The reference node keeps generator dynamics; its angle is pinned only through the
/// speed-control integral term, not eliminated.
[[nodiscard]] StateSpaceModel assemble_descriptor(const GridSpec& spec, const std::string& attack_node);

}  // namespace gridlat
