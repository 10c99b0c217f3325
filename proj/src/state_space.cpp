#include "gridlat/state_space.hpp"

#include <utility>

#include "gridlat/error.hpp"

namespace gridlat {

StateIndexMap::StateIndexMap(std::vector<std::string> gen_nodes, std::vector<std::string> load_nodes)
    : gen_nodes_(std::move(gen_nodes)), load_nodes_(std::move(load_nodes)) {}

namespace {

int position_of(const std::vector<std::string>& list, const std::string& node) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == node) return static_cast<int>(i);
    return -1;
}

}  // namespace

int StateIndexMap::gen_position(const std::string& node) const { return position_of(gen_nodes_, node); }

int StateIndexMap::load_position(const std::string& node) const { return position_of(load_nodes_, node); }

std::string StateIndexMap::state_name(int k) const {
    if (k < 0 || k >= n()) throw Error("model", "state index " + std::to_string(k) + " out of range");
    const int G = n_gen();
    if (k < G) return "delta_" + gen_nodes_[k];
    if (k < 2 * G) return "omega_" + gen_nodes_[k - G];
    return "theta_" + load_nodes_[k - 2 * G];
}

StateSpaceModel assemble_descriptor(const GridSpec& spec, const std::string& attack_node) {
    validate(spec);

    std::vector<std::string> gen_nodes, load_nodes;
    for (const auto& node : spec.nodes) {
        if (node.kind == NodeKind::Load)
            load_nodes.push_back(node.id);
        else
            gen_nodes.push_back(node.id);
    }
    StateIndexMap map(gen_nodes, load_nodes);
    const int G = map.n_gen();
    const int L = map.n_load();
    const int n = map.n();

    const int attack = map.load_position(attack_node);
    if (attack < 0) throw Error("model", "attack node " + attack_node + " is not a load bus");

    std::vector<std::string> order = gen_nodes;
    order.insert(order.end(), load_nodes.begin(), load_nodes.end());
    const Eigen::MatrixXd Y = build_admittance(spec, order);
    const auto Ygg = Y.topLeftCorner(G, G);
    const auto Ygl = Y.topRightCorner(G, L);
    const auto Ylg = Y.bottomLeftCorner(L, G);
    const auto Yll = Y.bottomRightCorner(L, L);

    Eigen::VectorXd M(G), Dg(G), Kp(G), Ki(G);
    for (int g = 0; g < G; ++g) {
        const GeneratorParams* p = spec.find_generator(gen_nodes[g]);
        M[g] = p->m_pu_s2_per_rad;
        Dg[g] = p->d_g_pu_s_per_rad;
        Kp[g] = p->k_p_pu_s_per_rad;
        Ki[g] = p->k_i_pu_per_rad;
    }
    Eigen::VectorXd Dl(L);
    for (int l = 0; l < L; ++l) Dl[l] = spec.find_load(load_nodes[l])->d_l_pu(spec.base_mva);

    StateSpaceModel model;
    model.map = map;
    model.attack_node = attack_node;
    model.f_s_hz = spec.f_s_hz;
    model.base_mva = spec.base_mva;

    model.E = Eigen::MatrixXd::Zero(n, n);
    model.E.topLeftCorner(G, G).setIdentity();
    model.E.block(G, G, G, G).diagonal() = -M;
    model.E.bottomRightCorner(L, L).diagonal() = Dl;

    // Angle rows integrate speed; speed rows balance electrical flow, damping
    // and speed control against the (negated) inertia block; bus-angle rows
    // balance flow, frequency-sensitive demand and the injected deviation.
    model.A_hat = Eigen::MatrixXd::Zero(n, n);
    model.A_hat.block(0, G, G, G).setIdentity();
    model.A_hat.block(G, 0, G, G) = Ygg;
    model.A_hat.block(G, 0, G, G).diagonal() += Ki;
    model.A_hat.block(G, G, G, G).diagonal() = Kp + Dg;
    model.A_hat.block(G, 2 * G, G, L) = Ygl;
    model.A_hat.block(2 * G, 0, L, G) = -Ylg;
    model.A_hat.block(2 * G, 2 * G, L, L) = -Yll;

    model.B_hat = Eigen::VectorXd::Zero(n);
    model.B_hat[map.theta_index(attack)] = -1.0;

    model.A = Eigen::MatrixXd::Zero(n, n);
    model.A.topRows(G) = model.A_hat.topRows(G);
    model.A.middleRows(G, G) = model.A_hat.middleRows(G, G).array().colwise() / (-M).array();
    model.A.bottomRows(L) = model.A_hat.bottomRows(L).array().colwise() / Dl.array();

    model.B = Eigen::VectorXd::Zero(n);
    model.B[map.theta_index(attack)] = -1.0 / Dl[attack];

    return model;
}

}  // namespace gridlat
