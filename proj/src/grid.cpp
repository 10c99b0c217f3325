#include "gridlat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gridlat/error.hpp"

namespace gridlat {

bool EvcsProfile::empty() const {
    if (max_kw > 0.0) return false;
    for (const auto& day : mean_kw)
        for (double v : day)
            if (v != 0.0) return false;
    return true;
}

namespace {

void check_hour(int hour_of_week) {
    if (hour_of_week < 0 || hour_of_week >= 7 * 24)
        throw Error("profile", "hour of week " + std::to_string(hour_of_week) + " outside 0..167");
}

}  // namespace

double EvcsProfile::mean_at(int hour_of_week) const {
    check_hour(hour_of_week);
    return mean_kw[hour_of_week / 24][hour_of_week % 24];
}

double EvcsProfile::stdev_at(int hour_of_week) const {
    check_hour(hour_of_week);
    return stdev_kw[hour_of_week / 24][hour_of_week % 24];
}

int EvcsProfile::peak_hour() const {
    int best = 0;
    double best_mean = mean_kw[0][0];
    for (int h = 1; h < 7 * 24; ++h) {
        const double m = mean_kw[h / 24][h % 24];
        if (m > best_mean) {
            best_mean = m;
            best = h;
        }
    }
    return best;
}

double LoadParams::d_l_pu(double base_mva) const {
    if (d_l_pu_s_per_rad) return *d_l_pu_s_per_rad;
    const double pct = d_l_pct.value_or(kDefaultLoadDampingPct);
    return (pct / 100.0) * (p_mw / base_mva);
}

const NodeRecord* GridSpec::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const GeneratorParams* GridSpec::find_generator(const std::string& node) const {
    for (const auto& g : generators)
        if (g.node == node) return &g;
    return nullptr;
}

const LoadParams* GridSpec::find_load(const std::string& node) const {
    for (const auto& l : loads)
        if (l.node == node) return &l;
    return nullptr;
}

void validate(const GridSpec& spec) {
    if (!(spec.base_mva > 0.0)) throw Error("validate", "base_mva must be positive");
    if (!(spec.f_s_hz > 0.0)) throw Error("validate", "f_s_hz must be positive");
    if (spec.nodes.empty()) throw Error("validate", "no nodes");

    std::set<std::string> ids;
    int n_ref = 0;
    for (const auto& n : spec.nodes) {
        if (n.id.empty()) throw Error("validate", "node with empty id");
        if (!ids.insert(n.id).second) throw Error("validate", "duplicate node id " + n.id);
        if (n.kind == NodeKind::Reference) ++n_ref;
    }
    if (n_ref != 1) throw Error("validate", "exactly one reference node required, found " + std::to_string(n_ref));

    auto is_generator_kind = [&](const std::string& id) {
        const NodeRecord* n = spec.find_node(id);
        return n && (n->kind == NodeKind::Generator || n->kind == NodeKind::Reference);
    };

    std::set<std::string> gen_nodes;
    for (const auto& g : spec.generators) {
        if (!ids.count(g.node)) throw Error("validate", "generator at unknown node " + g.node);
        if (!is_generator_kind(g.node)) throw Error("validate", "generator params at load node " + g.node);
        if (!gen_nodes.insert(g.node).second) throw Error("validate", "duplicate generator at " + g.node);
        if (!(g.m_pu_s2_per_rad > 0.0)) throw Error("validate", "inertia must be positive at " + g.node);
        if (g.d_g_pu_s_per_rad < 0.0) throw Error("validate", "negative damping at " + g.node);
        if (g.k_p_pu_s_per_rad < 0.0 || g.k_i_pu_per_rad < 0.0)
            throw Error("validate", "negative control gain at " + g.node);
        if (g.p_mw < 0.0) throw Error("validate", "negative schedule at " + g.node);
    }

    std::set<std::string> load_nodes;
    for (const auto& l : spec.loads) {
        if (!ids.count(l.node)) throw Error("validate", "load at unknown node " + l.node);
        if (is_generator_kind(l.node)) throw Error("validate", "load params at generator node " + l.node);
        if (!load_nodes.insert(l.node).second) throw Error("validate", "duplicate load at " + l.node);
        if (!(l.p_mw > 0.0)) throw Error("validate", "demand must be positive at " + l.node);
        if (!(l.d_l_pu(spec.base_mva) > 0.0)) throw Error("validate", "load damping must be positive at " + l.node);
        if (l.evcs.max_kw < 0.0) throw Error("validate", "negative charging capacity at " + l.node);
        for (const auto& day : l.evcs.mean_kw)
            for (double v : day)
                if (v < 0.0) throw Error("validate", "negative charging mean at " + l.node);
        for (const auto& day : l.evcs.stdev_kw)
            for (double v : day)
                if (v < 0.0) throw Error("validate", "negative charging stdev at " + l.node);
    }

    for (const auto& n : spec.nodes) {
        const bool gen_kind = n.kind == NodeKind::Generator || n.kind == NodeKind::Reference;
        if (gen_kind && !gen_nodes.count(n.id)) throw Error("validate", "missing generator params at " + n.id);
        if (!gen_kind && !load_nodes.count(n.id)) throw Error("validate", "missing load params at " + n.id);
    }

    if (spec.branches.empty()) throw Error("validate", "no branches");
    for (const auto& b : spec.branches) {
        if (!ids.count(b.from)) throw Error("validate", "branch from unknown node " + b.from);
        if (!ids.count(b.to)) throw Error("validate", "branch to unknown node " + b.to);
        if (b.from == b.to) throw Error("validate", "branch loops at " + b.from);
        if (!(b.susceptance_pu > 0.0))
            throw Error("validate", "branch " + b.from + "-" + b.to + " needs positive susceptance");
    }

    // Connectivity over the branch graph.
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& b : spec.branches) {
        adj[b.from].push_back(b.to);
        adj[b.to].push_back(b.from);
    }
    std::set<std::string> seen;
    std::vector<std::string> stack{spec.nodes.front().id};
    while (!stack.empty()) {
        std::string v = stack.back();
        stack.pop_back();
        if (!seen.insert(v).second) continue;
        for (const auto& w : adj[v]) stack.push_back(w);
    }
    for (const auto& n : spec.nodes)
        if (!seen.count(n.id)) throw Error("validate", "node " + n.id + " is disconnected");
}

Eigen::MatrixXd build_admittance(const GridSpec& spec, const std::vector<std::string>& order) {
    std::map<std::string, int> pos;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!spec.find_node(order[i])) throw Error("admittance", "unknown node " + order[i]);
        if (!pos.emplace(order[i], static_cast<int>(i)).second)
            throw Error("admittance", "node " + order[i] + " repeated in ordering");
    }
    const int n = static_cast<int>(order.size());
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
    for (const auto& b : spec.branches) {
        const auto fi = pos.find(b.from);
        const auto ti = pos.find(b.to);
        if (fi == pos.end() || ti == pos.end()) continue;
        const int i = fi->second, j = ti->second;
        Y(i, i) += b.susceptance_pu;
        Y(j, j) += b.susceptance_pu;
        Y(i, j) -= b.susceptance_pu;
        Y(j, i) -= b.susceptance_pu;
    }
    return Y;
}

GridSpec scale_evcs_demand(const GridSpec& spec, const std::string& node, double factor) {
    if (!(factor >= 0.0)) throw Error("scale", "charging demand factor must be nonnegative");
    GridSpec out = spec;
    bool found = false;
    for (auto& l : out.loads) {
        if (l.node != node) continue;
        found = true;
        l.evcs.max_kw *= factor;
        for (auto& day : l.evcs.mean_kw)
            for (double& v : day) v *= factor;
        for (auto& day : l.evcs.stdev_kw)
            for (double& v : day) v *= factor;
    }
    if (!found) throw Error("scale", "no load at node " + node);
    return out;
}

GridSpec scale_parameters(const GridSpec& spec, double error) {
    const double f = 1.0 + error;
    if (!(f > 0.0)) throw Error("scale", "parameter error must keep values positive");
    GridSpec out = spec;
    for (auto& g : out.generators) {
        g.m_pu_s2_per_rad *= f;
        g.d_g_pu_s_per_rad *= f;
    }
    for (auto& l : out.loads) {
        if (l.d_l_pu_s_per_rad) {
            *l.d_l_pu_s_per_rad *= f;
        } else {
            l.d_l_pct = l.d_l_pct.value_or(kDefaultLoadDampingPct) * f;
        }
    }
    for (auto& b : out.branches) b.susceptance_pu *= f;
    return out;
}

}  // namespace gridlat
