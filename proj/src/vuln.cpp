#include "gridlat/vuln.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "gridlat/error.hpp"
#include "gridlat/report.hpp"
#include "gridlat/spectral.hpp"
#include "gridlat/trip.hpp"

namespace gridlat {

namespace {

std::vector<double> lattice(double lo, double hi, double step) {
    if (!(step > 0.0)) throw Error("sweep", "lattice step must be positive");
    if (hi < lo) throw Error("sweep", "lattice bounds are inverted");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double v = lo + k * step;
        if (v > hi + 0.5 * step) break;
        out.push_back(v);
    }
    return out;
}

}  // namespace

std::vector<double> RegionSpec::xi_values() const { return lattice(xi_min, xi_max, xi_step); }

std::vector<double> RegionSpec::omega_values() const { return lattice(omega_min, omega_max, omega_step); }

std::vector<Complex> targets_from_damping(double xi, double omega_n) {
    if (!(omega_n > 0.0)) throw Error("sweep", "natural frequency must be positive");
    if (!(std::abs(xi) < 1.0)) throw Error("sweep", "damping ratio magnitude must be below 1");
    const double re = -xi * omega_n;
    const double im = omega_n * std::sqrt(1.0 - xi * xi);
    return {Complex(re, im), Complex(re, -im)};
}

double relocation_error(const std::vector<Complex>& targets, const std::vector<Complex>& closed_eigs,
                        std::vector<Complex>* matched) {
    const int m = static_cast<int>(targets.size());
    const int n = static_cast<int>(closed_eigs.size());
    if (m == 0) return 0.0;
    if (m > n) throw Error("sweep", "more targets than eigenvalues");
    if (m > 6) throw Error("sweep", "assignment search supports at most 6 targets");

    std::vector<int> pick(m, -1);
    std::vector<bool> used(n, false);
    std::vector<int> best(m, -1);
    double best_cost = std::numeric_limits<double>::infinity();

    // Exhaustive search over injective target-to-eigenvalue assignments; m is
    // tiny so the n^m worst case stays negligible.
    auto dfs = [&](auto&& self, int depth, double cost) -> void {
        if (cost >= best_cost) return;
        if (depth == m) {
            best_cost = cost;
            best = pick;
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = true;
            pick[depth] = i;
            self(self, depth + 1, cost + std::norm(closed_eigs[i] - targets[depth]));
            used[i] = false;
        }
    };
    dfs(dfs, 0, 0.0);

    if (matched) {
        matched->resize(m);
        for (int i = 0; i < m; ++i) (*matched)[i] = closed_eigs[best[i]];
    }
    return std::sqrt(best_cost);
}

const SweepCell& SweepResult::at(int omega_idx, int xi_idx) const {
    return cells[static_cast<std::size_t>(omega_idx) * xi.size() + xi_idx];
}

SweepResult sweep_region(const PlacementContext& ctx, const StateSpaceModel& model,
                         const Eigen::VectorXd& x, const RegionSpec& region, int threads) {
    SweepResult result;
    result.region = region;
    result.xi = region.xi_values();
    result.omega = region.omega_values();
    result.attack_node = model.attack_node;
    result.model_hash = fnv1a64(hash_hex(hash_matrix(ctx.A)) + hash_hex(hash_vector(ctx.B)));
    result.state_hash = hash_vector(x);
    result.cells.resize(result.xi.size() * result.omega.size());

    const UncertaintySpec no_uncertainty{0.005, 0.0};
    const double unlimited = std::numeric_limits<double>::infinity();

    auto run_cell = [&](std::size_t idx) {
        const std::size_t oi = idx / result.xi.size();
        const std::size_t xj = idx % result.xi.size();
        SweepCell cell;
        cell.xi = result.xi[xj];
        cell.omega_n = result.omega[oi];
        try {
            const auto targets = targets_from_damping(cell.xi, cell.omega_n);
            const AttackPlan plan =
                synthesize_attack(ctx, targets, x, unlimited, no_uncertainty, model.base_mva);
            cell.synthesized = true;
            cell.epsilon = plan.epsilon;
            cell.delta_p_mw = plan.delta_p_mw;
            cell.feasible = plan.epsilon <= region.eps_max;
        } catch (const Error&) {
            cell.synthesized = false;
            cell.feasible = false;
        }
        result.cells[idx] = cell;
    };

    unsigned hw = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    hw = std::min<unsigned>(hw, static_cast<unsigned>(result.cells.size()));

    if (hw <= 1) {
        for (std::size_t idx = 0; idx < result.cells.size(); ++idx) run_cell(idx);
        return result;
    }

    std::vector<std::thread> pool;
    for (unsigned w = 0; w < hw; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t idx = w; idx < result.cells.size(); idx += hw) run_cell(idx);
        });
    }
    for (auto& th : pool) th.join();
    return result;
}

std::vector<SensitivityRow> parameter_sensitivity(const GridSpec& spec, const std::string& attack_node,
                                                  const TripScenario& scenario, double xi,
                                                  double omega_n, const std::vector<double>& errors,
                                                  double cap_pu, const UncertaintySpec& u,
                                                  double eps_max) {
    const auto targets = targets_from_damping(xi, omega_n);

    std::vector<SensitivityRow> rows;
    rows.reserve(errors.size());
    for (double e : errors) {
        SensitivityRow row;
        row.error = e;
        try {
            // The whole plan is drawn up from the erroneous dataset: the model,
            // the predicted post-disturbance state, and the gain sized on it.
            const GridSpec believed = scale_parameters(spec, e);
            const StateSpaceModel design_model = assemble_descriptor(believed, attack_node);
            const PlacementContext design_ctx(design_model);
            const Eigen::VectorXd x_hat = operating_state(design_model, believed, scenario);

            const AttackPlan plan =
                synthesize_attack(design_ctx, targets, x_hat, cap_pu, u, believed.base_mva);

            std::vector<Complex> matched;
            row.epsilon = relocation_error(targets, plan.achieved, &matched);
            const Complex lead = matched[0];
            row.omega_n = std::abs(lead);
            row.xi = row.omega_n > 0.0 ? -lead.real() / row.omega_n : 0.0;
            row.delta_p_mw = plan.delta_p_mw;
            row.synthesized = true;
            row.feasible = plan.feasible && row.epsilon <= eps_max;
        } catch (const Error&) {
            row.synthesized = false;
            row.feasible = false;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gridlat
