#include "gridlat/trip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridlat/error.hpp"

namespace gridlat {

std::vector<TripEvent> detect_overfrequency_trips(const SimulationTrace& trace, double threshold_hz,
                                                  double dwell_s) {
    std::vector<TripEvent> events;
    const int samples = static_cast<int>(trace.t.size());
    if (samples == 0) return events;

    for (int g = 0; g < trace.f_gen_hz.rows(); ++g) {
        int k = 0;
        while (k < samples) {
            // Find where the frequency rises above the threshold.
            while (k < samples && trace.f_gen_hz(g, k) <= threshold_hz) ++k;
            if (k == samples) break;

            double start;
            if (k == 0) {
                start = trace.t[0];
            } else {
                const double f0 = trace.f_gen_hz(g, k - 1);
                const double f1 = trace.f_gen_hz(g, k);
                start = trace.t[k - 1] + trace.dt * (threshold_hz - f0) / (f1 - f0);
            }

            int j = k;
            while (j < samples && trace.f_gen_hz(g, j) > threshold_hz) ++j;
            double end;
            if (j == samples) {
                end = trace.t[samples - 1];
            } else {
                const double f0 = trace.f_gen_hz(g, j - 1);
                const double f1 = trace.f_gen_hz(g, j);
                end = trace.t[j - 1] + trace.dt * (threshold_hz - f0) / (f1 - f0);
            }

            if (end - start >= dwell_s) {
                events.push_back({trace.gen_nodes[g], start, end - start, threshold_hz});
                break;  // protection acts once per generator
            }
            k = j;
        }
    }
    std::sort(events.begin(), events.end(),
              [](const TripEvent& a, const TripEvent& b) { return a.start_s < b.start_s; });
    return events;
}

namespace {

// State after a constant unit disturbance d has acted on x' = A x + d for time t,
// starting from rest.
Eigen::VectorXd state_from_rest(const Eigen::MatrixXd& A, const Eigen::VectorXd& d, double t) {
    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
    discretize_exact(A, d, t, Ad, Bd);
    return Bd;
}

double peak_gen_frequency(const StateSpaceModel& model, const Eigen::VectorXd& x) {
    const int G = model.map.n_gen();
    double peak = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < G; ++g)
        peak = std::max(peak, model.f_s_hz + x[model.map.omega_index(g)] / (2.0 * M_PI));
    return peak;
}

}  // namespace

Eigen::VectorXd operating_state(const StateSpaceModel& model, const GridSpec& spec,
                                const TripScenario& scenario) {
    const int g = model.map.gen_position(scenario.gen_node);
    if (g < 0) throw Error("operating-state", "no generator at node " + scenario.gen_node);

    double magnitude = 0.0;
    if (scenario.magnitude_pu) {
        magnitude = *scenario.magnitude_pu;
    } else {
        const GeneratorParams* p = spec.find_generator(scenario.gen_node);
        magnitude = p ? p->p_mw / spec.base_mva : 0.0;
    }
    if (magnitude < 0.0) throw Error("operating-state", "disturbance magnitude must be nonnegative");
    if (magnitude == 0.0) return Eigen::VectorXd::Zero(model.map.n());

    // Step through the machine's acceleration equation, signed toward the
    // over-frequency boundary.
    Eigen::VectorXd d = Eigen::VectorXd::Zero(model.map.n());
    const GeneratorParams* p = spec.find_generator(scenario.gen_node);
    if (!p) throw Error("operating-state", "no parameters for generator " + scenario.gen_node);
    d[model.map.omega_index(g)] = magnitude / p->m_pu_s2_per_rad;

    if (!(scenario.dt_s > 0.0) || !(scenario.horizon_s > 0.0))
        throw Error("operating-state", "horizon and step size must be positive");

    Eigen::MatrixXd Ad;
    Eigen::VectorXd Bd;
    discretize_exact(model.A, d, scenario.dt_s, Ad, Bd);

    const int steps = static_cast<int>(std::llround(scenario.horizon_s / scenario.dt_s));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.map.n());
    double t_prev = 0.0;
    bool bracketed = false;
    double lo = 0.0, hi = 0.0;
    for (int k = 1; k <= steps; ++k) {
        Eigen::VectorXd x_next = Ad * x + Bd;
        if (!x_next.allFinite()) throw Error("operating-state", "disturbance response diverged");
        const double t = k * scenario.dt_s;
        if (peak_gen_frequency(model, x_next) >= scenario.boundary_hz) {
            lo = t_prev;
            hi = t;
            bracketed = true;
            break;
        }
        x = x_next;
        t_prev = t;
    }
    if (!bracketed)
        throw Error("operating-state",
                    "response never reaches " + std::to_string(scenario.boundary_hz) + " Hz within " +
                        std::to_string(scenario.horizon_s) + " s");

    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eigen::VectorXd xm = state_from_rest(model.A, d, mid);
        if (peak_gen_frequency(model, xm) >= scenario.boundary_hz)
            hi = mid;
        else
            lo = mid;
    }
    return state_from_rest(model.A, d, hi);
}

}  // namespace gridlat
