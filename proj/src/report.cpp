#include "gridlat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gridlat/error.hpp"
#include "gridlat/spectral.hpp"
#include "gridlat/version.hpp"

namespace gridlat {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw Error("report", "refusing to write a non-finite value");
    if (v == 0.0) return "0";  // merge the signed zeros
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t hash_matrix(const Eigen::MatrixXd& M) {
    std::string text = std::to_string(M.rows()) + "x" + std::to_string(M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            text += ',';
            text += format_double(M(i, j));
        }
    return fnv1a64(text);
}

std::uint64_t hash_vector(const Eigen::VectorXd& v) {
    return hash_matrix(v);
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string complex_text(Complex z) {
    const std::string im = format_double(std::abs(z.imag()));
    return format_double(z.real()) + (z.imag() < 0.0 ? " - " : " + ") + im + "i";
}

}  // namespace

std::string spectrum_report(const StateSpaceModel& model) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(model.A);
    if (es.info() != Eigen::Success) throw Error("report", "eigenvalue iteration failed");
    const Eigen::MatrixXd P = participation_factors(model.A);
    const int n = model.map.n();

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const Complex a = es.eigenvalues()[i], b = es.eigenvalues()[j];
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    std::ostringstream out;
    out << "mode,re,im,damping_ratio,omega_n_rad_s,top_states\n";
    for (int row = 0; row < n; ++row) {
        const int i = order[row];
        const Complex v = es.eigenvalues()[i];
        const double wn = std::abs(v);
        const double xi = wn > 0.0 ? -v.real() / wn : 0.0;

        std::vector<int> states(n);
        std::iota(states.begin(), states.end(), 0);
        std::stable_sort(states.begin(), states.end(), [&](int a, int b) { return P(a, i) > P(b, i); });

        out << row + 1 << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << ','
            << format_double(xi) << ',' << format_double(wn) << ',';
        for (int k = 0; k < 3 && k < n; ++k) {
            if (k) out << ' ';
            out << model.map.state_name(states[k]) << '(' << format_double(P(states[k], i)) << ')';
        }
        out << '\n';
    }
    return out.str();
}

std::string model_report(const StateSpaceModel& model) {
    const Eigen::MatrixXd Mc = controllability_matrix(model.A, model.B);
    const int rank = numerical_rank(Mc);
    const bool stable = is_stable(spectrum(model.A));

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Mc);

    std::ostringstream out;
    out << "states: " << model.map.n() << " (generators " << model.map.n_gen() << ", load buses "
        << model.map.n_load() << ")\n";
    out << "attack node: " << model.attack_node << "\n";
    out << "rated frequency: " << format_double(model.f_s_hz) << " Hz\n";
    out << "power base: " << format_double(model.base_mva) << " MVA\n";
    out << "state order:";
    for (int k = 0; k < model.map.n(); ++k) out << ' ' << model.map.state_name(k);
    out << "\n";
    out << "pre-attack stable: " << (stable ? "yes" : "no") << "\n";
    out << "reachable directions from the attack node: " << rank << "\n";
    out << "reachability spread (smallest/largest singular value): "
        << format_double(svd.singularValues()[svd.singularValues().size() - 1] / svd.singularValues()[0])
        << "\n";
    out << "E hash: " << hash_hex(hash_matrix(model.E)) << "\n";
    out << "A hash: " << hash_hex(hash_matrix(model.A)) << "\n";
    out << "B hash: " << hash_hex(hash_vector(model.B)) << "\n";
    return out.str();
}

namespace {

void append_complex_array(std::ostringstream& out, const std::vector<Complex>& values) {
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << '[' << format_double(values[i].real()) << ',' << format_double(values[i].imag()) << ']';
    }
    out << ']';
}

}  // namespace

std::string attack_plan_json(const AttackPlan& plan, const StateSpaceModel& model,
                             const Eigen::VectorXd& x) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"attack_node\": \"" << model.attack_node << "\",\n";
    out << "  \"k_a\": [";
    for (Eigen::Index i = 0; i < plan.gain.size(); ++i) {
        if (i) out << ',';
        out << format_double(plan.gain[i]);
    }
    out << "],\n";
    out << "  \"state_order\": [";
    for (int k = 0; k < model.map.n(); ++k) {
        if (k) out << ',';
        out << '"' << model.map.state_name(k) << '"';
    }
    out << "],\n";
    out << "  \"delta_p_pu\": " << format_double(plan.delta_p_pu) << ",\n";
    out << "  \"delta_p_mw\": " << format_double(plan.delta_p_mw) << ",\n";
    out << "  \"targets\": ";
    append_complex_array(out, plan.targets);
    out << ",\n";
    out << "  \"achieved\": ";
    append_complex_array(out, plan.achieved);
    out << ",\n";
    out << "  \"epsilon\": " << format_double(plan.epsilon) << ",\n";
    out << "  \"alpha_pu\": " << format_double(plan.alpha_pu) << ",\n";
    out << "  \"violation_pu\": " << format_double(plan.violation_pu) << ",\n";
    out << "  \"state_hash\": \"" << hash_hex(hash_vector(x)) << "\",\n";
    out << "  \"feasible\": " << (plan.feasible ? "true" : "false") << "\n";
    out << "}\n";
    return out.str();
}

std::string trace_csv(const SimulationTrace& trace) {
    std::ostringstream out;
    out << 't';
    for (const auto& name : trace.state_names) out << ',' << name;
    for (const auto& node : trace.gen_nodes) out << ",f_" << node << "_hz";
    out << ",u\n";
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        out << format_double(trace.t[k]);
        for (Eigen::Index i = 0; i < trace.x.rows(); ++i) out << ',' << format_double(trace.x(i, k));
        for (Eigen::Index g = 0; g < trace.f_gen_hz.rows(); ++g)
            out << ',' << format_double(trace.f_gen_hz(g, k));
        out << ',' << format_double(trace.u[k]) << '\n';
    }
    return out.str();
}

std::string trip_report(const std::vector<TripEvent>& events, double threshold_hz, double dwell_s) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"threshold_hz\": " << format_double(threshold_hz) << ",\n";
    out << "  \"min_dwell_s\": " << format_double(dwell_s) << ",\n";
    out << "  \"events\": [";
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i) out << ',';
        out << "\n    {\"node\": \"" << events[i].node << "\", \"start_s\": "
            << format_double(events[i].start_s) << ", \"dwell_s\": " << format_double(events[i].dwell_s)
            << "}";
    }
    out << (events.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
    return out.str();
}

std::string sweep_matrix_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "omega_n_rad_s";
    for (double xi : sweep.xi) out << ',' << format_double(xi);
    out << '\n';
    for (std::size_t oi = 0; oi < sweep.omega.size(); ++oi) {
        out << format_double(sweep.omega[oi]);
        for (std::size_t xj = 0; xj < sweep.xi.size(); ++xj) {
            const SweepCell& cell = sweep.at(static_cast<int>(oi), static_cast<int>(xj));
            out << ',';
            if (cell.feasible)
                out << format_double(cell.delta_p_mw);
            else
                out << "NA";
        }
        out << '\n';
    }
    return out.str();
}

std::string sweep_long_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "xi,omega_n_rad_s,delta_p_mw,epsilon,feasible\n";
    for (std::size_t oi = 0; oi < sweep.omega.size(); ++oi) {
        for (std::size_t xj = 0; xj < sweep.xi.size(); ++xj) {
            const SweepCell& cell = sweep.at(static_cast<int>(oi), static_cast<int>(xj));
            out << format_double(cell.xi) << ',' << format_double(cell.omega_n) << ',';
            if (cell.synthesized)
                out << format_double(cell.delta_p_mw) << ',' << format_double(cell.epsilon);
            else
                out << "NA,NA";
            out << ',' << (cell.feasible ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
    std::ostringstream out;
    out << "error_pct,delta_p_mw,xi,omega_n_rad_s,epsilon,feasible\n";
    for (const auto& row : rows) {
        out << format_double(row.error * 100.0) << ',';
        if (row.synthesized)
            out << format_double(row.delta_p_mw) << ',' << format_double(row.xi) << ','
                << format_double(row.omega_n) << ',' << format_double(row.epsilon);
        else
            out << "NA,NA,NA,NA";
        out << ',' << (row.feasible ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string manifest_text(const std::vector<ManifestEntry>& entries) {
    std::ostringstream out;
    out << "tool_version=" << kVersion << '\n';
    for (const auto& e : entries) out << e.name << '=' << hash_hex(e.hash) << '\n';
    return out.str();
}

}  // namespace gridlat
