#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridlat/error.hpp"
#include "gridlat/grid_io.hpp"
#include "gridlat/lti.hpp"
#include "gridlat/placement.hpp"
#include "gridlat/quantile.hpp"
#include "gridlat/report.hpp"
#include "gridlat/spectral.hpp"
#include "gridlat/state_space.hpp"
#include "gridlat/trip.hpp"
#include "gridlat/version.hpp"
#include "gridlat/vuln.hpp"

namespace fs = std::filesystem;
using namespace gridlat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::string default_grid_path() {
    if (const char* dir = std::getenv("GRIDLAT_DATA_DIR")) return std::string(dir) + "/manhattan.json";
    return "data/manhattan.json";
}

std::string default_attack_node(const GridSpec& spec) {
    const LoadParams* best = nullptr;
    for (const auto& l : spec.loads)
        if (!l.evcs.empty() && (!best || l.evcs.max_kw > best->evcs.max_kw)) best = &l;
    if (!best && !spec.loads.empty()) best = &spec.loads.front();
    if (!best) throw Error("config", "grid has no load buses");
    return best->node;
}

std::string default_trip_gen(const GridSpec& spec) {
    const GeneratorParams* best = nullptr;
    for (const auto& g : spec.generators)
        if (!best || g.p_mw > best->p_mw) best = &g;
    if (!best) throw Error("config", "grid has no generators");
    return best->node;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << content;
    if (!out) throw Error("io", "short write to " + path.string());
}

struct OutputSet {
    fs::path dir;
    std::vector<ManifestEntry> entries;

    void add(const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        entries.push_back({name, fnv1a64(content)});
    }

    void finish(const std::string& config_line, const std::string& grid_bytes) {
        std::vector<ManifestEntry> all;
        all.push_back({"config", fnv1a64(config_line)});
        all.push_back({"dataset", fnv1a64(grid_bytes)});
        all.insert(all.end(), entries.begin(), entries.end());
        write_file(dir / "manifest.txt", manifest_text(all));
    }
};

struct CommonArgs {
    std::string grid_path = default_grid_path();
    std::string node;
    std::string out_dir = "out";
    int hour = -1;
    double scale = 1.0;
    double eta = 0.005;
    double stdev_mw = 0.0;
    bool stdev_from_profile = false;
    long seed = 0;
    bool print_pu = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--grid", args.grid_path, "grid description JSON")->capture_default_str();
    cmd->add_option("--node", args.node, "attack node (default: load with the largest charging capacity)");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--hour", args.hour, "hour of week 0..167 (default: profile peak)")
        ->check(CLI::Range(0, 167));
    cmd->add_option("--scale", args.scale, "charging demand scale factor")->capture_default_str();
    cmd->add_option("--eta", args.eta, "demand shortfall probability")->capture_default_str();
    cmd->add_option("--stdev", args.stdev_mw, "demand standard deviation in MW");
    cmd->add_flag("--stdev-from-profile", args.stdev_from_profile,
                  "take the demand standard deviation from the profile at the selected hour");
    cmd->add_option("--seed", args.seed, "seed recorded for reproducibility")->capture_default_str();
    cmd->add_flag("--pu", args.print_pu, "print per-unit values in the console summary");
}

struct LoadedGrid {
    GridSpec spec;
    std::string bytes;
    std::string node;
    int hour = 0;
};

LoadedGrid load_common(const CommonArgs& args) {
    LoadedGrid g;
    g.bytes = read_file(args.grid_path);
    g.spec = parse_grid_json(g.bytes);
    g.node = args.node.empty() ? default_attack_node(g.spec) : args.node;
    if (!g.spec.find_load(g.node)) throw Error("config", "attack node " + g.node + " is not a load bus");
    if (args.scale != 1.0) g.spec = scale_evcs_demand(g.spec, g.node, args.scale);
    const LoadParams* load = g.spec.find_load(g.node);
    g.hour = args.hour >= 0 ? args.hour : (load->evcs.empty() ? 0 : load->evcs.peak_hour());
    return g;
}

UncertaintySpec uncertainty_for(const CommonArgs& args, const LoadedGrid& g) {
    UncertaintySpec u;
    u.eta = args.eta;
    if (args.stdev_from_profile) {
        const LoadParams* load = g.spec.find_load(g.node);
        u.stdev_pu = load->evcs.stdev_at(g.hour) / 1000.0 / g.spec.base_mva;
    } else {
        u.stdev_pu = args.stdev_mw / g.spec.base_mva;
    }
    return u;
}

std::string config_line(const std::string& cmd, const CommonArgs& args, const std::string& extra) {
    std::ostringstream out;
    out << "cmd=" << cmd << " grid=" << args.grid_path << " node=" << args.node << " hour=" << args.hour
        << " scale=" << format_double(args.scale) << " eta=" << format_double(args.eta)
        << " stdev_mw=" << format_double(args.stdev_mw) << " stdev_from_profile=" << args.stdev_from_profile
        << " seed=" << args.seed << ' ' << extra;
    return out.str();
}

int cmd_model(const CommonArgs& args) {
    const LoadedGrid g = load_common(args);
    const StateSpaceModel model = assemble_descriptor(g.spec, g.node);

    OutputSet out{fs::path(args.out_dir), {}};
    fs::create_directories(out.dir);
    out.add("model.txt", model_report(model));
    out.add("spectrum.csv", spectrum_report(model));
    out.finish(config_line("model", args, ""), g.bytes);

    const auto eigs = spectrum(model.A);
    const int rank = numerical_rank(controllability_matrix(model.A, model.B));
    std::cout << "model: " << model.map.n() << " states, attack node " << g.node << ", "
              << (is_stable(eigs) ? "stable" : "UNSTABLE") << " pre-attack, " << rank
              << " reachable directions\n";
    std::cout << "wrote " << (out.dir / "model.txt").string() << ", " << (out.dir / "spectrum.csv").string()
              << "\n";
    return kExitOk;
}

struct TargetArgs {
    double xi = 0.0;
    double omega_n = 0.0;
    double re = 0.0;
    double im = 0.0;
    bool have_ratio = false;
    bool have_pair = false;
};

std::vector<Complex> resolve_targets(const TargetArgs& t) {
    if (t.have_ratio == t.have_pair)
        throw Error("config", "give targets either as --xi/--omega-n or as --re/--im");
    if (t.have_ratio) return targets_from_damping(t.xi, t.omega_n);
    if (t.im == 0.0) throw Error("config", "target pair needs a nonzero imaginary part");
    return {Complex(t.re, std::abs(t.im)), Complex(t.re, -std::abs(t.im))};
}

struct TripArgs {
    std::string gen;
    double magnitude_mw = -1.0;
};

Eigen::VectorXd capture_state(const LoadedGrid& g, const StateSpaceModel& model, const TripArgs& trip,
                              std::string* used_gen = nullptr) {
    TripScenario scenario;
    scenario.gen_node = trip.gen.empty() ? default_trip_gen(g.spec) : trip.gen;
    if (trip.magnitude_mw >= 0.0) scenario.magnitude_pu = trip.magnitude_mw / g.spec.base_mva;
    if (used_gen) *used_gen = scenario.gen_node;
    return operating_state(model, g.spec, scenario);
}

int cmd_attack(const CommonArgs& args, const TargetArgs& targets_in, const TripArgs& trip, double cap_mw,
               bool with_sim, double horizon, double dt) {
    const LoadedGrid g = load_common(args);
    const StateSpaceModel model = assemble_descriptor(g.spec, g.node);
    const PlacementContext ctx(model);

    std::string trip_gen;
    const Eigen::VectorXd x = capture_state(g, model, trip, &trip_gen);
    const std::vector<Complex> targets = resolve_targets(targets_in);
    const UncertaintySpec u = uncertainty_for(args, g);

    const LoadParams* load = g.spec.find_load(g.node);
    const double cap_pu =
        cap_mw >= 0.0 ? cap_mw / g.spec.base_mva : load->evcs.max_kw / 1000.0 / g.spec.base_mva;

    const AttackPlan plan = synthesize_attack(ctx, targets, x, cap_pu, u, g.spec.base_mva);

    OutputSet out{fs::path(args.out_dir), {}};
    fs::create_directories(out.dir);
    out.add("plan.json", attack_plan_json(plan, model, x));

    if (with_sim) {
        const Eigen::MatrixXd A_closed = model.A + model.B * plan.gain.transpose();
        SimulationTrace trace = simulate(A_closed, model.B, model.map, model.f_s_hz, x, {}, horizon, dt);
        for (std::size_t k = 0; k < trace.t.size(); ++k) trace.u[k] = plan.gain.dot(trace.x.col(k));
        const auto events = detect_overfrequency_trips(trace);
        out.add("trace.csv", trace_csv(trace));
        out.add("trips.json", trip_report(events, kTripThresholdHz, kTripDwellS));
        std::cout << (events.empty() ? "no trip event" : "trip at " + events.front().node + " after " +
                                                             format_double(events.front().start_s) + " s")
                  << "\n";
    }

    std::ostringstream extra;
    extra << "targets=";
    for (Complex t : targets) extra << format_double(t.real()) << (t.imag() >= 0 ? "+" : "-")
                                    << format_double(std::abs(t.imag())) << "j ";
    extra << "cap_mw=" << format_double(cap_pu * g.spec.base_mva) << " trip_gen=" << trip_gen
          << " simulate=" << with_sim;
    out.finish(config_line("attack", args, extra.str()), g.bytes);

    if (args.print_pu)
        std::cout << "required demand: " << format_double(plan.delta_p_pu) << " pu (cap "
                  << format_double(cap_pu) << " pu, margin " << format_double(plan.alpha_pu) << " pu)\n";
    else
        std::cout << "required demand: " << format_double(plan.delta_p_mw) << " MW (cap "
                  << format_double(cap_pu * g.spec.base_mva) << " MW, margin "
                  << format_double(plan.alpha_pu * g.spec.base_mva) << " MW)\n";
    std::cout << "relocation error: " << format_double(plan.epsilon) << "\n";
    std::cout << (plan.feasible ? "feasible" : "infeasible") << "; plan written to "
              << (out.dir / "plan.json").string() << "\n";
    return plan.feasible ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const CommonArgs& args, double step_mw, double step_at, double horizon, double dt) {
    const LoadedGrid g = load_common(args);
    const StateSpaceModel model = assemble_descriptor(g.spec, g.node);

    PiecewiseConstant input;
    input.steps.push_back({step_at, step_mw / g.spec.base_mva});
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(model.map.n());
    const SimulationTrace trace = simulate(model, x0, input, horizon, dt);
    const auto events = detect_overfrequency_trips(trace);

    OutputSet out{fs::path(args.out_dir), {}};
    fs::create_directories(out.dir);
    out.add("trace.csv", trace_csv(trace));
    out.add("trips.json", trip_report(events, kTripThresholdHz, kTripDwellS));
    std::ostringstream extra;
    extra << "step_mw=" << format_double(step_mw) << " step_at=" << format_double(step_at)
          << " horizon=" << format_double(horizon) << " dt=" << format_double(dt);
    out.finish(config_line("simulate", args, extra.str()), g.bytes);

    std::cout << "simulated " << format_double(horizon) << " s, " << events.size()
              << " trip event(s); trace written to " << (out.dir / "trace.csv").string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const RegionSpec& region, const TripArgs& trip, int threads) {
    const LoadedGrid g = load_common(args);
    const StateSpaceModel model = assemble_descriptor(g.spec, g.node);
    const PlacementContext ctx(model);

    std::string trip_gen;
    const Eigen::VectorXd x = capture_state(g, model, trip, &trip_gen);

    SweepResult result = sweep_region(ctx, model, x, region, threads);
    result.hour_of_week = g.hour;

    OutputSet out{fs::path(args.out_dir), {}};
    fs::create_directories(out.dir);
    out.add("sweep_matrix.csv", sweep_matrix_csv(result));
    out.add("sweep_long.csv", sweep_long_csv(result));
    std::ostringstream extra;
    extra << "xi=" << format_double(region.xi_min) << ".." << format_double(region.xi_max) << "/"
          << format_double(region.xi_step) << " omega=" << format_double(region.omega_min) << ".."
          << format_double(region.omega_max) << "/" << format_double(region.omega_step)
          << " eps_max=" << format_double(region.eps_max) << " trip_gen=" << trip_gen;
    out.finish(config_line("sweep", args, extra.str()), g.bytes);

    int feasible = 0;
    for (const auto& cell : result.cells) feasible += cell.feasible ? 1 : 0;
    std::cout << "swept " << result.cells.size() << " cells, " << feasible
              << " feasible; matrices written to " << out.dir.string() << "\n";
    return kExitOk;
}

int cmd_sensitivity(const CommonArgs& args, double xi, double omega_n, const std::string& errors_text,
                    const TripArgs& trip, double cap_mw, double eps_max) {
    const LoadedGrid g = load_common(args);

    std::vector<double> errors;
    std::istringstream in(errors_text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            errors.push_back(std::stod(item) / 100.0);
        } catch (const std::exception&) {
            throw Error("config", "bad error percentage \"" + item + "\"");
        }
    }

    TripScenario scenario;
    scenario.gen_node = trip.gen.empty() ? default_trip_gen(g.spec) : trip.gen;
    if (trip.magnitude_mw >= 0.0) scenario.magnitude_pu = trip.magnitude_mw / g.spec.base_mva;

    const LoadParams* load = g.spec.find_load(g.node);
    const double cap_pu =
        cap_mw >= 0.0 ? cap_mw / g.spec.base_mva : load->evcs.max_kw / 1000.0 / g.spec.base_mva;
    const UncertaintySpec u = uncertainty_for(args, g);

    const auto rows =
        parameter_sensitivity(g.spec, g.node, scenario, xi, omega_n, errors, cap_pu, u, eps_max);

    OutputSet out{fs::path(args.out_dir), {}};
    fs::create_directories(out.dir);
    out.add("sensitivity.csv", sensitivity_csv(rows));
    std::ostringstream extra;
    extra << "xi=" << format_double(xi) << " omega_n=" << format_double(omega_n) << " errors="
          << errors_text << " trip_gen=" << scenario.gen_node
          << " cap_mw=" << format_double(cap_pu * g.spec.base_mva)
          << " eps_max=" << format_double(eps_max);
    out.finish(config_line("sensitivity", args, extra.str()), g.bytes);

    int feasible = 0;
    for (const auto& row : rows) feasible += row.feasible ? 1 : 0;
    std::cout << "evaluated " << rows.size() << " parameter error levels, " << feasible
              << " feasible; table written to " << (out.dir / "sensitivity.csv").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid frequency-dynamics toolkit: linearized models, demand-side feedback synthesis, "
                 "and vulnerability sweeps"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs common;

    auto* model_cmd = app.add_subcommand("model", "assemble the model and report its spectrum");
    add_common(model_cmd, common);

    auto* attack_cmd = app.add_subcommand("attack", "synthesize a demand-side feedback gain");
    add_common(attack_cmd, common);
    TargetArgs targets;
    auto* xi_opt = attack_cmd->add_option("--xi", targets.xi, "target damping ratio");
    auto* om_opt = attack_cmd->add_option("--omega-n", targets.omega_n, "target natural frequency (rad/s)");
    auto* re_opt = attack_cmd->add_option("--re", targets.re, "target real part (rad/s)");
    auto* im_opt = attack_cmd->add_option("--im", targets.im, "target imaginary part (rad/s)");
    TripArgs trip;
    attack_cmd->add_option("--trip-gen", trip.gen, "generator whose loss sets the operating state");
    attack_cmd->add_option("--trip-magnitude-mw", trip.magnitude_mw,
                           "override the lost injection (default: the generator's schedule)");
    double cap_mw = -1.0;
    attack_cmd->add_option("--cap-mw", cap_mw, "compromisable demand cap in MW (default: profile capacity)");
    bool with_sim = false;
    attack_cmd->add_flag("--simulate", with_sim, "simulate the closed loop and detect trips");
    double horizon = 20.0, dt = 1e-3;
    attack_cmd->add_option("--horizon", horizon, "simulation horizon (s)")->capture_default_str();
    attack_cmd->add_option("--dt", dt, "simulation step (s)")->capture_default_str();

    auto* sim_cmd = app.add_subcommand("simulate", "open-loop response to a demand step");
    add_common(sim_cmd, common);
    double step_mw = 0.0, step_at = 0.0, sim_horizon = 20.0, sim_dt = 1e-3;
    sim_cmd->add_option("--step-mw", step_mw, "demand step in MW (negative sheds load)")->required();
    sim_cmd->add_option("--step-at", step_at, "step time (s)")->capture_default_str();
    sim_cmd->add_option("--horizon", sim_horizon, "simulation horizon (s)")->capture_default_str();
    sim_cmd->add_option("--dt", sim_dt, "simulation step (s)")->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("sweep", "map the minimum demand over a damping/frequency region");
    add_common(sweep_cmd, common);
    RegionSpec region;
    sweep_cmd->add_option("--xi-min", region.xi_min)->capture_default_str();
    sweep_cmd->add_option("--xi-max", region.xi_max)->capture_default_str();
    sweep_cmd->add_option("--xi-step", region.xi_step)->capture_default_str();
    sweep_cmd->add_option("--omega-min", region.omega_min)->capture_default_str();
    sweep_cmd->add_option("--omega-max", region.omega_max)->capture_default_str();
    sweep_cmd->add_option("--omega-step", region.omega_step)->capture_default_str();
    sweep_cmd->add_option("--eps-max", region.eps_max, "relocation error accepted as achieved")
        ->capture_default_str();
    TripArgs sweep_trip;
    sweep_cmd->add_option("--trip-gen", sweep_trip.gen, "generator whose loss sets the operating state");
    sweep_cmd->add_option("--trip-magnitude-mw", sweep_trip.magnitude_mw,
                          "override the lost injection (default: the generator's schedule)");
    int threads = 0;
    sweep_cmd->add_option("--threads", threads, "worker threads (default: hardware)")->capture_default_str();

    auto* sens_cmd = app.add_subcommand("sensitivity", "re-run the design under parameter errors");
    add_common(sens_cmd, common);
    double sens_xi = 0.0, sens_omega = 0.0, sens_eps_max = 0.1, sens_cap_mw = -1.0;
    sens_cmd->add_option("--xi", sens_xi, "target damping ratio")->required();
    sens_cmd->add_option("--omega-n", sens_omega, "target natural frequency (rad/s)")->required();
    std::string errors_text = "-50,-10,-7.5,-5,-2.5,0,2.5,5,7.5,10,50,100";
    sens_cmd->add_option("--errors", errors_text, "comma-separated parameter error percentages")
        ->capture_default_str();
    TripArgs sens_trip;
    sens_cmd->add_option("--trip-gen", sens_trip.gen, "generator whose loss sets the operating state");
    sens_cmd->add_option("--trip-magnitude-mw", sens_trip.magnitude_mw,
                         "override the lost injection (default: the generator's schedule)");
    sens_cmd->add_option("--cap-mw", sens_cap_mw,
                         "compromisable demand cap in MW (default: profile capacity)");
    sens_cmd->add_option("--eps-max", sens_eps_max)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (model_cmd->parsed()) return cmd_model(common);
        if (attack_cmd->parsed()) {
            targets.have_ratio = xi_opt->count() > 0 && om_opt->count() > 0;
            targets.have_pair = re_opt->count() > 0 && im_opt->count() > 0;
            return cmd_attack(common, targets, trip, cap_mw, with_sim, horizon, dt);
        }
        if (sim_cmd->parsed()) return cmd_simulate(common, step_mw, step_at, sim_horizon, sim_dt);
        if (sweep_cmd->parsed()) return cmd_sweep(common, region, sweep_trip, threads);
        if (sens_cmd->parsed())
            return cmd_sensitivity(common, sens_xi, sens_omega, errors_text, sens_trip, sens_cap_mw,
                                   sens_eps_max);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "[internal] " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
